#include "doctest.h"

#include "cusp/linalg_eig.hpp"
#include "oracles.hpp"

#include <cmath>

using cusp::count_below;
using cusp::make_pair;
using cusp::smallest_eigenpairs;
using cusp::SpMat;

namespace {

SpMat diag(const std::vector<double>& d) {
  SpMat A(static_cast<int>(d.size()), static_cast<int>(d.size()));
  for (int i = 0; i < static_cast<int>(d.size()); ++i) A.insert(i, i) = d[i];
  A.makeCompressed();
  return A;
}

SpMat eye(int n) { return diag(std::vector<double>(n, 1.0)); }

long oracle_count(const std::vector<double>& ev, double t) {
  return std::count_if(ev.begin(), ev.end(), [&](double e) { return e < t; });
}

}  // namespace

TEST_CASE("scalar problem") {
  auto pair = make_pair(diag({2.0}), diag({1.0}));
  auto s = smallest_eigenpairs(pair, 1, std::nullopt, 1e-10);
  REQUIRE(s.values.size() == 1);
  CHECK(s.values[0] == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("diagonal problem") {
  auto pair = make_pair(diag({1, 2, 3}), eye(3));
  auto s = smallest_eigenpairs(pair, 2, std::nullopt, 1e-10);
  CHECK(s.values[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s.values[1] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(count_below(pair, 2.5).count == 2);
  CHECK(count_below(pair, 0.5).count == 0);
}

TEST_CASE("diagonal problem on the Krylov path") {
  std::vector<double> d(40);
  for (int i = 0; i < 40; ++i) d[i] = 40.0 - i;
  d[3] = 0.5;
  auto pair = make_pair(diag(d), eye(40), 2);  // force the general path
  auto s = smallest_eigenpairs(pair, 3, std::nullopt, 1e-10);
  CHECK(s.values[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(s.values[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.values[2] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("random 50x50 pair matches dense oracle") {
  for (unsigned seed : {1u, 2u, 3u}) {
    auto [K, M] = oracle::random_pair(50, 0.08, seed);
    auto pair = make_pair(K, M);
    auto ref = oracle::generalized_eigenvalues(Eigen::MatrixXd(K), Eigen::MatrixXd(M));
    auto s = smallest_eigenpairs(pair, 5, std::nullopt, 1e-10);
    REQUIRE(s.values.size() == 5);
    for (int j = 0; j < 5; ++j) {
      CHECK(std::abs(s.values[j] - ref[j]) <= 1e-10);
      CHECK(s.residual_norms[j] <= 1e-10);
    }
  }
}

TEST_CASE("random tridiagonal pair matches dense oracle") {
  auto [K, M] = oracle::random_pair(50, 0.0, 11u, true);
  auto pair = make_pair(K, M);
  REQUIRE(cusp::is_tridiagonal(pair));
  auto ref = oracle::generalized_eigenvalues(Eigen::MatrixXd(K), Eigen::MatrixXd(M));
  auto s = smallest_eigenpairs(pair, 4, std::nullopt, 1e-10);
  for (int j = 0; j < 4; ++j) CHECK(std::abs(s.values[j] - ref[j]) <= 1e-10);
  const double median = 0.5 * (ref[24] + ref[25]);
  CHECK(count_below(pair, median + 0.1).count == oracle_count(ref, median + 0.1));
}

TEST_CASE("count below Gershgorin bound is zero") {
  auto [K, M] = oracle::random_pair(30, 0.2, 5u);
  auto pair = make_pair(K, M);
  // |x^T K x| <= |K|_inf |x|^2 and x^T M x >= 0.5 |x|^2
  double kinf = Eigen::MatrixXd(K).cwiseAbs().rowwise().sum().maxCoeff();
  CHECK(count_below(pair, -kinf / 0.5 - 1.0).count == 0);
}

TEST_CASE("count matches dense spectrum exhaustively") {
  for (int n : {5, 37, 120, 200}) {
    for (bool tri : {false, true}) {
      auto [K, M] = oracle::random_pair(n, tri ? 0.0 : 0.05, 100u + n, tri);
      auto pair = make_pair(K, M);
      auto ref = oracle::generalized_eigenvalues(Eigen::MatrixXd(K), Eigen::MatrixXd(M));
      long prev = -1;
      for (int i = 0; i + 1 < n; ++i) {
        const double t = 0.5 * (ref[i] + ref[i + 1]);
        if (ref[i + 1] - ref[i] < 1e-9) continue;
        auto c = count_below(pair, t);
        CHECK(c.count == i + 1);
        CHECK(c.count >= prev);
        prev = c.count;
      }
      CHECK(count_below(pair, ref.front() - 1.0).count == 0);
      CHECK(count_below(pair, ref.back() + 1.0).count == n);
    }
  }
}

TEST_CASE("threshold on an eigenvalue is flagged and counted strictly") {
  auto pair = make_pair(diag({1, 2, 3}), eye(3));
  auto c = count_below(pair, 2.0);
  CHECK(c.ambiguous);
  CHECK(c.count == 1);
  std::vector<double> d(30);
  for (int i = 0; i < 30; ++i) d[i] = i + 1.0;
  auto big = make_pair(diag(d), eye(30), 2);
  auto c2 = count_below(big, 5.0);
  CHECK(c2.ambiguous);
  CHECK(c2.count == 4);
}

TEST_CASE("shift on an eigenvalue signals ShiftHitsSpectrum") {
  std::vector<double> d(30);
  for (int i = 0; i < 30; ++i) d[i] = i + 1.0;
  auto pair = make_pair(diag(d), eye(30), 2);
  CHECK_THROWS_AS(smallest_eigenpairs(pair, 2, 1.0, 1e-10), cusp::ShiftHitsSpectrum);
  auto s = smallest_eigenpairs(pair, 2, 1.0 - 1e-6, 1e-10);
  CHECK(s.values[0] == doctest::Approx(1.0));
}

TEST_CASE("shift above part of the spectrum is moved down") {
  auto [K, M] = oracle::random_pair(60, 0.05, 21u);
  auto pair = make_pair(K, M);
  auto ref = oracle::generalized_eigenvalues(Eigen::MatrixXd(K), Eigen::MatrixXd(M));
  auto s = smallest_eigenpairs(pair, 3, ref[5] + 0.01, 1e-10);
  for (int j = 0; j < 3; ++j) CHECK(std::abs(s.values[j] - ref[j]) <= 1e-10);
  CHECK(s.shift_used < ref[0]);
}

TEST_CASE("k and k+1 eigenpairs share a prefix") {
  auto [K, M] = oracle::random_pair(80, 0.04, 33u);
  auto pair = make_pair(K, M);
  auto s4 = smallest_eigenpairs(pair, 4, std::nullopt, 1e-10);
  auto s5 = smallest_eigenpairs(pair, 5, std::nullopt, 1e-10);
  for (int j = 0; j < 4; ++j) CHECK(std::abs(s4.values[j] - s5.values[j]) <= 1e-10 * (1 + std::abs(s4.values[j])));
  for (size_t j = 1; j < s5.values.size(); ++j) CHECK(s5.values[j] >= s5.values[j - 1]);
}

TEST_CASE("vectors are M-orthonormal eigenvectors") {
  auto [K, M] = oracle::random_pair(70, 0.05, 44u);
  auto pair = make_pair(K, M);
  auto s = smallest_eigenpairs(pair, 4, std::nullopt, 1e-10);
  Eigen::MatrixXd G = s.vectors.transpose() * (M * s.vectors);
  CHECK((G - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-10);
  for (int j = 0; j < 4; ++j) CHECK(cusp::relative_residual(pair, s.vectors.col(j), s.values[j]) <= 1e-10);
}

TEST_CASE("deterministic for identical inputs") {
  auto [K, M] = oracle::random_pair(90, 0.04, 55u);
  auto pair = make_pair(K, M);
  auto a = smallest_eigenpairs(pair, 3, std::nullopt, 1e-10);
  auto b = smallest_eigenpairs(pair, 3, std::nullopt, 1e-10);
  for (int j = 0; j < 3; ++j) CHECK(a.values[j] == b.values[j]);
}

TEST_CASE("iteration budget exhaustion carries the partial spectrum") {
  auto [K, M] = oracle::random_pair(300, 0.02, 66u);
  auto pair = make_pair(K, M);
  cusp::EigOptions o;
  o.max_iter = 2;
  o.subspace = 3;
  o.tol = 1e-14;
  try {
    smallest_eigenpairs(pair, 6, o);
    FAIL("expected NotConverged");
  } catch (const cusp::NotConverged& e) {
    CHECK(e.partial.values.size() < 6);
  }
}

TEST_CASE("input validation") {
  auto pair = make_pair(diag({1, 2, 3}), eye(3));
  CHECK_THROWS_AS(smallest_eigenpairs(pair, 0, std::nullopt, 1e-10), std::invalid_argument);
  CHECK_THROWS_AS(smallest_eigenpairs(pair, 4, std::nullopt, 1e-10), std::invalid_argument);
  CHECK_THROWS_AS(smallest_eigenpairs(pair, 1, std::nullopt, 0.0), std::invalid_argument);
  SpMat A(2, 2);
  A.insert(0, 1) = 1.0;
  A.insert(1, 0) = 2.0;
  CHECK_THROWS_AS(make_pair(A, eye(2)), std::invalid_argument);
  CHECK_THROWS_AS(make_pair(diag({1, 2}), eye(3)), std::invalid_argument);
  CHECK_THROWS_AS(count_below(pair, std::nan("")), std::invalid_argument);
}
