#include "doctest.h"

#include "cusp/errors.hpp"
#include "cusp/peak_fem.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

using cusp::CapBC;
using cusp::PeakModelParams;
using cusp::PeakSolveOptions;

namespace {

// E_1(A_1), p = 1.5, n = 1, from the one-dimensional ladder.
constexpr double kE1A1 = -2.6026306715;

PeakSolveOptions fast_options() {
  PeakSolveOptions o;
  o.grid.ratio = 1.04;
  o.grid.far_ratio = 1.15;
  o.grid.tau_elements = 12;
  return o;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

cusp::Spectrum solve_on(const PeakModelParams& prm, const cusp::RectGrid& g, int k, double shift) {
  cusp::EigOptions eo;
  eo.shift = shift;
  return cusp::smallest_eigenpairs(cusp::assemble_peak_rect(prm, g), k, eo);
}

}  // namespace

TEST_CASE("metric identities") {
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> us(-6.0, 0.0), ut(-1.0, 1.0), up(1.01, 1.99);
  double worst_inv = 0.0, worst_det = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double s = std::pow(10.0, us(rng)), p = up(rng), t = ut(rng) * 0.49 * std::pow(s, p);
    const Eigen::Matrix2d G = cusp::metric_G(s, t, p), H = cusp::metric_G_hat(s, t, p);
    worst_inv = std::max(worst_inv, (G * H - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff());
    worst_det = std::max(worst_det, std::abs(G.determinant() * std::pow(s, 2 * p) - 1.0));
    CHECK(G(0, 1) == G(1, 0));
  }
  CHECK(worst_inv <= 1e-12);
  CHECK(worst_det <= 1e-12);
  const Eigen::Matrix2d G0 = cusp::metric_G(0.3, 0.0, 1.5);
  CHECK(G0(0, 0) == 1.0);
  CHECK(G0(0, 1) == 0.0);
  CHECK(G0(1, 1) == doctest::Approx(std::pow(0.3, -3.0)).epsilon(1e-15));
  CHECK_THROWS_AS(cusp::metric_G(0.0, 0.1, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(cusp::metric_G_hat(-1.0, 0.1, 1.5), std::invalid_argument);
}

TEST_CASE("parameter validation") {
  CHECK_NOTHROW(cusp::validate(PeakModelParams{}));
  CHECK_THROWS_AS(cusp::validate({1.0, 0.05, 1.0, CapBC::Dirichlet, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(cusp::validate({2.5, 0.05, 1.0, CapBC::Dirichlet, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(cusp::validate({1.5, 0.0, 1.0, CapBC::Dirichlet, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(cusp::validate({1.5, 0.05, -1.0, CapBC::Dirichlet, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(cusp::validate({1.5, 0.05, 1.0, CapBC::Dirichlet, 1.0}), std::invalid_argument);
  // eps a^{p-1} must stay below 1/2
  CHECK_THROWS_AS(cusp::validate({1.5, 0.3, 4.0, CapBC::Dirichlet, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(cusp::spectrum_T({1.5, 0.05, 1.0, CapBC::Dirichlet, 0.0}, 0), std::invalid_argument);
  CHECK_THROWS_AS(cusp::physical_alpha_spectrum(-1.0, 1.0, 1.5, 0.1, 1), std::invalid_argument);
  CHECK_THROWS_AS(cusp::bracket_spectra(1.5, 0.1, 1e-3, {1.0}, 1), std::invalid_argument);
}

TEST_CASE("rect grid invariants") {
  const double scale = cusp::peak_length_scale(1.5, 0.1);
  CHECK(scale == doctest::Approx(0.01).epsilon(1e-14));
  const auto g = cusp::make_rect_grid(1e-9 * scale, {0.5, 1.0}, scale);
  CHECK(g.s_nodes.front() == 1e-9 * scale);
  CHECK(g.s_nodes.back() == 1.0);
  CHECK(std::find(g.s_nodes.begin(), g.s_nodes.end(), 0.5) != g.s_nodes.end());
  for (int i = 1; i < g.ns(); ++i) CHECK(g.s_nodes[i] > g.s_nodes[i - 1]);
  CHECK(g.nt() == 25);
  CHECK(g.tau_nodes.front() == -1.0);
  CHECK(g.tau_nodes.back() == 1.0);
  for (int j = 1; j < g.nt(); ++j) CHECK(g.tau_nodes[j] - g.tau_nodes[j - 1] == doctest::Approx(2.0 / 24).epsilon(1e-12));
  CHECK(g.tip_extension);
  const auto r = g.refined_s();
  CHECK(r.ns() == 2 * g.ns() - 1);
  const auto t = g.truncated(0.5);
  CHECK(t.s_nodes.back() == 0.5);
  CHECK(std::equal(t.s_nodes.begin(), t.s_nodes.end(), g.s_nodes.begin()));
  CHECK_THROWS_AS(g.truncated(0.77), std::invalid_argument);
}

TEST_CASE("assembly is symmetric with positive mass") {
  for (bool collapse : {true, false}) {
    cusp::PeakGridOptions go;
    go.ratio = 1.15;
    go.far_ratio = 1.4;
    go.tau_elements = 8;
    go.collapse = collapse;
    const PeakModelParams prm{1.5, 0.1, 1.0, CapBC::Neumann, 1e-6};
    const auto g = cusp::make_rect_grid(1e-6, {1.0}, 0.01, go);
    const auto pair = cusp::assemble_peak_rect(prm, g);
    const cusp::SpMat K = pair.stiffness, M = pair.mass;
    CHECK((cusp::SpMat(K.transpose()) - K).norm() == 0.0);
    CHECK((cusp::SpMat(M.transpose()) - M).norm() == 0.0);
    Eigen::SimplicialLLT<cusp::SpMat> llt(M);
    CHECK(llt.info() == Eigen::Success);
    CHECK_NOTHROW(cusp::validate_pair(pair));
  }
}

TEST_CASE("Neumann Laplacian kernel") {
  cusp::PeakGridOptions go;
  go.ratio = 1.1;
  go.far_ratio = 1.3;
  go.tau_elements = 8;
  const PeakModelParams prm{1.5, 0.1, 0.2, CapBC::Neumann, 1e-8};
  const auto g = cusp::make_rect_grid(1e-8, {0.2}, 0.01, go);
  const auto pair = cusp::assemble_peak_rect(prm, g, 0.0);
  cusp::EigOptions eo;
  eo.shift = -1.0;
  const auto s = cusp::smallest_eigenpairs(pair, 2, eo);
  CHECK(std::abs(s.values[0]) <= 1e-9 * s.values[1]);
  CHECK(s.values[1] > 1.0);
  const Eigen::MatrixXd v = cusp::peak_nodal_values(prm, g, s.vectors.col(0));
  const double mean = v.mean();
  CHECK((v.array() - mean).abs().maxCoeff() <= 1e-8 * std::abs(mean));
}

TEST_CASE("Dirichlet cap above Neumann cap on every grid") {
  // cap at 3 length scales so the cap is felt
  for (double ratio : {1.1, 1.05}) {
    cusp::PeakGridOptions go;
    go.ratio = ratio;
    go.tau_elements = 12;
    const double eps = 0.1, a = 0.03, scale = cusp::peak_length_scale(1.5, eps);
    const auto g = cusp::make_rect_grid(1e-9 * scale, {a}, scale, go);
    const auto d = solve_on({1.5, eps, a, CapBC::Dirichlet, 1e-9 * scale}, g, 3, 1.25 * kE1A1 / std::pow(eps, 4));
    const auto n = solve_on({1.5, eps, a, CapBC::Neumann, 1e-9 * scale}, g, 3, 1.25 * kE1A1 / std::pow(eps, 4));
    for (int j = 0; j < 3; ++j) CHECK(n.values[j] <= d.values[j]);
    CHECK(n.values[0] < d.values[0] * (1 + 1e-6));
  }
}

TEST_CASE("T spectrum: negativity, certificate, monotone in a") {
  const auto o = fast_options();
  double prev = 0.0;
  for (double a : {0.02, 0.05, 1.0}) {
    const auto s = cusp::spectrum_T({1.5, 0.1, a, CapBC::Dirichlet, 0.0}, 2, o);
    CHECK(s.values[0] < 0.0);
    CHECK(s.values[0] < s.values[1]);
    CHECK(s.grid_descriptor.find("tip_change=") != std::string::npos);
    if (a == 0.05) CHECK(s.values[0] < prev);
    if (a == 1.0) CHECK(s.values[0] <= prev * (1 - 1e-10));
    prev = s.values[0];
  }
  // ratio to the one-dimensional prediction at eps = 0.1
  const auto s = cusp::spectrum_T({1.5, 0.1, 1.0, CapBC::Dirichlet, 0.0}, 1);
  CHECK(std::abs(s.values[0] * std::pow(0.1, 4.0) / kE1A1 - 1.0) <= 1e-3);
}

TEST_CASE("bracketing Q <= Q tilde <= T and sandwich width") {
  const auto o = fast_options();
  const double b = 3e-4;
  double prev_width = 1.0;
  for (double eps : {0.12, 0.1, 0.08}) {
    const double ell = b * std::pow(eps, -2.0);
    const auto br = cusp::bracket_spectra(1.5, eps, b, {0.4 * ell, 0.7 * ell}, 2, o);
    REQUIRE(br.rows.size() == 4);
    for (int j = 0; j < 2; ++j) {
      CHECK(br.rows[0][j] <= br.rows[1][j]);
      CHECK(br.rows[1][j] <= br.rows[3][j]);
      CHECK(br.rows[3][j] <= br.rows[2][j]);
    }
    const double width = std::abs(br.rows[0][0] - br.rows[1][0]) / std::abs(br.rows[0][0]);
    CHECK(width < prev_width);
    prev_width = width;
  }
}

TEST_CASE("physical alpha spectrum") {
  const auto o = fast_options();
  const double alpha = 400.0, delta = 0.05;
  const auto s1 = cusp::physical_alpha_spectrum(alpha, 1.0, 1.5, delta, 1, o);
  const auto q = cusp::spectrum_Q(1.5, 0.05, delta, 1, o);
  CHECK(s1.values[0] == alpha * alpha * q.values[0]);
  CHECK(rel(s1.values[0], std::pow(alpha, 4.0) * kE1A1) <= 1e-3);
  // m -> 2m multiplies the leading term by 2^{-4}
  const auto s2 = cusp::physical_alpha_spectrum(alpha, 2.0, 1.5, delta, 1, o);
  CHECK(rel(s2.values[0] / s1.values[0], std::pow(2.0, -4.0)) <= 1e-3);
}

TEST_CASE("Q truncation sensitivity note") {
  auto o = fast_options();
  const double ell = 0.1 / (0.1 * 0.1);
  o.ell_cap = 0.05 * ell;
  const auto s = cusp::spectrum_Q(1.5, 0.1, 0.1, 1, o);
  CHECK(s.grid_descriptor.find("truncation_sensitivity=") != std::string::npos);
  CHECK(s.values[0] < 0.0);
}

TEST_CASE("budget and certificate failures") {
  auto o = fast_options();
  o.max_unknowns = 100;
  CHECK_THROWS_AS(cusp::spectrum_T({1.5, 0.1, 1.0, CapBC::Dirichlet, 0.0}, 1, o), cusp::BudgetExceeded);
  auto c = fast_options();
  c.tip_tolerance = 0.0;
  c.tip_retries = 0;
  c.richardson = false;
  CHECK_THROWS_AS(cusp::spectrum_T({1.5, 0.1, 1.0, CapBC::Dirichlet, 0.0}, 1, c), cusp::CertificateFailure);
}
