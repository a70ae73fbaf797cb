#include "doctest.h"

#include "cusp/weyl_count.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace {

// Beta through std::tgamma, independent of the library path
double beta_gamma(double a, double b) { return std::tgamma(a) * std::tgamma(b) / std::tgamma(a + b); }
double closed(double p) { return beta_gamma(1.0 / p - 0.5, 1.5) / p; }
constexpr double kPi = 3.14159265358979323846;

}  // namespace

TEST_CASE("phase integral reference values") {
  CHECK(std::abs(cusp::phase_integral(1.0) - kPi / 2) <= 1e-12);
  CHECK(std::abs(cusp::phase_integral(1.5) - 3.642975971831372) <= 1e-12);
  CHECK(std::abs(cusp::phase_integral(4.0 / 3.0) - 2.622057554292120) <= 1e-12);
  CHECK(std::abs(cusp::phase_integral(1.5) - closed(1.5)) <= 1e-12);
}

TEST_CASE("phase integral agrees with the Beta closed form on random p") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(1.01, 1.99);
  for (int i = 0; i < 200; ++i) {
    const double p = u(rng);
    CHECK(std::abs(cusp::phase_integral(p) - closed(p)) <= 1e-10 * closed(p));
    CHECK(std::abs(cusp::phase_integral(p) - cusp::phase_integral_closed_form(p)) <= 1e-10 * closed(p));
  }
}

TEST_CASE("phase integral increases with p") {
  double prev = cusp::phase_integral(1.0);
  for (double p = 1.05; p < 1.99; p += 0.05) {
    const double v = cusp::phase_integral(p);
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("phase integral domain") {
  CHECK_THROWS_AS(cusp::phase_integral(2.0), std::invalid_argument);
  CHECK_THROWS_AS(cusp::phase_integral(0.9), std::invalid_argument);
  CHECK_THROWS_AS(cusp::weyl_J(1.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(cusp::weyl_J(1.5, 0), std::invalid_argument);
}

TEST_CASE("J_p values") {
  auto w = cusp::weyl_J(1.2, 1);
  CHECK(std::abs(w.J_p - 0.3347463197663200) <= 1e-13);
  CHECK(w.J_p == doctest::Approx(w.I_p / (2 * kPi)).epsilon(1e-15));
  CHECK(w.quadrature_error_bound < 1e-12);
  auto w1 = cusp::weyl_J(1.5, 1), w2 = cusp::weyl_J(1.5, 2);
  CHECK(w2.J_p == doctest::Approx(std::pow(2.0, 2.0 / 3.0) * w1.J_p).epsilon(1e-14));
}

TEST_CASE("M_p coefficient") {
  for (double p : {1.2, 1.5, 1.8}) {
    CHECK(cusp::threshold_count_coeff(p, 1, 1.0, 1.0) == doctest::Approx(cusp::weyl_J(p, 1).J_p).epsilon(1e-14));
    const double base = cusp::threshold_count_coeff(p, 2, 1.3, 0.7);
    CHECK(cusp::threshold_count_coeff(p, 2, 1.3, 1.4) / base ==
          doctest::Approx(std::pow(2.0, (p - 2) / (2 * p))).epsilon(1e-14));
    CHECK(cusp::threshold_count_coeff(p, 2, 2.6, 0.7) / base == doctest::Approx(std::pow(2.0, -1 / p)).epsilon(1e-14));
  }
  CHECK_THROWS_AS(cusp::threshold_count_coeff(1.5, 1, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(cusp::threshold_count_coeff(1.5, 1, 1.0, -1.0), std::invalid_argument);
}

TEST_CASE("predicted count") {
  CHECK(cusp::predicted_count(1.5, 1, 1.0) == doctest::Approx(cusp::weyl_J(1.5, 1).J_p).epsilon(1e-15));
  for (double p : {1.2, 1.5}) {
    const double e = 1e-3;
    const double ratio = cusp::predicted_count(p, 1, e / std::pow(2.0, 2 * p / (2 - p))) / cusp::predicted_count(p, 1, e);
    CHECK(ratio == doctest::Approx(2.0).epsilon(1e-12));
  }
  CHECK(cusp::predicted_count(1.2, 1, 1e-6) == doctest::Approx(33.47463197663200).epsilon(1e-10));
  CHECK_THROWS_AS(cusp::predicted_count(1.5, 1, 0.0), std::invalid_argument);
}
