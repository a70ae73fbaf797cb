#include "cusp/bessel.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/bessel_prime.hpp>

#include <cmath>
#include <limits>
#include <stdexcept>

#include "cusp/errors.hpp"

namespace cusp {

namespace {

constexpr double kPi = boost::math::constants::pi<double>();

void check_args(double nu, double z) {
  if (!(nu >= -0.5)) throw std::invalid_argument("bessel_i: order must be >= -1/2");
  if (!(z > 0.0) || !std::isfinite(z)) throw std::invalid_argument("bessel_i: argument must be positive and finite");
}

bool half_negative(double nu) { return nu == -0.5; }

void crossover_check(double nu) {
  const double a = bessel_i_series(nu, kBesselCrossover);
  const double b = boost::math::cyl_bessel_i(nu, kBesselCrossover);
  if (std::abs(a - b) > 1e-9 * std::abs(b))
    throw ComputationError("bessel_i: series and large-argument branch disagree at the crossover");
}

}  // namespace

double bessel_i_series(double nu, double z) {
  check_args(nu, z);
  const double h = 0.5 * z;
  // first term (z/2)^nu / Gamma(nu + 1)
  double term = std::exp(nu * std::log(h) - std::lgamma(nu + 1.0));
  double sum = term;
  const double h2 = h * h;
  for (int k = 1; k < 500; ++k) {
    term *= h2 / (k * (k + nu));
    sum += term;
    if (term < std::numeric_limits<double>::epsilon() * 0.25 * sum) break;
  }
  return sum;
}

double bessel_i(double nu, double z) {
  check_args(nu, z);
  if (half_negative(nu)) return std::sqrt(2.0 / (kPi * z)) * std::cosh(z);
  if (z <= kBesselCrossover) return bessel_i_series(nu, z);
  crossover_check(nu);
  return boost::math::cyl_bessel_i(nu, z);
}

double bessel_i_scaled(double nu, double z) {
  check_args(nu, z);
  if (half_negative(nu)) return std::sqrt(2.0 / (kPi * z)) * 0.5 * (1.0 + std::exp(-2.0 * z));
  if (z > 700.0) throw std::invalid_argument("bessel_i_scaled: argument beyond supported range (700)");
  return std::exp(-z) * bessel_i(nu, z);
}

double bessel_i_ratio(double nu, double z) {
  check_args(nu, z);
  if (half_negative(nu)) return std::tanh(z);
  if (z > 700.0) throw std::invalid_argument("bessel_i_ratio: argument beyond supported range (700)");
  return bessel_i(nu + 1.0, z) / bessel_i(nu, z);
}

double bessel_j(int l, double x) { return boost::math::cyl_bessel_j(l, x); }

double bessel_j_prime(int l, double x) { return boost::math::cyl_bessel_j_prime(l, x); }

}  // namespace cusp
