#include "cusp/weyl_count.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

namespace cusp {

namespace {

constexpr double kTwoPi = boost::math::constants::two_pi<double>();

void require_p_open(double p) {
  if (!(p > 1.0 && p < 2.0))
    throw std::invalid_argument("p must lie in (1,2) (power-law peak range), got " + std::to_string(p));
}

}  // namespace

PhaseIntegral phase_integral_with_error(double p) {
  if (!(p >= 1.0 && p < 2.0))
    throw std::invalid_argument("phase integral needs 1 <= p < 2 (diverges at p = 2), got " + std::to_string(p));
  boost::math::quadrature::tanh_sinh<double> ts;
  const double tol = 1e-15;
  double err_lo = 0.0, err_hi = 0.0;
  // (0, 1/2] with u = s^p and then v = u^a, a = 1/p - 1/2, which leaves
  // the smooth integrand sqrt(1 - v^{1/a}) / (a p)
  const double a = 1.0 / p - 0.5;
  const double v_max = std::pow(0.5, p * a);
  const double lo = ts.integrate(
      [p, a](double v) { return std::sqrt(1.0 - std::pow(v, 1.0 / a)) / (a * p); },
      0.0, v_max, tol, &err_lo);
  // [1/2, 1): complement argument keeps 1 - s^p accurate near s = 1
  const double hi = ts.integrate(
      [p](double s, double sc) {
        const double one_minus = sc > 0.0 && sc < 0.25 ? -std::expm1(p * std::log1p(-sc))
                                                       : 1.0 - std::pow(s, p);
        return std::sqrt(one_minus / std::pow(s, p));
      },
      0.5, 1.0, tol, &err_hi);
  return {lo + hi, err_lo + err_hi + 1e-15 * std::abs(lo + hi)};
}

double phase_integral(double p) { return phase_integral_with_error(p).value; }

double phase_integral_closed_form(double p) {
  if (!(p >= 1.0 && p < 2.0))
    throw std::invalid_argument("phase integral needs 1 <= p < 2, got " + std::to_string(p));
  return boost::math::beta(1.0 / p - 0.5, 1.5) / p;
}

WeylConstants weyl_J(double p, int n) {
  require_p_open(p);
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  const PhaseIntegral I = phase_integral_with_error(p);
  WeylConstants w;
  w.p = p;
  w.n = n;
  w.I_p = I.value;
  w.J_p = std::pow(static_cast<double>(n), 1.0 / p) * I.value / kTwoPi;
  w.quadrature_error_bound = I.error_bound;
  return w;
}

double threshold_count_coeff(double p, int n, double m, double B) {
  require_p_open(p);
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (!(m > 0.0)) throw std::invalid_argument("m must be > 0");
  if (!(B > 0.0)) throw std::invalid_argument("B must be > 0");
  return std::pow(B, (p - 2.0) / (2.0 * p)) * std::pow(n / m, 1.0 / p) * phase_integral(p) / kTwoPi;
}

double predicted_count(double p, int n, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be > 0");
  return weyl_J(p, n).J_p * std::pow(eps, -(2.0 - p) / (2.0 * p));
}

}  // namespace cusp
