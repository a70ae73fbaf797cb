#include "cusp/robin_ball.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <utility>

#include "cusp/bessel.hpp"
#include "cusp/errors.hpp"

namespace cusp {

namespace {

constexpr double kPi = boost::math::constants::pi<double>();

double nu_of(int n) { return 0.5 * n - 1.0; }

void require_ball(int n, double eps) {
  if (n < 1) throw std::invalid_argument("ball dimension n must be >= 1");
  if (!(eps > 0.0) || !std::isfinite(eps)) throw std::invalid_argument("ball radius eps must be > 0");
}

template <class F>
double gk_integrate(F f, double a, double b, double rel_tol, unsigned depth = 12) {
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, depth, rel_tol, &err);
}

// Bisection on a sign change, to relative width `rel`.
template <class F>
double bisect_root(F f, double lo, double hi, double rel) {
  double flo = f(lo);
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= rel * std::abs(mid) || mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double unit_sphere_area(int n) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  return 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n);
}

double ground_state_interval(double eps, double r) {
  require_ball(1, eps);
  if (!std::isfinite(r)) throw std::invalid_argument("Robin parameter must be finite");
  if (r == 0.0) return 0.0;
  const double x = eps * r;
  if (r > 0.0) {
    // lambda tanh(lambda) = x
    auto f = [x](double l) {
      const double t = std::tanh(l);
      return std::make_pair(l * t - x, t + l * (1.0 - t * t));
    };
    double lo = 0.5 * std::sqrt(x), hi = x + 1.0;
    for (int expand = 0; f(lo).first > 0.0 || f(hi).first < 0.0; ++expand) {
      if (expand > 60) throw ComputationError("ground_state_interval: root not bracketed");
      lo *= 0.5;
      hi *= 2.0;
    }
    boost::uintmax_t iters = 200;
    const double lam = boost::math::tools::newton_raphson_iterate(f, 0.5 * (lo + hi), lo, hi, 52, iters);
    return -(lam / eps) * (lam / eps);
  }
  // lambda tan(lambda) = -x on (0, pi/2)
  const double y = -x;
  auto g = [y](double l) {
    const double t = std::tan(l);
    return std::make_pair(l * t - y, t + l * (1.0 + t * t));
  };
  const double lo = 0.0, hi = 0.5 * kPi * (1.0 - 1e-15);
  if (!(g(hi).first > 0.0)) throw ComputationError("ground_state_interval: root not bracketed");
  boost::uintmax_t iters = 200;
  const double guess = std::min(std::sqrt(y), 0.5 * kPi * (1.0 - 1e-3));
  const double lam = boost::math::tools::newton_raphson_iterate(g, guess, lo, hi, 52, iters);
  return (lam / eps) * (lam / eps);
}

double ball_lambda(int n, double eps, double r) {
  require_ball(n, eps);
  if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("ball ground state needs r > 0");
  const double nu = nu_of(n);
  // lambda * I_{nu+1}/I_nu (lambda eps) increases from 0 to infinity
  auto f = [&](double l) { return l * bessel_i_ratio(nu, l * eps) - r; };
  double hi = r + (n + 1.0) / eps;
  double lo = std::min(0.5 * std::sqrt(2.0 * n * r / eps), 0.5 * hi);
  for (int expand = 0; f(lo) > 0.0; ++expand) {
    if (expand > 200) throw ComputationError("ball_lambda: lower bracket not found");
    lo *= 0.5;
  }
  for (int expand = 0; f(hi) < 0.0; ++expand) {
    if (expand > 60) throw ComputationError("ball_lambda: upper bracket not found");
    hi *= 2.0;
  }
  return bisect_root(f, lo, hi, 1e-15);
}

double ground_state_ball(int n, double eps, double r) {
  const double l = ball_lambda(n, eps, r);
  return -l * l;
}

double ball_secular_residual(int n, double eps, double r, double lambda) {
  const double nu = nu_of(n);
  const double z = lambda * eps;
  // divide through by e^{z} to stay finite
  const double a = bessel_i_scaled(nu + 1.0, z), b = bessel_i_scaled(nu, z);
  return std::abs(lambda * a - r * b) / (r * b);
}

double disk_branch_root(int l, double x) {
  if (l < 0) throw std::invalid_argument("angular momentum must be >= 0");
  auto f = [l, x](double k) { return k * bessel_j_prime(l, k) - x * bessel_j(l, k); };
  // scan for the first sign change on (0, 20]
  const double h = 0.01;
  double a = 1e-6;
  double fa = f(a);
  for (double b = h; b <= 20.0 + 1e-12; b += h) {
    const double fb = f(b);
    if (fa != 0.0 && (fa < 0.0) != (fb < 0.0)) return bisect_root(f, a, b, 1e-15);
    a = b;
    fa = fb;
  }
  throw ComputationError("disk_branch_root: no root in (0, 20]");
}

double second_eigenvalue_disk(double x) {
  if (!(x > 0.0 && x < 1.0)) throw std::invalid_argument("second_eigenvalue_disk needs 0 < x < 1");
  // l = 0: the ground state is the negative radial branch; its first
  // positive root is a higher eigenvalue. l >= 1 branches stay positive for x < l.
  double best = std::numeric_limits<double>::infinity();
  for (int l = 0; l <= 2; ++l) {
    const double k = disk_branch_root(l, x);
    best = std::min(best, k * k);
  }
  return best;
}

double log_normalization_beta(double lambda, double eps, int n) {
  require_ball(n, eps);
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be > 0");
  const double Z = eps * lambda;
  if (Z > 600.0) throw std::invalid_argument("normalization_beta: eps*lambda > 600 is outside the supported range");
  const double nu = nu_of(n);
  // int_0^Z I^2 s ds = e^{2Z} int_0^Z (e^{-Z} I(s))^2 s ds
  auto g = [&](double s) {
    const double v = bessel_i_scaled(nu, s) * std::exp(s - Z);
    return v * v * s;
  };
  const double J = gk_integrate(g, 0.0, Z, 1e-14);
  return 0.5 * (n * std::log(lambda) - std::log(unit_sphere_area(n)) - std::log(J)) - Z;
}

double normalization_beta(double lambda, double eps, int n) {
  return std::exp(log_normalization_beta(lambda, eps, n));
}

namespace {

// psi(t) for a given lambda, with beta supplied in log form
double profile(double nu, double log_beta, double lambda, double t) {
  const double z = lambda * t;
  if (z <= 0.0) {
    // limit t -> 0 of z^{-nu} I_nu(z) = 2^{-nu} / Gamma(nu + 1)
    return std::exp(log_beta - nu * std::log(2.0) - std::lgamma(nu + 1.0));
  }
  return std::exp(log_beta + z - nu * std::log(z)) * bessel_i_scaled(nu, z);
}

double radial_integral(int n, double eps, const std::function<double(double)>& f2,
                       double rel_tol = 1e-13, unsigned depth = 12) {
  const double w = unit_sphere_area(n);
  auto g = [&](double t) { return f2(t) * std::pow(t, n - 1); };
  return w * gk_integrate(g, 0.0, eps, rel_tol, depth);
}

}  // namespace

double ground_state_profile(int n, double eps, double r, double t) {
  const double lam = ball_lambda(n, eps, r);
  return profile(nu_of(n), log_normalization_beta(lam, eps, n), lam, t);
}

double ground_state_norm2(int n, double eps, double r) {
  const double lam = ball_lambda(n, eps, r);
  const double lb = log_normalization_beta(lam, eps, n);
  const double nu = nu_of(n);
  return radial_integral(n, eps, [&](double t) {
    const double v = profile(nu, lb, lam, t);
    return v * v;
  });
}

double eigfunction_sensitivity(int n, double eps, double r, double dr) {
  require_ball(n, eps);
  if (!(r > 0.0)) throw std::invalid_argument("sensitivity needs r > 0");
  if (dr <= 0.0) dr = 1e-4 * r;
  if (!(dr < r)) throw std::invalid_argument("sensitivity step must be smaller than r");
  const double nu = nu_of(n);
  auto estimate = [&](double h) {
    const double lp = ball_lambda(n, eps, r + h), lm = ball_lambda(n, eps, r - h);
    const double bp = log_normalization_beta(lp, eps, n), bm = log_normalization_beta(lm, eps, n);
    // both profiles are positive, so no sign alignment beyond the convention is needed
    return radial_integral(n, eps, [&](double t) {
      const double d = (profile(nu, bp, lp, t) - profile(nu, bm, lm, t)) / (2.0 * h);
      return d * d;
    }, 1e-9, 6);
  };
  double prev = estimate(dr);
  for (int halving = 0; halving < 6; ++halving) {
    dr *= 0.5;
    const double cur = estimate(dr);
    if (std::abs(cur - prev) <= 0.05 * std::abs(cur)) return cur;
    prev = cur;
  }
  throw ComputationError("eigfunction_sensitivity: finite difference unstable after 6 halvings");
}

}  // namespace cusp
