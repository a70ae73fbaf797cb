#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>
#include <stdexcept>

#include "cusp/errors.hpp"
#include "cusp/oned_effective.hpp"

namespace cusp {

namespace {

namespace odeint = boost::numeric::odeint;
using State = std::array<double, 1>;

struct Potential {
  double c;         // Hardy coefficient ((np-1)^2 - 1) / 4
  double coupling;  // n / lambda
  double p;
  double operator()(double s) const { return c / (s * s) - coupling * std::pow(s, -p); }
};

Potential make_potential(const OneDParams& prm) {
  const double np = prm.n * prm.p;
  return {((np - 1.0) * (np - 1.0) - 1.0) / 4.0, prm.n / prm.lambda, prm.p};
}

// Outer turning point: largest s with V(s) = E (E < 0).
double outer_turning_point(const Potential& V, double E, double ell) {
  // V increases to 0 beyond its minimum
  double s_min = 1e-300;
  if (V.c > 0.0) s_min = std::pow(2.0 * V.c / (V.p * V.coupling), 1.0 / (2.0 - V.p));
  double lo = std::max(s_min, 1e-12 * ell), hi = std::max(2.0 * lo, ell);
  if (V(lo) - E > 0.0) return lo;  // forbidden everywhere beyond the minimum
  while (V(hi) - E <= 0.0) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw ComputationError("shooting: turning point not found");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (V(mid) - E > 0.0) hi = mid; else lo = mid;
    if (hi / lo - 1.0 < 1e-14) break;
  }
  return hi;
}

// End point S where the Agmon integral from the turning point reaches `tail`.
double agmon_end(const Potential& V, double E, double ell, double tail) {
  const double st = outer_turning_point(V, E, ell);
  auto agmon = [&](double S) {
    double err = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 21>::integrate(
        [&](double s) { return std::sqrt(std::max(0.0, V(s) - E)); }, st, S, 10, 1e-8, &err);
  };
  double step = std::max(1.0 / std::sqrt(-E), 1e-3 * st);
  double S = st + step;
  while (agmon(S) < tail) {
    step *= 2.0;
    S = st + step;
    if (!std::isfinite(S)) throw ComputationError("shooting: Agmon end point not found");
  }
  return S;
}

double target_angle(const Potential& V, double E, double S) {
  const double kappa = std::sqrt(std::max(V(S) - E, 0.0));
  return M_PI - std::atan(1.0 / kappa);
}

}  // namespace

double pruefer_angle(const OneDParams& params, double E, double S, const ShootingOptions& opts) {
  validate(params);
  const double s0 = opts.s0 * length_scale(params);
  if (!(S > s0)) throw std::invalid_argument("shooting: end point must exceed s0");
  const Potential V = make_potential(params);
  const double gamma = 0.5 * params.n * params.p;
  // principal solution f = s^gamma: tan(theta) = f / f' = s / gamma
  State th{std::atan(s0 / gamma)};
  // independent variable x = log s
  auto rhs = [&](const State& y, State& dy, double x) {
    const double s = std::exp(x);
    const double sn = std::sin(y[0]), cs = std::cos(y[0]);
    dy[0] = s * (cs * cs - (V(s) - E) * sn * sn);
  };
  auto stepper = odeint::make_controlled(opts.ode_tol, opts.ode_tol, odeint::runge_kutta_fehlberg78<State>());
  const double x0 = std::log(s0), x1 = std::log(S);
  odeint::integrate_adaptive(stepper, rhs, th, x0, x1, 1e-3);
  return th[0];
}

int shooting_zero_count(const OneDParams& params, double E, double S, const ShootingOptions& opts) {
  return static_cast<int>(std::floor(pruefer_angle(params, E, S, opts) / M_PI));
}

double shooting_oracle(const OneDParams& params, int j, const ShootingOptions& opts) {
  validate(params);
  if (j < 1) throw std::invalid_argument("shooting_oracle: j must be >= 1");
  const Potential V = make_potential(params);
  const double ell = length_scale(params);
  const double unit = 1.0 / (ell * ell);
  const double floor_E = -1e6;

  // upper end: theta(S) above the j-th target means E_j lies below
  double E_hi = -1e-3 * unit;
  double S = 0.0;
  auto F = [&](double E) { return pruefer_angle(params, E, S, opts) - target_angle(V, E, S) - (j - 1) * M_PI; };
  int guard = 0;
  while (true) {
    S = agmon_end(V, E_hi, ell, opts.tail);
    if (F(E_hi) > 0.0) break;
    E_hi *= 0.25;
    if (++guard > 40) throw ComputationError("shooting_oracle: bracket not found in [-1e6, 0)");
  }
  double E_lo = E_hi;
  while (F(E_lo) >= 0.0) {
    E_lo *= 2.0;
    if (E_lo < floor_E) throw ComputationError("shooting_oracle: bracket not found in [-1e6, 0)");
  }
  double lo = E_lo, hi = 0.5 * E_lo;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= opts.rel_tol * std::abs(mid)) break;
    if (F(mid) > 0.0) hi = mid; else lo = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace cusp
