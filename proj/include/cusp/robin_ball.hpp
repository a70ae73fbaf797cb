#pragma once

namespace cusp {

// Robin Laplacian  -Delta u = E u  on the ball of radius eps in R^n with
// outward normal derivative  d_n u = r u.

// n = 1 (interval (-eps, eps)); any real r.
double ground_state_interval(double eps, double r);

// lambda > 0 with lambda I_{nu+1}(lambda eps) = r I_nu(lambda eps), nu = n/2 - 1.
// E_1 = -lambda^2. Accepts n >= 1 (n = 1 reduces to the interval).
double ball_lambda(int n, double eps, double r);
double ground_state_ball(int n, double eps, double r);
// |lambda I_{nu+1}(lambda eps) - r I_nu(lambda eps)| / (r I_nu(lambda eps))
double ball_secular_residual(int n, double eps, double r, double lambda);

// Second eigenvalue of the unit disk, 0 < x < 1.
double second_eigenvalue_disk(double x);
// Lowest positive root k of k J_l'(k) = x J_l(k) on (0, 20].
double disk_branch_root(int l, double x);

// beta with omega_n beta^2 int_0^{eps lambda} I_nu(s)^2 s ds = lambda^n.
double normalization_beta(double lambda, double eps, int n);
// log beta; stays finite where beta underflows
double log_normalization_beta(double lambda, double eps, int n);

// psi(t) = beta (lambda t)^{-nu} I_nu(lambda t), radial profile of the
// normalized positive ground state.
double ground_state_profile(int n, double eps, double r, double t);
// int over the ball of psi^2 by radial quadrature
double ground_state_norm2(int n, double eps, double r);

// Central-difference estimate of int |d_r psi|^2 over the ball.
// dr <= 0 selects r * 1e-4.
double eigfunction_sensitivity(int n, double eps, double r, double dr = 0.0);

double unit_sphere_area(int n);  // omega_n

}  // namespace cusp
