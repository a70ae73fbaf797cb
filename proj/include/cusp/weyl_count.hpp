#pragma once

namespace cusp {

struct WeylConstants {
  double p = 0.0;
  int n = 1;
  double I_p = 0.0;  // phase integral
  double J_p = 0.0;  // n^{1/p} I_p / (2 pi)
  double quadrature_error_bound = 0.0;
};

struct PhaseIntegral {
  double value = 0.0;
  double error_bound = 0.0;
};

// int_0^1 sqrt((1 - s^p) / s^p) ds for 1 <= p < 2.
double phase_integral(double p);
PhaseIntegral phase_integral_with_error(double p);
// (1/p) B(1/p - 1/2, 3/2)
double phase_integral_closed_form(double p);

WeylConstants weyl_J(double p, int n);

// M_p = B^{(p-2)/(2p)} (n/m)^{1/p} I_p / (2 pi)
double threshold_count_coeff(double p, int n, double m, double B);

// J_p eps^{-(2-p)/(2p)}
double predicted_count(double p, int n, double eps);

}  // namespace cusp
