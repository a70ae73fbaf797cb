#pragma once

namespace cusp {

// Modified Bessel I_nu for nu >= -1/2, z > 0: ascending series up to the
// crossover argument, Boost.Math beyond it, with an agreement check of
// both branches at the crossover.
inline constexpr double kBesselCrossover = 12.0;

double bessel_i_series(double nu, double z);
double bessel_i(double nu, double z);
double bessel_i_scaled(double nu, double z);  // e^{-z} I_nu(z)
double bessel_i_ratio(double nu, double z);   // I_{nu+1}(z) / I_nu(z)

double bessel_j(int l, double x);
double bessel_j_prime(int l, double x);

}  // namespace cusp
