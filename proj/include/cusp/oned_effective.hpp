#pragma once

#include <string>
#include <vector>

#include "cusp/linalg_eig.hpp"

namespace cusp {

// Comparison operator  -f'' + [((np-1)^2 - 1) / (4 s^2) - n / (lambda s^p)] f
// on (0, infinity).
struct OneDParams {
  double p = 1.5;
  int n = 1;
  double lambda = 1.0;
};

void validate(const OneDParams& params);

// Natural length and energy scales: ell = (lambda/n)^{1/(2-p)}, E ~ ell^{-2}.
double length_scale(const OneDParams& params);

enum class Grading { geometric, uniform, graded, adapted };
std::string to_string(Grading g);

struct Grid1D {
  std::vector<double> nodes;
  double delta = 0.0;
  double L = 0.0;
  Grading grading = Grading::geometric;
  double ratio = 1.0;  // geometric ratio (1 for uniform)

  int size() const { return static_cast<int>(nodes.size()); }
  std::string descriptor() const;

  // nodes delta * rho^i with rho adjusted so the last node is exactly L
  static Grid1D geometric(double delta, double L, double ratio);
  static Grid1D geometric_count(double delta, double L, int elements);
  static Grid1D uniform(double delta, double L, int elements);
  // geometric growth capped at element size h_max
  static Grid1D graded(double delta, double L, double ratio, double h_max);
  // h(s) = min((ratio - 1) s, c sqrt(lambda/n) s^{p/2}, h_max): resolves
  // the local wavelength of zero-energy oscillations
  static Grid1D adapted(double delta, double L, double ratio, double c, const OneDParams& params,
                        double h_max = 0.0);

  // every element split in two (geometric mean where the grading is geometric)
  Grid1D refined() const;
  // all nodes multiplied by sigma
  Grid1D scaled(double sigma) const;
};

enum class RightBC { Dirichlet, Neumann };

// Treatment of (0, delta). `natural`: the form lives on (delta, L) with no
// condition at delta. `constant`: the first nodal value is continued as a
// constant down to 0, so the discrete space stays inside the form domain on
// (0, L) and the cutoff error drops from O(delta^{np-p+1}) to higher order.
enum class TipModel { natural, constant };

// P1 pencil of  int g'^2 s^{np} - (n/lambda) int g^2 s^{np-p},  mass
// int g^2 s^{np}.
TridiagPencil assemble_effective_tridiag(const OneDParams& params, const Grid1D& grid, RightBC bc,
                                         TipModel tip = TipModel::constant);
SymSparsePair assemble_effective_1d(const OneDParams& params, const Grid1D& grid, RightBC bc,
                                    TipModel tip = TipModel::constant);

// int_0^1 xi^k (1 + t xi)^r d xi, k in {0, 1, 2}
double element_moment(int k, double r, double t);

// k lowest eigenvalues of the pencil on one grid.
Spectrum eigenvalues_on_grid(const OneDParams& params, const Grid1D& grid, RightBC bc, int k,
                             bool want_vectors = false, TipModel tip = TipModel::constant);

struct LadderOptions {
  double rho0 = 1.02;
  double L0_factor = 40.0;       // L0 = factor * ell
  double delta0_factor = 1e-9;   // delta0 = factor * L0
  int max_levels = 10;
  long max_nodes = 4000000;
  bool richardson = true;
};

// E_1 ... E_k of A_lambda by a refinement ladder (delta halved, L doubled,
// node count doubled per level) until successive values agree to
// `accuracy` relatively. Dirichlet at L.
Spectrum eigenvalues_A1(const OneDParams& params, int k, double accuracy, const LadderOptions& opts = {});

struct ShootingOptions {
  double s0 = 1e-6;      // start point in units of the length scale
  double tail = 30.0;     // Agmon integral beyond the outer turning point
  double ode_tol = 1e-12;
  double rel_tol = 1e-13;  // bisection width
};

// E_j(A_lambda) by Pruefer-phase shooting from the principal solution.
double shooting_oracle(const OneDParams& params, int j, const ShootingOptions& opts = {});
// Pruefer angle theta(S) at energy E for a fixed end point S.
double pruefer_angle(const OneDParams& params, double E, double S, const ShootingOptions& opts = {});
// number of interior zeros of the principal solution on (s0, S) at energy E
int shooting_zero_count(const OneDParams& params, double E, double S, const ShootingOptions& opts = {});

struct CountingOptions {
  double nodes_per_wavelength = 40.0;
  double rho = 1.01;
  double L_factor = 4.0;      // L = factor * (n / (lambda eps))^{1/p}
  double delta_factor = 1e-4; // delta = factor * ell
  int max_refinements = 3;
};

struct CountingReport {
  long count = 0;
  long count_refined = 0;   // node count doubled
  long count_extended = 0;  // L * 1.5
  int refinements = 0;
  int nodes = 0;
  std::string grid_descriptor;
  bool ambiguous = false;
};

// N(A_lambda, -eps_threshold) with a grid-doubling and L-extension certificate.
long counting_function(const OneDParams& params, double eps_threshold, const CountingOptions& opts = {});
CountingReport counting_function_report(const OneDParams& params, double eps_threshold,
                                        const CountingOptions& opts = {});

}  // namespace cusp
