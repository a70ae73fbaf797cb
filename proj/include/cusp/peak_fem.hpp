#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

#include "cusp/linalg_eig.hpp"

namespace cusp {

// Model peak |x'| < eps x1^p, 0 < x1 < a, in dimension two, Robin parameter 1.
// Discretized on the rectangle (delta_s, a) x (-1, 1) in (s, tau), with
// x1 = s and x' = eps tau s^p.
enum class CapBC { Dirichlet, Neumann };

struct PeakModelParams {
  double p = 1.5;
  double eps = 0.05;
  double a = 1.0;
  CapBC bc_at_a = CapBC::Dirichlet;
  double delta_s = 0.0;  // 0: automatic, tip_factor * eps^{1/(2-p)}
};

void validate(const PeakModelParams& params);

// Length scale eps^{1/(2-p)} of the low eigenfunctions.
double peak_length_scale(double p, double eps);

// Metric of the map (s, t) -> (s, t s^p) and the matrix whose inverse it is.
Eigen::Matrix2d metric_G(double s, double t, double p);
Eigen::Matrix2d metric_G_hat(double s, double t, double p);

struct RectGrid {
  std::vector<double> s_nodes;
  std::vector<double> tau_nodes;
  // columns with s < collapse_s carry one tau-constant value
  double collapse_s = 0.0;
  // continue the first column as a constant down to s = 0 (needs it collapsed)
  bool tip_extension = false;

  int ns() const { return static_cast<int>(s_nodes.size()); }
  int nt() const { return static_cast<int>(tau_nodes.size()); }
  std::string descriptor() const;
  // s elements halved at their geometric means; tau unchanged
  RectGrid refined_s() const;
  // prefix of the s grid ending at the node equal to `a`
  RectGrid truncated(double a) const;
};

struct PeakGridOptions {
  double ratio = 1.01;          // s-element ratio in the focus zone
  double far_ratio = 1.08;      // outside the focus zone
  double focus_lo = 1e-3;       // focus zone [lo, hi] in units of the length scale
  double focus_hi = 2e3;
  int tau_elements = 24;
  // tip treatment: `collapse` columns below collapse_factor * scale are
  // tau-constant and continued to 0; otherwise a natural condition at delta_s
  bool collapse = true;
  double collapse_factor = 1e-2;
};

// Piecewise geometric s grid on [delta_s, max(knots)] with every knot a node,
// uniform tau grid.
RectGrid make_rect_grid(double delta_s, std::vector<double> knots, double scale, const PeakGridOptions& opts = {});

// Q1 pencil of the transformed Robin form. `robin` scales the lateral
// boundary term (1 for the operator, 0 for the Neumann Laplacian).
SymSparsePair assemble_peak_rect(const PeakModelParams& params, const RectGrid& grid, double robin = 1.0);

// Nodal values (ns x nt) of a coefficient vector of assemble_peak_rect.
// Unknowns per full column are the middle-node value and successive
// differences; collapsed columns hold one value; a Dirichlet column is zero.
Eigen::MatrixXd peak_nodal_values(const PeakModelParams& params, const RectGrid& grid, const Eigen::VectorXd& x);

struct PeakSolveOptions {
  PeakGridOptions grid;
  double tip_factor = 1e-9;       // delta_s = tip_factor * length scale when automatic
  double tip_tolerance = 1e-6;    // relative change allowed under delta_s halving
  int tip_retries = 3;
  bool richardson = true;
  double tol = 1e-10;
  long max_unknowns = 3000000;
  int krylov_subspace = 0;        // Lanczos basis size, 0 = automatic (max(24, 16k))
  double ell_cap = 0.0;           // > 0: truncate the Q domain at this s (Neumann), with a sensitivity note
};

// k lowest eigenvalues of T_{eps,a} (Dirichlet at a) or its Neumann-capped
// analogue, with the tip-halving certificate.
Spectrum spectrum_T(const PeakModelParams& params, int k, const PeakSolveOptions& opts = {});

// Q_{eps,b} on (0, ell), ell = b eps^{1/(1-p)}; Neumann cap, or Dirichlet cap
// (the tilde operator).
Spectrum spectrum_Q(double p, double eps, double b, int k, const PeakSolveOptions& opts = {},
                    CapBC cap = CapBC::Neumann);

// E_j(Q_{eps,b}) and E_j(T_{eps,a}) for all a in `caps` on one nested grid, for
// bracketing checks. Result rows: Q (Neumann), Q tilde (Dirichlet), then each T.
struct BracketResult {
  std::vector<double> caps;
  std::vector<std::vector<double>> rows;
  std::string grid_descriptor;
};
BracketResult bracket_spectra(double p, double eps, double b, const std::vector<double>& caps, int k,
                              const PeakSolveOptions& opts = {});

// Number of eigenvalues of Q_{eps,b} strictly below `threshold` by inertia, on
// the grid of spectrum_Q with the focus zone stretched past the classical
// turning point of the threshold.
CountResult count_Q_below(double p, double eps, double b, double threshold, const PeakSolveOptions& opts = {});

// alpha^2 E_j(Q_{eps,b}) with eps = m alpha^{1-p}, b = m^{1/(p-1)} delta.
Spectrum physical_alpha_spectrum(double alpha, double m, double p, double delta, int k,
                                 const PeakSolveOptions& opts = {});

}  // namespace cusp
