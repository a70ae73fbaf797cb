#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cusp/errors.hpp"

namespace cusp {

using SpMat = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

// Discrete generalized eigenproblem  K v = E M v  with K symmetric and M
// symmetric positive definite.
struct SymSparsePair {
  SpMat stiffness;
  SpMat mass;
  int dim = 0;
  int bandwidth_hint = -1;  // -1: unknown
};

// Builds a pair and checks shape and symmetry. Throws std::invalid_argument.
SymSparsePair make_pair(SpMat stiffness, SpMat mass, int bandwidth_hint = -1);

// Full structural check: symmetry of both matrices to roundoff and
// positive definiteness of the mass matrix (via Cholesky).
void validate_pair(const SymSparsePair& pair);

struct Spectrum {
  std::vector<double> values;          // ascending
  std::vector<double> residual_norms;  // relative residuals
  int count_requested = 0;
  std::string grid_descriptor;
  double shift_used = 0.0;
  Eigen::MatrixXd vectors;  // dim x values.size(), M-orthonormal; may be empty
};

class NotConverged : public ComputationError {
 public:
  NotConverged(const std::string& what, Spectrum partial)
      : ComputationError(what), partial(std::move(partial)) {}
  Spectrum partial;
};

struct CountResult {
  long count = 0;
  bool ambiguous = false;  // threshold sat on a zero pivot and was nudged
};

struct EigOptions {
  double tol = 1e-10;
  int max_iter = 500;                 // operator applications per eigenvalue
  std::optional<double> shift;        // empty: automatic
  std::uint64_t seed = 0x5eed5eedULL;
  bool want_vectors = true;
  int subspace = 0;                   // Krylov basis size, 0 = automatic
  std::string grid_descriptor;
};

// k smallest eigenpairs, ascending. Tridiagonal pencils go through Sturm
// bisection plus inverse iteration, other pencils through shift-invert
// Lanczos with full reorthogonalization and thick restart.
Spectrum smallest_eigenpairs(const SymSparsePair& pair, int k,
                             const EigOptions& opts = {});
Spectrum smallest_eigenpairs(const SymSparsePair& pair, int k,
                             std::optional<double> shift, double tol);

// Number of eigenvalues strictly below threshold (inertia of K - t M).
CountResult count_below(const SymSparsePair& pair, double threshold);

bool is_tridiagonal(const SymSparsePair& pair);

// Relative residual |Kx - E Mx| / |(|K| + |E| |M|) |x||, entrywise absolute values.
double relative_residual(const SymSparsePair& pair, const Eigen::VectorXd& x,
                         double E);

// Tridiagonal pencil in band form; off-diagonals have size n-1.
struct TridiagPencil {
  std::vector<double> a, b;    // stiffness diagonal / off-diagonal
  std::vector<double> ma, mb;  // mass diagonal / off-diagonal
  int size() const { return static_cast<int>(a.size()); }
};

TridiagPencil to_tridiag(const SymSparsePair& pair);
CountResult sturm_count(const TridiagPencil& t, double threshold);
// k smallest eigenvalues by bisection (no vectors).
std::vector<double> tridiag_eigenvalues(const TridiagPencil& t, int k,
                                        double rel_tol = 1e-15);

}  // namespace cusp
