#include "cusp/linalg_eig.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <utility>

namespace cusp {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

double max_abs(const SpMat& A) {
  double m = 0.0;
  for (int j = 0; j < A.outerSize(); ++j)
    for (SpMat::InnerIterator it(A, j); it; ++it) m = std::max(m, std::abs(it.value()));
  return m;
}

double inf_norm(const SpMat& A) {
  Eigen::VectorXd rows = Eigen::VectorXd::Zero(A.rows());
  for (int j = 0; j < A.outerSize(); ++j)
    for (SpMat::InnerIterator it(A, j); it; ++it) rows[it.row()] += std::abs(it.value());
  return A.rows() ? rows.maxCoeff() : 0.0;
}

int half_bandwidth(const SpMat& A) {
  int bw = 0;
  for (int j = 0; j < A.outerSize(); ++j)
    for (SpMat::InnerIterator it(A, j); it; ++it)
      if (it.value() != 0.0) bw = std::max(bw, std::abs(static_cast<int>(it.row()) - j));
  return bw;
}

// |Kx - E Mx| / |(|K| + |E| |M|) |x||, entrywise absolute values
double componentwise_residual(const Eigen::VectorXd& r, const Eigen::VectorXd& den) {
  const double d = den.norm();
  return d > 0.0 ? r.norm() / d : r.norm();
}

std::vector<double> abs_of(std::vector<double> v) {
  for (double& e : v) e = std::abs(e);
  return v;
}


// LDL^T of K - sigma M with a pattern analysed once.
class ShiftedFactor {
 public:
  explicit ShiftedFactor(const SymSparsePair& pair) : pair_(pair) {
    pattern_ = pair.stiffness + pair.mass;
    solver_.analyzePattern(pattern_);
  }

  bool factor(double sigma) {
    SpMat A = pair_.stiffness - sigma * pair_.mass;
    solver_.factorize(A);
    sigma_ = sigma;
    if (solver_.info() != Eigen::Success) return false;
    const auto& D = solver_.vectorD();
    for (int i = 0; i < D.size(); ++i)
      if (!std::isfinite(D[i]) || D[i] == 0.0) return false;
    return true;
  }

  long negatives() const {
    const auto& D = solver_.vectorD();
    long c = 0;
    for (int i = 0; i < D.size(); ++i) c += D[i] < 0.0;
    return c;
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& b) const { return solver_.solve(b); }
  double sigma() const { return sigma_; }

 private:
  const SymSparsePair& pair_;
  SpMat pattern_;
  Eigen::SimplicialLDLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>> solver_;
  double sigma_ = 0.0;
};

CountResult sparse_count(const SymSparsePair& pair, ShiftedFactor& f, double t) {
  if (f.factor(t)) return {f.negatives(), false};
  const double nudge = 10.0 * kEps * std::max(inf_norm(pair.stiffness), 1e-300);
  // strict inequality: an eigenvalue sitting on t must not be counted
  for (double scale : {1.0, 10.0, 100.0}) {
    if (f.factor(t - scale * nudge)) return {f.negatives(), true};
  }
  throw ShiftHitsSpectrum("count_below: factorization failed at threshold", t);
}

// ---------------------------------------------------------------- tridiagonal

struct Probe {
  double x;
  long c;
};

class Bisector {
 public:
  explicit Bisector(const TridiagPencil& t) : t_(t) {}

  long count(double x) {
    long c = sturm_count(t_, x).count;
    probes_.push_back({x, c});
    return c;
  }

  // bracket [lo, hi] with count(lo) < j <= count(hi)
  void bracket(long j, double& lo, double& hi) {
    bool have_lo = false, have_hi = false;
    for (const auto& p : probes_) {
      if (p.c < j && (!have_lo || p.x > lo)) { lo = p.x; have_lo = true; }
      if (p.c >= j && (!have_hi || p.x < hi)) { hi = p.x; have_hi = true; }
    }
    if (!have_lo) {
      double x = have_hi ? std::min(hi, 0.0) - 1.0 : -1.0;
      double step = 1.0;
      while (count(x) >= j) {
        step *= 4.0;
        x -= step;
        if (!std::isfinite(x)) throw ComputationError("tridiagonal bisection: no lower bracket");
      }
      lo = x;
    }
    if (!have_hi) {
      double x = std::max(lo, 0.0) + 1.0;
      double step = 1.0;
      while (count(x) < j) {
        step *= 4.0;
        x += step;
        if (!std::isfinite(x)) throw ComputationError("tridiagonal bisection: no upper bracket");
      }
      hi = x;
    }
  }

  double eigenvalue(long j, double rel_tol) {
    double lo = 0, hi = 0;
    bracket(j, lo, hi);
    const double floor = kEps * kEps * std::max(std::abs(lo), std::abs(hi));
    for (int it = 0; it < 4000; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (hi - lo <= rel_tol * std::max(std::abs(lo), std::abs(hi)) || hi - lo <= floor) break;
      if (count(mid) >= j) hi = mid; else lo = mid;
    }
    return 0.5 * (lo + hi);
  }

 private:
  const TridiagPencil& t_;
  std::vector<Probe> probes_;
};

// LU of T - E Mt with partial pivoting (row interchanges), as in LAPACK gttrf.
class ShiftedTridiagLU {
 public:
  ShiftedTridiagLU(const TridiagPencil& t, double E) : n_(t.size()), d_(n_), du_(n_), du2_(n_), dl_(n_), swap_(n_, 0) {
    for (int i = 0; i < n_; ++i) {
      d_[i] = t.a[i] - E * t.ma[i];
      if (i + 1 < n_) du_[i] = dl_[i] = t.b[i] - E * t.mb[i];
    }
    double scale = 0.0;
    for (int i = 0; i < n_; ++i) scale = std::max(scale, std::abs(t.a[i]) + std::abs(E * t.ma[i]));
    const double tiny = kEps * (scale > 0 ? scale : 1.0);
    for (int i = 0; i + 1 < n_; ++i) {
      if (std::abs(d_[i]) >= std::abs(dl_[i])) {
        if (d_[i] == 0.0) d_[i] = tiny;
        const double f = dl_[i] / d_[i];
        dl_[i] = f;
        d_[i + 1] -= f * du_[i];
        du2_[i] = 0.0;
      } else {
        const double f = d_[i] / dl_[i];
        d_[i] = dl_[i];
        dl_[i] = f;
        const double tmp = du_[i];
        du_[i] = d_[i + 1];
        d_[i + 1] = tmp - f * d_[i + 1];
        if (i + 2 < n_) {
          du2_[i] = du_[i + 1];
          du_[i + 1] = -f * du2_[i];
        }
        swap_[i] = 1;
      }
    }
    if (n_ > 0 && d_[n_ - 1] == 0.0) d_[n_ - 1] = tiny;
  }

  Eigen::VectorXd solve(Eigen::VectorXd b) const {
    for (int i = 0; i + 1 < n_; ++i) {
      if (swap_[i]) {
        const double tmp = b[i];
        b[i] = b[i + 1];
        b[i + 1] = tmp - dl_[i] * b[i];
      } else {
        b[i + 1] -= dl_[i] * b[i];
      }
    }
    for (int i = n_ - 1; i >= 0; --i) {
      double v = b[i];
      if (i + 1 < n_) v -= du_[i] * b[i + 1];
      if (i + 2 < n_) v -= du2_[i] * b[i + 2];
      b[i] = v / d_[i];
    }
    return b;
  }

 private:
  int n_;
  std::vector<double> d_, du_, du2_, dl_;
  std::vector<char> swap_;
};

Eigen::VectorXd tri_mul(const std::vector<double>& a, const std::vector<double>& b,
                        const Eigen::VectorXd& x) {
  const int n = static_cast<int>(a.size());
  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    double v = a[i] * x[i];
    if (i > 0) v += b[i - 1] * x[i - 1];
    if (i < n - 1) v += b[i] * x[i + 1];
    y[i] = v;
  }
  return y;
}

Spectrum tridiag_eigenpairs(const SymSparsePair& pair, int k, const EigOptions& opts) {
  const TridiagPencil t = to_tridiag(pair);
  const int n = t.size();
  Bisector bis(t);
  const TridiagPencil abs_t{abs_of(t.a), abs_of(t.b), abs_of(t.ma), abs_of(t.mb)};
  Spectrum out;
  out.count_requested = k;
  out.grid_descriptor = opts.grid_descriptor;
  for (int j = 1; j <= k; ++j) out.values.push_back(bis.eigenvalue(j, 1e-15));
  out.shift_used = out.values.front();
  if (opts.want_vectors) out.vectors.resize(n, k);

  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int j = 0; j < k; ++j) {
    const double E = out.values[j];
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x[i] = 1.0 + 0.1 * uni(rng);
    double res = std::numeric_limits<double>::infinity();
    const ShiftedTridiagLU lu(t, E);
    for (int it = 0; it < 12; ++it) {
      x = lu.solve(tri_mul(t.ma, t.mb, x));
      // keep clustered vectors apart
      for (int q = 0; q < j; ++q) {
        if (!opts.want_vectors) break;
        if (std::abs(out.values[q] - E) > 1e-8 * std::max(1.0, std::abs(E))) continue;
        const Eigen::VectorXd vq = out.vectors.col(q);
        x -= vq * vq.dot(tri_mul(t.ma, t.mb, x));
      }
      x /= std::sqrt(x.dot(tri_mul(t.ma, t.mb, x)));
      const Eigen::VectorXd ax = x.cwiseAbs();
      res = componentwise_residual(tri_mul(t.a, t.b, x) - E * tri_mul(t.ma, t.mb, x),
                                   tri_mul(abs_t.a, abs_t.b, ax) + std::abs(E) * tri_mul(abs_t.ma, abs_t.mb, ax));
      if (it >= 1 && res <= opts.tol) break;
    }
    if (opts.want_vectors) out.vectors.col(j) = x;
    out.residual_norms.push_back(res);
    if (!(res <= opts.tol)) {
      out.values.resize(j + 1);
      throw NotConverged("tridiagonal inverse iteration did not reach tolerance", out);
    }
  }
  return out;
}

// ---------------------------------------------------------------- dense

Spectrum dense_eigenpairs(const SymSparsePair& pair, int k, const EigOptions& opts) {
  Eigen::MatrixXd K(pair.stiffness), M(pair.mass);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(K, M);
  if (es.info() != Eigen::Success) throw ComputationError("dense generalized eigensolve failed");
  Spectrum out;
  out.count_requested = k;
  out.grid_descriptor = opts.grid_descriptor;
  out.shift_used = 0.0;
  for (int j = 0; j < k; ++j) {
    out.values.push_back(es.eigenvalues()[j]);
    out.residual_norms.push_back(relative_residual(pair, es.eigenvectors().col(j), es.eigenvalues()[j]));
  }
  if (opts.want_vectors) out.vectors = es.eigenvectors().leftCols(k);
  return out;
}

// ---------------------------------------------------------------- Lanczos

class KrylovSolver {
 public:
  KrylovSolver(const SymSparsePair& pair, const EigOptions& opts)
      : pair_(pair), opts_(opts), factor_(pair), rng_(opts.seed), n_(pair.dim) {}

  Spectrum run(int k) {
    choose_shift();
    long target = k;
    locked_ = Eigen::MatrixXd(n_, 0);
    for (int round = 0; round < 4; ++round) {
      iterate(target);
      sort_locked();
      const long missing = certify(k);
      if (missing == 0) return finish(k);
      target = std::min<long>(n_, static_cast<long>(values_.size()) + missing);
    }
    throw ComputationError("shift-invert Lanczos: inertia certificate failed repeatedly");
  }

 private:
  long count(double t) { return sparse_count(pair_, factor_, t).count; }

  void choose_shift() {
    if (opts_.shift) {
      const double s = *opts_.shift;
      if (!std::isfinite(s)) throw std::invalid_argument("shift must be finite");
      if (!factor_.factor(s)) throw ShiftHitsSpectrum("shift hits spectrum", s);
      if (factor_.negatives() == 0) {
        sigma_ = s;
        return;
      }
      // eigenvalues below the requested shift: move it down by inertia search
    }
    // inertia bisection for a point just below E_1
    double lo, hi;
    const double scale = std::max(1.0, opts_.shift ? std::abs(*opts_.shift) : 1.0);
    double x0 = opts_.shift ? *opts_.shift : 0.0;
    if (count(x0) == 0) {
      lo = x0;
      double step = scale;
      hi = x0 + step;
      while (count(hi) == 0) {
        lo = hi;
        step *= 4.0;
        hi = lo + step;
        if (!std::isfinite(hi)) throw ComputationError("auto shift: spectrum not found");
      }
    } else {
      hi = x0;
      double step = scale;
      lo = x0 - step;
      while (count(lo) > 0) {
        hi = lo;
        step *= 4.0;
        lo = hi - step;
        if (!std::isfinite(lo)) throw ComputationError("auto shift: no lower bound");
      }
    }
    for (int it = 0; it < 8; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (count(mid) == 0) lo = mid; else hi = mid;
    }
    sigma_ = lo - 0.25 * (hi - lo);
    if (!factor_.factor(sigma_)) {
      sigma_ = lo - 0.5 * (hi - lo);
      if (!factor_.factor(sigma_)) throw ShiftHitsSpectrum("auto shift hits spectrum", sigma_);
    }
  }

  Eigen::VectorXd apply(const Eigen::VectorXd& v) {
    ++applications_;
    return factor_.solve(pair_.mass * v);
  }

  double mnorm(const Eigen::VectorXd& v) const {
    const double q = v.dot(pair_.mass * v);
    if (!(q > 0.0)) throw std::invalid_argument("mass matrix is not positive definite");
    return std::sqrt(q);
  }

  // classical Gram-Schmidt, two passes, in the M inner product
  void orthogonalize(Eigen::VectorXd& r, const Eigen::MatrixXd& V, const Eigen::MatrixXd& W, int cols) {
    for (int pass = 0; pass < 2; ++pass) {
      if (locked_.cols() > 0) r -= locked_ * (locked_M_.transpose() * r);
      if (cols > 0) r -= V.leftCols(cols) * (W.leftCols(cols).transpose() * r);
    }
  }

  Eigen::VectorXd random_vector() {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    Eigen::VectorXd v(n_);
    for (int i = 0; i < n_; ++i) v[i] = uni(rng_);
    return v;
  }

  void lock(const Eigen::VectorXd& x0, double E, double res) {
    Eigen::VectorXd x = x0;
    if (locked_.cols() > 0) x -= locked_ * (locked_M_.transpose() * x);
    x /= mnorm(x);
    const long c = locked_.cols();
    locked_.conservativeResize(n_, c + 1);
    locked_M_.conservativeResize(n_, c + 1);
    locked_.col(c) = x;
    locked_M_.col(c) = pair_.mass * x;
    values_.push_back(E);
    residuals_.push_back(res);
  }

  void iterate(long target) {
    const long free_dim = n_ - locked_.cols();
    if (free_dim <= 0) return;
    int m = opts_.subspace > 0 ? opts_.subspace : static_cast<int>(std::max<long>(2 * target + 10, 24));
    m = static_cast<int>(std::min<long>(m, free_dim));
    Eigen::MatrixXd V(n_, m), W(n_, m), Y(n_, m);
    int c = 0, cy = 0;
    {
      Eigen::VectorXd v = random_vector();
      orthogonalize(v, V, W, 0);
      v /= mnorm(v);
      V.col(0) = v;
      W.col(0) = pair_.mass * v;
      c = 1;
    }
    long since_lock = 0;
    const long budget = static_cast<long>(opts_.max_iter);
    while (static_cast<long>(locked_.cols()) < target) {
      const int m_eff = static_cast<int>(std::min<long>(m, n_ - locked_.cols()));
      if (m_eff <= 0) break;
      while (true) {
        if (cy < c) {
          Y.col(cy) = apply(V.col(cy));
          ++cy;
          ++since_lock;
          continue;
        }
        if (c >= m_eff) break;
        Eigen::VectorXd r = Y.col(c - 1);
        const double ynorm = mnorm(r);
        orthogonalize(r, V, W, c);
        double beta = std::sqrt(std::max(0.0, r.dot(pair_.mass * r)));
        if (!(beta > 1e-10 * ynorm)) {
          r = random_vector();
          orthogonalize(r, V, W, c);
          beta = mnorm(r);
        }
        V.col(c) = r / beta;
        W.col(c) = pair_.mass * V.col(c);
        ++c;
      }

      Eigen::MatrixXd H = W.leftCols(c).transpose() * Y.leftCols(c);
      H = 0.5 * (H + H.transpose()).eval();
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
      const Eigen::VectorXd theta = es.eigenvalues();
      const Eigen::MatrixXd S = es.eigenvectors();
      // descending theta = ascending E above the shift
      std::vector<int> order(c);
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](int a, int b) { return theta[a] > theta[b]; });

      int nlocked_now = 0;
      for (int idx : order) {
        if (static_cast<long>(locked_.cols()) >= target) break;
        if (!(theta[idx] > 0.0)) break;
        const Eigen::VectorXd x = V.leftCols(c) * S.col(idx);
        const double E = sigma_ + 1.0 / theta[idx];
        const double res = relative_residual(pair_, x, E);
        if (res <= opts_.tol) {
          lock(x, E, res);
          ++nlocked_now;
          since_lock = 0;
        } else {
          break;
        }
      }
      if (static_cast<long>(locked_.cols()) >= target) break;
      if (since_lock > budget) {
        sort_locked();
        Spectrum partial;
        partial.values = values_;
        partial.residual_norms = residuals_;
        partial.count_requested = static_cast<int>(target);
        partial.shift_used = sigma_;
        partial.grid_descriptor = opts_.grid_descriptor;
        throw NotConverged("shift-invert Lanczos: iteration budget exhausted", partial);
      }

      // thick restart: keep the best unconverged Ritz vectors plus the
      // next Krylov direction
      const int remaining_cap = static_cast<int>(std::min<long>(m, n_ - locked_.cols()));
      int keep = static_cast<int>(std::min<long>(target - locked_.cols() + 6, remaining_cap - 1));
      keep = std::max(0, std::min(keep, c - nlocked_now));
      Eigen::VectorXd next = Y.col(c - 1);
      const double ynorm = mnorm(next);
      orthogonalize(next, V, W, c);
      Eigen::MatrixXd Sk(c, keep);
      for (int q = 0; q < keep; ++q) Sk.col(q) = S.col(order[nlocked_now + q]);
      Eigen::MatrixXd Vn = V.leftCols(c) * Sk;
      Eigen::MatrixXd Yn = Y.leftCols(c) * Sk;
      // Ritz vectors are M-orthogonal to the locked ones up to roundoff
      for (int q = 0; q < keep; ++q) {
        Eigen::VectorXd v = Vn.col(q);
        const double before = mnorm(v);
        if (locked_.cols() > 0) v -= locked_ * (locked_M_.transpose() * v);
        Vn.col(q) = v / before;
        Yn.col(q) /= before;
      }
      c = keep;
      cy = keep;
      V.leftCols(keep) = Vn;
      Y.leftCols(keep) = Yn;
      for (int q = 0; q < keep; ++q) W.col(q) = pair_.mass * V.col(q);
      if (keep >= remaining_cap) continue;
      orthogonalize(next, V, W, c);
      double beta = std::sqrt(std::max(0.0, next.dot(pair_.mass * next)));
      if (!(beta > 1e-10 * ynorm)) {
        next = random_vector();
        orthogonalize(next, V, W, c);
        beta = mnorm(next);
      }
      V.col(c) = next / beta;
      W.col(c) = pair_.mass * V.col(c);
      ++c;
    }
  }

  void sort_locked() {
    std::vector<int> idx(values_.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return values_[a] < values_[b]; });
    std::vector<double> v, r;
    Eigen::MatrixXd X(n_, idx.size()), XM(n_, idx.size());
    for (size_t q = 0; q < idx.size(); ++q) {
      v.push_back(values_[idx[q]]);
      r.push_back(residuals_[idx[q]]);
      X.col(q) = locked_.col(idx[q]);
      XM.col(q) = locked_M_.col(idx[q]);
    }
    values_ = v;
    residuals_ = r;
    locked_ = X;
    locked_M_ = XM;
  }

  // Number of eigenvalues below the k-th computed one that were not found.
  long certify(int k) {
    if (static_cast<int>(values_.size()) < k) return k - static_cast<long>(values_.size());
    const double Ek = values_[k - 1];
    const double eta = 1e-7 * std::max(std::abs(Ek), std::abs(Ek - sigma_));
    if (count(sigma_) != 0) throw ComputationError("inertia certificate: eigenvalues below the shift");
    long below = 0;
    for (int j = 0; j < k; ++j) below += values_[j] < Ek - eta;
    const long c = count(Ek - eta);
    return c > below ? c - below : 0;
  }

  Spectrum finish(int k) {
    Spectrum out;
    out.count_requested = k;
    out.grid_descriptor = opts_.grid_descriptor;
    out.shift_used = sigma_;
    out.values.assign(values_.begin(), values_.begin() + k);
    out.residual_norms.assign(residuals_.begin(), residuals_.begin() + k);
    if (opts_.want_vectors) out.vectors = locked_.leftCols(k);
    return out;
  }

  const SymSparsePair& pair_;
  EigOptions opts_;
  ShiftedFactor factor_;
  std::mt19937_64 rng_;
  long n_;
  double sigma_ = 0.0;
  long applications_ = 0;
  Eigen::MatrixXd locked_, locked_M_;
  std::vector<double> values_, residuals_;
};

}  // namespace

SymSparsePair make_pair(SpMat stiffness, SpMat mass, int bandwidth_hint) {
  if (stiffness.rows() != stiffness.cols() || mass.rows() != mass.cols() ||
      stiffness.rows() != mass.rows())
    throw std::invalid_argument("stiffness and mass must be square and of equal size");
  if (stiffness.rows() < 1) throw std::invalid_argument("pair dimension must be at least 1");
  stiffness.makeCompressed();
  mass.makeCompressed();
  SymSparsePair p;
  p.dim = static_cast<int>(stiffness.rows());
  p.stiffness = std::move(stiffness);
  p.mass = std::move(mass);
  p.bandwidth_hint = bandwidth_hint;
  for (const SpMat* A : {&p.stiffness, &p.mass}) {
    const double tol = 1e-13 * std::max(max_abs(*A), 1e-300);
    SpMat d = SpMat(A->transpose()) - *A;
    if (max_abs(d) > tol) throw std::invalid_argument("pair matrices must be symmetric");
  }
  for (int i = 0; i < p.dim; ++i)
    if (!(p.mass.coeff(i, i) > 0.0)) throw std::invalid_argument("mass matrix must have a positive diagonal");
  return p;
}

void validate_pair(const SymSparsePair& pair) {
  if (pair.dim < 1 || pair.stiffness.rows() != pair.dim || pair.mass.rows() != pair.dim ||
      pair.stiffness.cols() != pair.dim || pair.mass.cols() != pair.dim)
    throw std::invalid_argument("pair dimension mismatch");
  for (const SpMat* A : {&pair.stiffness, &pair.mass}) {
    const double tol = 1e-13 * std::max(max_abs(*A), 1e-300);
    SpMat d = SpMat(A->transpose()) - *A;
    if (max_abs(d) > tol) throw std::invalid_argument("pair matrices must be symmetric");
  }
  Eigen::SimplicialLLT<SpMat> llt(pair.mass);
  if (llt.info() != Eigen::Success) throw std::invalid_argument("mass matrix is not positive definite");
}

bool is_tridiagonal(const SymSparsePair& pair) {
  if (pair.bandwidth_hint == 1) return true;
  if (pair.bandwidth_hint > 1) return false;
  return half_bandwidth(pair.stiffness) <= 1 && half_bandwidth(pair.mass) <= 1;
}

TridiagPencil to_tridiag(const SymSparsePair& pair) {
  const int n = pair.dim;
  TridiagPencil t;
  t.a.assign(n, 0.0);
  t.ma.assign(n, 0.0);
  t.b.assign(n > 1 ? n - 1 : 0, 0.0);
  t.mb.assign(n > 1 ? n - 1 : 0, 0.0);
  auto fill = [&](const SpMat& A, std::vector<double>& d, std::vector<double>& o) {
    for (int j = 0; j < A.outerSize(); ++j)
      for (SpMat::InnerIterator it(A, j); it; ++it) {
        const int i = static_cast<int>(it.row());
        if (i == j) d[i] = it.value();
        else if (i == j + 1) o[j] = it.value();
        else if (i + 1 != j && it.value() != 0.0)
          throw std::invalid_argument("pair is not tridiagonal");
      }
  };
  fill(pair.stiffness, t.a, t.b);
  fill(pair.mass, t.ma, t.mb);
  return t;
}

CountResult sturm_count(const TridiagPencil& t, double threshold) {
  auto pass = [&](double x, bool& hit) {
    long c = 0;
    double d = t.a[0] - x * t.ma[0];
    hit = d == 0.0;
    c += d < 0.0;
    const int n = t.size();
    for (int i = 1; i < n && !hit; ++i) {
      const double o = t.b[i - 1] - x * t.mb[i - 1];
      d = (t.a[i] - x * t.ma[i]) - o * o / d;
      if (d == 0.0 || !std::isfinite(d)) hit = true;
      c += d < 0.0;
    }
    return c;
  };
  bool hit = false;
  long c = pass(threshold, hit);
  if (!std::isfinite(threshold)) throw std::invalid_argument("count threshold must be finite");
  if (!hit) return {c, false};
  double knorm = 0.0;
  for (int i = 0; i < t.size(); ++i) {
    double row = std::abs(t.a[i]);
    if (i > 0) row += std::abs(t.b[i - 1]);
    if (i + 1 < t.size()) row += std::abs(t.b[i]);
    knorm = std::max(knorm, row);
  }
  const double nudge = 10.0 * kEps * std::max(knorm, 1e-300);
  for (double scale : {1.0, 10.0, 100.0}) {
    c = pass(threshold - scale * nudge, hit);
    if (!hit) return {c, true};
  }
  throw ShiftHitsSpectrum("sturm count: zero pivot persists after nudging", threshold);
}

std::vector<double> tridiag_eigenvalues(const TridiagPencil& t, int k, double rel_tol) {
  if (k < 1 || k > t.size()) throw std::invalid_argument("tridiag_eigenvalues: 1 <= k <= dim required");
  Bisector bis(t);
  std::vector<double> v;
  for (int j = 1; j <= k; ++j) v.push_back(bis.eigenvalue(j, rel_tol));
  return v;
}

CountResult count_below(const SymSparsePair& pair, double threshold) {
  if (!std::isfinite(threshold)) throw std::invalid_argument("count threshold must be finite");
  if (is_tridiagonal(pair)) return sturm_count(to_tridiag(pair), threshold);
  ShiftedFactor f(pair);
  return sparse_count(pair, f, threshold);
}

double relative_residual(const SymSparsePair& pair, const Eigen::VectorXd& x, double E) {
  const Eigen::VectorXd ax = x.cwiseAbs();
  return componentwise_residual(pair.stiffness * x - E * (pair.mass * x),
                                pair.stiffness.cwiseAbs() * ax + std::abs(E) * (pair.mass.cwiseAbs() * ax));
}

Spectrum smallest_eigenpairs(const SymSparsePair& pair, int k, const EigOptions& opts) {
  if (k < 1) throw std::invalid_argument("smallest_eigenpairs: k must be >= 1");
  if (k > pair.dim) throw std::invalid_argument("smallest_eigenpairs: k exceeds dimension");
  if (!(opts.tol > 0.0)) throw std::invalid_argument("smallest_eigenpairs: tol must be > 0");
  if (pair.dim <= 16) return dense_eigenpairs(pair, k, opts);
  if (is_tridiagonal(pair)) return tridiag_eigenpairs(pair, k, opts);
  KrylovSolver solver(pair, opts);
  return solver.run(k);
}

Spectrum smallest_eigenpairs(const SymSparsePair& pair, int k, std::optional<double> shift, double tol) {
  EigOptions o;
  o.shift = shift;
  o.tol = tol;
  return smallest_eigenpairs(pair, k, o);
}

}  // namespace cusp
