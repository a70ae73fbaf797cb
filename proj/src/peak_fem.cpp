#include "cusp/peak_fem.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "cusp/errors.hpp"
#include "cusp/oned_effective.hpp"

namespace cusp {

namespace {

std::string g6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void check_p(double p) {
  if (!(p > 1.0 && p < 2.0)) throw std::invalid_argument("p must lie in (1,2) (power-law peak range)");
}

// 2-point Gauss on [0, 1]
constexpr double kG0 = 0.21132486540518711775;
constexpr double kG1 = 0.78867513459481288225;

double effective_delta(const PeakModelParams& prm, const PeakSolveOptions& o) {
  return prm.delta_s > 0.0 ? prm.delta_s : o.tip_factor * peak_length_scale(prm.p, prm.eps);
}

struct Level {
  std::vector<double> values;
  std::vector<double> residuals;
  double shift = 0.0;
  std::string grid;
};

// Shift below E_1 from the one-dimensional comparison operator A_eps.
double shift_guess(double p, double eps) {
  const OneDParams P{p, 1, eps};
  const double ell = length_scale(P);
  const Grid1D g = Grid1D::graded(1e-9 * ell, 60.0 * ell, 1.05, 0.2 * ell);
  const double e1 = eigenvalues_on_grid(P, g, RightBC::Dirichlet, 1).values[0];
  return 1.25 * e1;
}

Level solve_level(const PeakModelParams& prm, const RectGrid& grid, int k, double shift, const PeakSolveOptions& o) {
  const long unknowns = static_cast<long>(grid.ns() - (prm.bc_at_a == CapBC::Dirichlet ? 1 : 0)) * grid.nt();
  if (unknowns > o.max_unknowns)
    throw BudgetExceeded("peak FEM: " + std::to_string(unknowns) +
                         " unknowns exceed the budget; use a larger eps or a smaller b");
  const SymSparsePair pair = assemble_peak_rect(prm, grid);
  EigOptions eo;
  eo.tol = o.tol;
  eo.want_vectors = false;
  eo.shift = shift;
  // eigenvalues above E_1 crowd toward the accumulation at 0 in shift-invert space
  eo.subspace = o.krylov_subspace > 0 ? o.krylov_subspace : std::max(24, 16 * k);
  eo.grid_descriptor = grid.descriptor();
  const Spectrum s = smallest_eigenpairs(pair, k, eo);
  return {s.values, s.residual_norms, s.shift_used, s.grid_descriptor};
}

// Richardson pair (grid, grid refined in s).
Level solve_extrapolated(const PeakModelParams& prm, const RectGrid& grid, int k, double shift,
                         const PeakSolveOptions& o, Level* coarse_out = nullptr) {
  const Level c = solve_level(prm, grid, k, shift, o);
  if (coarse_out) *coarse_out = c;
  if (!o.richardson) return c;
  Level f = solve_level(prm, grid.refined_s(), k, shift, o);
  for (int j = 0; j < k; ++j) f.values[j] = (4.0 * f.values[j] - c.values[j]) / 3.0;
  f.grid += ",richardson";
  return f;
}

double max_rel_change(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]) / std::abs(b[j]));
  return m;
}

Spectrum to_spectrum(const Level& l, int k) {
  Spectrum s;
  s.values = l.values;
  s.residual_norms = l.residuals;
  s.count_requested = k;
  s.grid_descriptor = l.grid;
  s.shift_used = l.shift;
  return s;
}

// Solve on (delta, cap) with the tip-halving certificate; `knots` are forced nodes.
Spectrum certified_solve(PeakModelParams prm, const std::vector<double>& knots, int k, const PeakSolveOptions& o) {
  const double scale = peak_length_scale(prm.p, prm.eps);
  const double shift = shift_guess(prm.p, prm.eps);
  double delta = effective_delta(prm, o);
  std::vector<std::vector<double>> last;
  for (int attempt = 0; attempt <= o.tip_retries; ++attempt) {
    if (!(delta < prm.a)) throw std::invalid_argument("peak FEM: delta_s must be below a");
    const RectGrid g = make_rect_grid(delta, knots, scale, o.grid).truncated(prm.a);
    const RectGrid gh = make_rect_grid(0.5 * delta, knots, scale, o.grid).truncated(prm.a);
    Level coarse;
    const Level best = solve_extrapolated(prm, g, k, shift, o, &coarse);
    const Level half = solve_level(prm, gh, k, shift, o);
    const double change = max_rel_change(half.values, coarse.values);
    if (change <= o.tip_tolerance) {
      Spectrum s = to_spectrum(best, k);
      s.grid_descriptor += ",tip_change=" + g6(change);
      return s;
    }
    last = {coarse.values, half.values};
    delta *= 1e-2;
  }
  throw CertificateFailure("peak FEM: eigenvalues not stable under tip halving", last);
}

}  // namespace

void validate(const PeakModelParams& prm) {
  check_p(prm.p);
  if (!(prm.eps > 0.0) || !std::isfinite(prm.eps)) throw std::invalid_argument("eps must be > 0");
  if (!(prm.a > 0.0) || !std::isfinite(prm.a)) throw std::invalid_argument("a must be > 0");
  if (prm.delta_s < 0.0 || !(prm.delta_s < prm.a)) throw std::invalid_argument("delta_s must lie in [0, a)");
  if (!(prm.eps * std::pow(prm.a, prm.p - 1.0) < 0.5))
    throw std::invalid_argument("eps a^{p-1} must be < 0.5");
}

double peak_length_scale(double p, double eps) {
  check_p(p);
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be > 0");
  return std::pow(eps, 1.0 / (2.0 - p));
}

Eigen::Matrix2d metric_G(double s, double t, double p) {
  if (!(s > 0.0)) throw std::invalid_argument("metric_G: s must be > 0");
  Eigen::Matrix2d G;
  const double c = -p * t / s;
  G << 1.0, c, c, std::pow(s, -2.0 * p) + c * c;
  return G;
}

Eigen::Matrix2d metric_G_hat(double s, double t, double p) {
  if (!(s > 0.0)) throw std::invalid_argument("metric_G_hat: s must be > 0");
  Eigen::Matrix2d H;
  const double s2p = std::pow(s, 2.0 * p);
  const double off = p * std::pow(s, 2.0 * p - 1.0) * t;
  H << 1.0 + p * p * t * t * std::pow(s, 2.0 * p - 2.0), off, off, s2p;
  return H;
}

std::string RectGrid::descriptor() const {
  return "rect(delta_s=" + g6(s_nodes.front()) + ",a=" + g6(s_nodes.back()) + ",ns=" + std::to_string(ns()) +
         ",ntau=" + std::to_string(nt()) + (collapse_s > 0.0 ? ",collapse_s=" + g6(collapse_s) : "") +
         (tip_extension ? ",tip=constant" : ",tip=natural") + ")";
}

RectGrid RectGrid::refined_s() const {
  RectGrid r = *this;
  r.s_nodes.clear();
  r.s_nodes.reserve(2 * s_nodes.size());
  for (size_t i = 0; i + 1 < s_nodes.size(); ++i) {
    r.s_nodes.push_back(s_nodes[i]);
    r.s_nodes.push_back(std::sqrt(s_nodes[i] * s_nodes[i + 1]));
  }
  r.s_nodes.push_back(s_nodes.back());
  return r;
}

RectGrid RectGrid::truncated(double a) const {
  const auto it = std::find(s_nodes.begin(), s_nodes.end(), a);
  if (it == s_nodes.end()) throw std::invalid_argument("RectGrid::truncated: a is not a node");
  RectGrid r = *this;
  r.s_nodes.assign(s_nodes.begin(), it + 1);
  return r;
}

RectGrid make_rect_grid(double delta_s, std::vector<double> knots, double scale, const PeakGridOptions& o) {
  if (!(delta_s > 0.0)) throw std::invalid_argument("rect grid: delta_s must be > 0");
  if (knots.empty()) throw std::invalid_argument("rect grid: need at least one knot");
  if (!(o.ratio > 1.0) || !(o.far_ratio > 1.0) || o.tau_elements < 2)
    throw std::invalid_argument("rect grid: ratios must exceed 1 and tau_elements >= 2");
  const double end = *std::max_element(knots.begin(), knots.end());
  if (!(end > delta_s)) throw std::invalid_argument("rect grid: knots must exceed delta_s");
  std::vector<double> bp = knots;
  bp.push_back(delta_s);
  const double sc = o.collapse ? o.collapse_factor * scale : 0.0;
  for (double z : {o.focus_lo * scale, o.focus_hi * scale, sc})
    if (z > delta_s && z < end) bp.push_back(z);
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  for (double x : bp)
    if (!(x > 0.0)) throw std::invalid_argument("rect grid: knots must be > 0");
  const double flo = o.focus_lo * scale, fhi = o.focus_hi * scale;

  RectGrid g;
  g.s_nodes.push_back(bp.front());
  for (size_t q = 0; q + 1 < bp.size(); ++q) {
    const double x0 = bp[q], x1 = bp[q + 1];
    if (x0 < delta_s) continue;
    const bool focus = x0 >= flo * (1 - 1e-12) && x1 <= fhi * (1 + 1e-12);
    const double r = focus ? o.ratio : o.far_ratio;
    const int m = std::max(1, static_cast<int>(std::ceil(std::log(x1 / x0) / std::log(r) - 1e-9)));
    for (int i = 1; i < m; ++i) g.s_nodes.push_back(x0 * std::pow(x1 / x0, static_cast<double>(i) / m));
    g.s_nodes.push_back(x1);
  }
  g.tau_nodes.resize(o.tau_elements + 1);
  for (int j = 0; j <= o.tau_elements; ++j) g.tau_nodes[j] = -1.0 + 2.0 * j / o.tau_elements;
  g.tau_nodes.back() = 1.0;
  if (sc > delta_s && sc < end) {
    g.collapse_s = sc;
    g.tip_extension = true;
  }
  return g;
}

// Unknowns per full column: the value at the middle tau node followed by the
// differences v_{j+1} - v_j. The stiff transverse term then acts on the
// differences alone and never cancels against the axial terms.
SymSparsePair assemble_peak_rect(const PeakModelParams& prm, const RectGrid& grid, double robin) {
  validate(prm);
  const int ns = grid.ns(), nt = grid.nt();
  if (ns < 2 || nt < 2) throw std::invalid_argument("assemble_peak_rect: grid too small");
  if (std::abs(grid.s_nodes.back() - prm.a) > 1e-12 * prm.a)
    throw std::invalid_argument("assemble_peak_rect: last s node must equal a");
  if (grid.tau_nodes.front() != -1.0 || grid.tau_nodes.back() != 1.0)
    throw std::invalid_argument("assemble_peak_rect: tau grid must span [-1, 1]");
  for (int i = 1; i < ns; ++i)
    if (!(grid.s_nodes[i] > grid.s_nodes[i - 1]) || !(grid.s_nodes[0] > 0.0))
      throw std::invalid_argument("assemble_peak_rect: s nodes must be positive and increasing");

  const double p = prm.p, eps = prm.eps;
  const bool dir = prm.bc_at_a == CapBC::Dirichlet;
  const int ns_free = dir ? ns - 1 : ns;
  auto collapsed = [&](int i) { return grid.s_nodes[i] < grid.collapse_s; };
  int nc = 0;
  while (nc < ns && collapsed(nc)) ++nc;
  if (nc == ns) throw std::invalid_argument("assemble_peak_rect: every column collapsed");
  if (grid.tip_extension && nc == 0)
    throw std::invalid_argument("assemble_peak_rect: tip extension needs a collapsed first column");
  const int n = nc + (ns_free - nc) * nt;
  const int mid = (nt - 1) / 2;
  auto col_start = [&](int i) { return i < nc ? i : nc + (i - nc) * nt; };
  auto col_size = [&](int i) { return i >= ns_free ? 0 : (i < nc ? 1 : nt); };

  // nodal value of column-local unknowns: (offset within column, coefficient)
  using Combo = std::vector<std::pair<int, double>>;
  std::vector<Combo> node(nt);
  for (int j = 0; j < nt; ++j) {
    node[j].emplace_back(0, 1.0);
    for (int k = mid; k < j; ++k) node[j].emplace_back(1 + k, 1.0);
    for (int k = j; k < mid; ++k) node[j].emplace_back(1 + k, -1.0);
  }

  std::vector<Eigen::Triplet<double>> tk, tm;
  const double gp[2] = {kG0, kG1};
  Eigen::MatrixXd Kb, Mb;
  Eigen::VectorXd val, dsv, dtv, lo_c[2], hi_c[2];

  for (int i = 0; i + 1 < ns; ++i) {
    const int sz[2] = {col_size(i), col_size(i + 1)};
    const int L = sz[0] + sz[1];
    if (L == 0) continue;
    const int off[2] = {0, sz[0]};
    Kb.setZero(L, L);
    Mb.setZero(L, L);
    const double s0 = grid.s_nodes[i], hs = grid.s_nodes[i + 1] - s0;
    // column-local coefficient vector of the nodal value at row j
    auto nodal = [&](int c, int j, Eigen::VectorXd& out) {
      out.setZero(L);
      if (sz[c] == 0) return;
      if (sz[c] == 1) {
        out[off[c]] = 1.0;
        return;
      }
      for (const auto& [o, w] : node[j]) out[off[c] + o] += w;
    };
    for (int j = 0; j + 1 < nt; ++j) {
      const double t0 = grid.tau_nodes[j], ht = grid.tau_nodes[j + 1] - t0;
      for (int c = 0; c < 2; ++c) {
        nodal(c, j, lo_c[c]);
        nodal(c, j + 1, hi_c[c]);
      }
      for (double xi : gp) {
        for (double et : gp) {
          const double s = s0 + xi * hs, tau = t0 + et * ht;
          const double w = 0.25 * hs * ht * std::pow(s, p) * eps;
          const double a12 = -p * tau / s;
          const double a22 = std::pow(s, -2.0 * p) / (eps * eps) + a12 * a12;
          val.setZero(L);
          dsv.setZero(L);
          dtv.setZero(L);
          for (int c = 0; c < 2; ++c) {
            const double X = c ? xi : 1 - xi, dX = (c ? 1.0 : -1.0) / hs;
            const Eigen::VectorXd col = (1 - et) * lo_c[c] + et * hi_c[c];
            val += X * col;
            dsv += dX * col;
            // tau derivative: the difference unknown d_j of a full column
            if (sz[c] == nt) dtv[off[c] + 1 + j] += X / ht;
          }
          Kb.noalias() += w * (dsv * dsv.transpose());
          if (dtv.squaredNorm() > 0.0) {
            Kb.noalias() += (w * a12) * (dsv * dtv.transpose() + dtv * dsv.transpose());
            Kb.noalias() += (w * a22) * (dtv * dtv.transpose());
          }
          Mb.noalias() += w * (val * val.transpose());
        }
      }
    }
    // lateral Robin lines tau = -1 and tau = +1
    if (robin != 0.0) {
      for (int j : {0, nt - 1}) {
        for (int c = 0; c < 2; ++c) nodal(c, j, lo_c[c]);
        for (double xi : gp) {
          const double s = s0 + xi * hs;
          const double w = 0.5 * hs * std::sqrt(1.0 + p * p * eps * eps * std::pow(s, 2.0 * p - 2.0));
          val = (1 - xi) * lo_c[0] + xi * lo_c[1];
          Kb.noalias() -= (robin * w) * (val * val.transpose());
        }
      }
    }
    for (int a = 0; a < L; ++a) {
      const int ga = a < sz[0] ? col_start(i) + a : col_start(i + 1) + (a - sz[0]);
      for (int b = 0; b < L; ++b) {
        const int gb = b < sz[0] ? col_start(i) + b : col_start(i + 1) + (b - sz[0]);
        if (Kb(a, b) != 0.0) tk.emplace_back(ga, gb, Kb(a, b));
        if (Mb(a, b) != 0.0) tm.emplace_back(ga, gb, Mb(a, b));
      }
    }
  }
  if (grid.tip_extension) {
    // constant continuation on (0, delta_s): no gradient, two Robin lines
    const double d = grid.s_nodes.front(), q = 2.0 * p - 2.0;
    const double c = p * p * eps * eps;
    const double line = d * (1.0 + c * std::pow(d, q) / (2.0 * (q + 1.0)));
    tk.emplace_back(0, 0, -robin * 2.0 * line);
    tm.emplace_back(0, 0, 2.0 * eps * std::pow(d, p + 1.0) / (p + 1.0));
  }
  SpMat K(n, n), M(n, n);
  K.setFromTriplets(tk.begin(), tk.end());
  M.setFromTriplets(tm.begin(), tm.end());
  SpMat Kt = K.transpose();
  K = 0.5 * (K + Kt);
  SpMat Mt = M.transpose();
  M = 0.5 * (M + Mt);
  SymSparsePair pair;
  pair.dim = n;
  pair.stiffness = std::move(K);
  pair.mass = std::move(M);
  pair.bandwidth_hint = 2 * nt;
  return pair;
}

Eigen::MatrixXd peak_nodal_values(const PeakModelParams& prm, const RectGrid& grid, const Eigen::VectorXd& x) {
  const int ns = grid.ns(), nt = grid.nt();
  const int ns_free = prm.bc_at_a == CapBC::Dirichlet ? ns - 1 : ns;
  int nc = 0;
  while (nc < ns && grid.s_nodes[nc] < grid.collapse_s) ++nc;
  if (x.size() != nc + (ns_free - nc) * nt) throw std::invalid_argument("peak_nodal_values: size mismatch");
  const int mid = (nt - 1) / 2;
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(ns, nt);
  for (int i = 0; i < ns_free; ++i) {
    if (i < nc) {
      v.row(i).setConstant(x[i]);
      continue;
    }
    const int c = nc + (i - nc) * nt;
    v(i, mid) = x[c];
    for (int j = mid + 1; j < nt; ++j) v(i, j) = v(i, j - 1) + x[c + j];
    for (int j = mid - 1; j >= 0; --j) v(i, j) = v(i, j + 1) - x[c + 1 + j];
  }
  return v;
}

Spectrum spectrum_T(const PeakModelParams& params, int k, const PeakSolveOptions& opts) {
  validate(params);
  if (k < 1) throw std::invalid_argument("spectrum_T: k must be >= 1");
  return certified_solve(params, {params.a}, k, opts);
}

Spectrum spectrum_Q(double p, double eps, double b, int k, const PeakSolveOptions& opts, CapBC cap) {
  check_p(p);
  if (!(eps > 0.0) || !(b > 0.0)) throw std::invalid_argument("spectrum_Q: eps and b must be > 0");
  if (k < 1) throw std::invalid_argument("spectrum_Q: k must be >= 1");
  const double ell = b * std::pow(eps, 1.0 / (1.0 - p));
  if (!std::isfinite(ell)) throw BudgetExceeded("spectrum_Q: ell overflows; use a larger eps or a smaller b");
  PeakModelParams prm{p, eps, ell, cap, 0.0};
  if (opts.ell_cap > 0.0 && ell > opts.ell_cap) {
    prm.a = opts.ell_cap;
    Spectrum s = certified_solve(prm, {prm.a}, k, opts);
    PeakModelParams half = prm;
    half.a = 0.5 * opts.ell_cap;
    const Spectrum h = certified_solve(half, {half.a}, k, opts);
    s.grid_descriptor += ",ell=" + g6(ell) + ",ell_truncated=" + g6(prm.a) +
                         ",truncation_sensitivity=" + g6(max_rel_change(h.values, s.values));
    return s;
  }
  validate(prm);
  return certified_solve(prm, {ell}, k, opts);
}

BracketResult bracket_spectra(double p, double eps, double b, const std::vector<double>& caps, int k,
                              const PeakSolveOptions& opts) {
  check_p(p);
  if (k < 1) throw std::invalid_argument("bracket_spectra: k must be >= 1");
  const double ell = b * std::pow(eps, 1.0 / (1.0 - p));
  std::vector<double> knots = caps;
  for (double a : caps)
    if (!(a > 0.0) || a > ell) throw std::invalid_argument("bracket_spectra: caps must lie in (0, ell]");
  knots.push_back(ell);
  const double scale = peak_length_scale(p, eps);
  const double shift = shift_guess(p, eps);
  PeakModelParams prm{p, eps, ell, CapBC::Neumann, 0.0};
  validate(prm);
  const RectGrid full = make_rect_grid(effective_delta(prm, opts), knots, scale, opts.grid);
  BracketResult out;
  out.caps = caps;
  out.grid_descriptor = full.descriptor();
  auto run = [&](double a, CapBC bc) {
    PeakModelParams q = prm;
    q.a = a;
    q.bc_at_a = bc;
    return solve_level(q, full.truncated(a), k, shift, opts).values;
  };
  out.rows.push_back(run(ell, CapBC::Neumann));
  out.rows.push_back(run(ell, CapBC::Dirichlet));
  for (double a : caps) out.rows.push_back(run(a, CapBC::Dirichlet));
  return out;
}

CountResult count_Q_below(double p, double eps, double b, double threshold, const PeakSolveOptions& opts) {
  check_p(p);
  if (!(eps > 0.0) || !(b > 0.0)) throw std::invalid_argument("count_Q_below: eps and b must be > 0");
  if (!(threshold < 0.0)) throw std::invalid_argument("count_Q_below: threshold must be < 0");
  const double ell = b * std::pow(eps, 1.0 / (1.0 - p));
  PeakModelParams prm{p, eps, ell, CapBC::Neumann, 0.0};
  validate(prm);
  const double scale = peak_length_scale(p, eps);
  // -1/(eps s^p) = threshold
  const double turning = std::pow(-1.0 / (eps * threshold), 1.0 / p);
  PeakGridOptions go = opts.grid;
  go.focus_hi = std::max(go.focus_hi, 4.0 * turning / scale);
  const RectGrid g = make_rect_grid(effective_delta(prm, opts), {ell}, scale, go);
  const long unknowns = static_cast<long>(g.ns()) * g.nt();
  if (unknowns > opts.max_unknowns)
    throw BudgetExceeded("peak FEM count: " + std::to_string(unknowns) +
                         " unknowns exceed the budget; use a larger eps or a smaller b");
  return count_below(assemble_peak_rect(prm, g), threshold);
}

Spectrum physical_alpha_spectrum(double alpha, double m, double p, double delta, int k, const PeakSolveOptions& opts) {
  check_p(p);
  if (!(alpha > 0.0) || !(m > 0.0) || !(delta > 0.0))
    throw std::invalid_argument("physical_alpha_spectrum: alpha, m, delta must be > 0");
  const double eps = m * std::pow(alpha, 1.0 - p);
  const double b = std::pow(m, 1.0 / (p - 1.0)) * delta;
  Spectrum s = spectrum_Q(p, eps, b, k, opts);
  for (double& v : s.values) v *= alpha * alpha;
  s.shift_used *= alpha * alpha;
  s.grid_descriptor += ",alpha=" + g6(alpha) + ",eps=" + g6(eps);
  return s;
}

}  // namespace cusp
