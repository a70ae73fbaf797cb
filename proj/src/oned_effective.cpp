#include "cusp/oned_effective.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace cusp {

namespace {

std::string g6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void check_grid(const Grid1D& grid) {
  if (!(grid.delta > 0.0)) throw std::invalid_argument("grid: left cutoff delta must be > 0");
  if (grid.size() < 3) throw std::invalid_argument("grid: at least 3 nodes required");
  if (grid.nodes.front() != grid.delta || grid.nodes.back() != grid.L)
    throw std::invalid_argument("grid: end nodes must equal delta and L");
  for (int i = 1; i < grid.size(); ++i)
    if (!(grid.nodes[i] > grid.nodes[i - 1])) throw std::invalid_argument("grid: nodes must be strictly increasing");
}

void check_ends(double delta, double L) {
  if (!(delta > 0.0)) throw std::invalid_argument("grid: delta must be > 0");
  if (!(L > delta) || !std::isfinite(L)) throw std::invalid_argument("grid: L must exceed delta");
}

// Appends nodes from `s` to L with local size h(s), evening out the tail.
template <class H>
void march(std::vector<double>& nodes, double L, H h) {
  double s = nodes.back();
  while (true) {
    const double step = h(s);
    if (!(step > 0.0)) throw std::invalid_argument("grid: nonpositive element size");
    if (s + 1.5 * step >= L) {
      if (L - s > step) nodes.push_back(0.5 * (s + L));
      nodes.push_back(L);
      return;
    }
    s += step;
    nodes.push_back(s);
  }
}

}  // namespace

void validate(const OneDParams& params) {
  if (!(params.p > 1.0 && params.p < 2.0))
    throw std::invalid_argument("p must lie in (1,2) (power-law peak range)");
  if (params.n < 1) throw std::invalid_argument("n must be >= 1");
  if (!(params.lambda > 0.0) || !std::isfinite(params.lambda)) throw std::invalid_argument("lambda must be > 0");
}

double length_scale(const OneDParams& params) {
  validate(params);
  return std::pow(params.lambda / params.n, 1.0 / (2.0 - params.p));
}

std::string to_string(Grading g) {
  switch (g) {
    case Grading::geometric: return "geometric";
    case Grading::uniform: return "uniform";
    case Grading::graded: return "graded";
    case Grading::adapted: return "adapted";
  }
  return "unknown";
}

std::string Grid1D::descriptor() const {
  return to_string(grading) + "(delta=" + g6(delta) + ",L=" + g6(L) + ",ratio=" + g6(ratio) +
         ",nodes=" + std::to_string(size()) + ")";
}

Grid1D Grid1D::geometric(double delta, double L, double ratio) {
  check_ends(delta, L);
  if (!(ratio > 1.0)) throw std::invalid_argument("grid: geometric ratio must be > 1");
  const int elements = std::max(2, static_cast<int>(std::ceil(std::log(L / delta) / std::log(ratio) - 1e-9)));
  return geometric_count(delta, L, elements);
}

Grid1D Grid1D::geometric_count(double delta, double L, int elements) {
  check_ends(delta, L);
  if (elements < 2) throw std::invalid_argument("grid: at least 2 elements required");
  Grid1D g;
  g.delta = delta;
  g.L = L;
  g.grading = Grading::geometric;
  const double lr = std::log(L / delta);
  g.ratio = std::exp(lr / elements);
  g.nodes.resize(elements + 1);
  for (int i = 0; i <= elements; ++i) g.nodes[i] = delta * std::exp(lr * i / elements);
  g.nodes.front() = delta;
  g.nodes.back() = L;
  return g;
}

Grid1D Grid1D::uniform(double delta, double L, int elements) {
  check_ends(delta, L);
  if (elements < 2) throw std::invalid_argument("grid: at least 2 elements required");
  Grid1D g;
  g.delta = delta;
  g.L = L;
  g.grading = Grading::uniform;
  g.ratio = 1.0;
  g.nodes.resize(elements + 1);
  for (int i = 0; i <= elements; ++i) g.nodes[i] = delta + (L - delta) * i / elements;
  g.nodes.back() = L;
  return g;
}

Grid1D Grid1D::graded(double delta, double L, double ratio, double h_max) {
  check_ends(delta, L);
  if (!(ratio > 1.0) || !(h_max > 0.0)) throw std::invalid_argument("grid: need ratio > 1 and h_max > 0");
  Grid1D g;
  g.delta = delta;
  g.L = L;
  g.grading = Grading::graded;
  g.ratio = ratio;
  g.nodes.push_back(delta);
  march(g.nodes, L, [&](double s) { return std::min((ratio - 1.0) * s, h_max); });
  return g;
}

Grid1D Grid1D::adapted(double delta, double L, double ratio, double c, const OneDParams& params, double h_max) {
  validate(params);
  check_ends(delta, L);
  if (!(ratio > 1.0) || !(c > 0.0)) throw std::invalid_argument("grid: need ratio > 1 and c > 0");
  Grid1D g;
  g.delta = delta;
  g.L = L;
  g.grading = Grading::adapted;
  g.ratio = ratio;
  const double w = c * std::sqrt(params.lambda / params.n);
  g.nodes.push_back(delta);
  march(g.nodes, L, [&](double s) {
    double h = std::min((ratio - 1.0) * s, w * std::pow(s, 0.5 * params.p));
    if (h_max > 0.0) h = std::min(h, h_max);
    return h;
  });
  return g;
}

Grid1D Grid1D::refined() const {
  Grid1D g = *this;
  g.nodes.clear();
  g.nodes.reserve(2 * nodes.size());
  const double lr = std::log(ratio);
  for (size_t i = 0; i + 1 < nodes.size(); ++i) {
    const double a = nodes[i], b = nodes[i + 1];
    g.nodes.push_back(a);
    const bool geometric_elem = ratio > 1.0 && std::abs(std::log(b / a) - lr) <= 1e-9 * lr;
    g.nodes.push_back(geometric_elem ? std::sqrt(a * b) : 0.5 * (a + b));
  }
  g.nodes.push_back(nodes.back());
  if (ratio > 1.0) g.ratio = std::sqrt(ratio);
  return g;
}

Grid1D Grid1D::scaled(double sigma) const {
  if (!(sigma > 0.0)) throw std::invalid_argument("grid: scale must be > 0");
  Grid1D g = *this;
  for (double& s : g.nodes) s *= sigma;
  g.delta = g.nodes.front();
  g.L = g.nodes.back();
  return g;
}

double element_moment(int k, double r, double t) {
  if (k < 0 || k > 2) throw std::invalid_argument("element_moment: k in {0,1,2}");
  if (t <= 0.5) {
    // sum_j C(r, j) t^j / (k + j + 1)
    double coef = 1.0, tp = 1.0, sum = 1.0 / (k + 1);
    for (int j = 1; j < 400; ++j) {
      coef *= (r - (j - 1)) / j;
      tp *= t;
      const double term = coef * tp / (k + j + 1);
      sum += term;
      if (coef == 0.0 || std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  // t^{-(k+1)} int_1^{1+t} (u - 1)^k u^r du
  const double lu = std::log1p(t);
  auto P = [&](double e) { return std::expm1(e * lu) / e; };  // int_1^{1+t} u^{e-1} du
  switch (k) {
    case 0: return P(r + 1) / t;
    case 1: return (P(r + 2) - P(r + 1)) / (t * t);
    default: return (P(r + 3) - 2.0 * P(r + 2) + P(r + 1)) / (t * t * t);
  }
}

TridiagPencil assemble_effective_tridiag(const OneDParams& params, const Grid1D& grid, RightBC bc, TipModel tip) {
  validate(params);
  check_grid(grid);
  const double q = params.n * params.p;
  const double rpot = q - params.p;
  const double coupling = params.n / params.lambda;
  const int N = grid.size();
  TridiagPencil t;
  t.a.assign(N, 0.0);
  t.ma.assign(N, 0.0);
  t.b.assign(N - 1, 0.0);
  t.mb.assign(N - 1, 0.0);
  for (int e = 0; e + 1 < N; ++e) {
    const double x0 = grid.nodes[e], h = grid.nodes[e + 1] - x0, tt = h / x0;
    const double stiff = std::pow(x0, q) * element_moment(0, q, tt) / h;
    const double wm = h * std::pow(x0, q);
    const double m0 = element_moment(0, q, tt), m1 = element_moment(1, q, tt), m2 = element_moment(2, q, tt);
    const double wp = coupling * h * std::pow(x0, rpot);
    const double p0 = element_moment(0, rpot, tt), p1 = element_moment(1, rpot, tt), p2 = element_moment(2, rpot, tt);
    t.a[e] += stiff - wp * (p0 - 2 * p1 + p2);
    t.a[e + 1] += stiff - wp * p2;
    t.b[e] += -stiff - wp * (p1 - p2);
    t.ma[e] += wm * (m0 - 2 * m1 + m2);
    t.ma[e + 1] += wm * m2;
    t.mb[e] += wm * (m1 - m2);
  }
  if (tip == TipModel::constant) {
    const double d = grid.delta;
    t.a[0] -= coupling * std::pow(d, rpot + 1.0) / (rpot + 1.0);
    t.ma[0] += std::pow(d, q + 1.0) / (q + 1.0);
  }
  if (bc == RightBC::Dirichlet) {
    t.a.pop_back();
    t.ma.pop_back();
    t.b.pop_back();
    t.mb.pop_back();
  }
  return t;
}

SymSparsePair assemble_effective_1d(const OneDParams& params, const Grid1D& grid, RightBC bc, TipModel tip) {
  const TridiagPencil t = assemble_effective_tridiag(params, grid, bc, tip);
  const int n = t.size();
  std::vector<Eigen::Triplet<double>> tk, tm;
  tk.reserve(3 * n);
  tm.reserve(3 * n);
  for (int i = 0; i < n; ++i) {
    tk.emplace_back(i, i, t.a[i]);
    tm.emplace_back(i, i, t.ma[i]);
    if (i + 1 < n) {
      tk.emplace_back(i, i + 1, t.b[i]);
      tk.emplace_back(i + 1, i, t.b[i]);
      tm.emplace_back(i, i + 1, t.mb[i]);
      tm.emplace_back(i + 1, i, t.mb[i]);
    }
  }
  SpMat K(n, n), M(n, n);
  K.setFromTriplets(tk.begin(), tk.end());
  M.setFromTriplets(tm.begin(), tm.end());
  SymSparsePair pair;
  pair.dim = n;
  pair.stiffness = std::move(K);
  pair.mass = std::move(M);
  pair.bandwidth_hint = 1;
  return pair;
}

Spectrum eigenvalues_on_grid(const OneDParams& params, const Grid1D& grid, RightBC bc, int k, bool want_vectors,
                             TipModel tip) {
  const SymSparsePair pair = assemble_effective_1d(params, grid, bc, tip);
  EigOptions o;
  o.want_vectors = want_vectors;
  o.grid_descriptor = grid.descriptor() + (bc == RightBC::Dirichlet ? ",dirichlet" : ",neumann");
  return smallest_eigenpairs(pair, k, o);
}

Spectrum eigenvalues_A1(const OneDParams& params, int k, double accuracy, const LadderOptions& opts) {
  validate(params);
  if (k < 1) throw std::invalid_argument("eigenvalues_A1: k must be >= 1");
  if (!(accuracy > 0.0)) throw std::invalid_argument("eigenvalues_A1: accuracy must be > 0");
  const double ell = length_scale(params);
  const double L0 = opts.L0_factor * ell;
  const double d0 = opts.delta0_factor * L0;
  const double hmax = L0 / 500.0;
  std::vector<double> prev, best, spread(k, 0.0);
  std::string last_grid;
  for (int level = 0; level < opts.max_levels; ++level) {
    const double scale = std::ldexp(1.0, level);
    const double rho = std::pow(opts.rho0, 1.0 / scale);
    const Grid1D coarse = Grid1D::graded(d0 / scale, L0 * scale, rho, hmax / scale);
    const Grid1D fine = coarse.refined();
    if (fine.size() > opts.max_nodes)
      throw LadderExhausted("eigenvalues_A1: node budget exhausted before accuracy was met", best, spread, last_grid);
    const Spectrum sf = eigenvalues_on_grid(params, fine, RightBC::Dirichlet, k);
    std::vector<double> cur = sf.values;
    if (opts.richardson) {
      const Spectrum sc = eigenvalues_on_grid(params, coarse, RightBC::Dirichlet, k);
      for (int j = 0; j < k; ++j) cur[j] = (4.0 * sf.values[j] - sc.values[j]) / 3.0;
    }
    last_grid = sf.grid_descriptor + (opts.richardson ? ",richardson" : "");
    if (!prev.empty()) {
      bool ok = true;
      for (int j = 0; j < k; ++j) {
        spread[j] = std::abs(cur[j] - prev[j]);
        if (spread[j] > accuracy * std::abs(cur[j])) ok = false;
      }
      if (ok) {
        Spectrum out = sf;
        out.values = cur;
        out.count_requested = k;
        out.grid_descriptor = last_grid + ",level=" + std::to_string(level);
        return out;
      }
    }
    best = cur;
    prev = cur;
  }
  throw LadderExhausted("eigenvalues_A1: level limit reached before accuracy was met", best, spread, last_grid);
}

long counting_function(const OneDParams& params, double eps_threshold, const CountingOptions& opts) {
  return counting_function_report(params, eps_threshold, opts).count;
}

CountingReport counting_function_report(const OneDParams& params, double eps_threshold, const CountingOptions& opts) {
  validate(params);
  if (!(eps_threshold > 0.0) || !std::isfinite(eps_threshold))
    throw std::invalid_argument("counting_function: threshold must be > 0");
  const double ell = length_scale(params);
  const double turning = std::pow(params.n / (params.lambda * eps_threshold), 1.0 / params.p);
  double L = opts.L_factor * std::max(turning, ell);
  double delta = opts.delta_factor * std::min(ell, turning);
  double npw = opts.nodes_per_wavelength;
  double rho = opts.rho;
  const double E = -eps_threshold;
  std::vector<std::vector<double>> history;
  for (int attempt = 0; attempt <= opts.max_refinements; ++attempt) {
    const double c = 2.0 * M_PI / npw;
    const Grid1D base = Grid1D::adapted(delta, L, rho, c, params);
    const Grid1D fine = base.refined();
    const Grid1D longer = Grid1D::adapted(delta, 1.5 * L, rho, c, params);
    const CountResult c0 = sturm_count(assemble_effective_tridiag(params, base, RightBC::Dirichlet), E);
    const CountResult c1 = sturm_count(assemble_effective_tridiag(params, fine, RightBC::Dirichlet), E);
    const CountResult c2 = sturm_count(assemble_effective_tridiag(params, longer, RightBC::Dirichlet), E);
    history.push_back({static_cast<double>(c0.count), static_cast<double>(c1.count), static_cast<double>(c2.count)});
    if (c0.count == c1.count && c0.count == c2.count) {
      CountingReport r;
      r.count = c0.count;
      r.count_refined = c1.count;
      r.count_extended = c2.count;
      r.refinements = attempt;
      r.nodes = base.size();
      r.grid_descriptor = base.descriptor() + ",npw=" + g6(npw);
      r.ambiguous = c0.ambiguous || c1.ambiguous || c2.ambiguous;
      return r;
    }
    npw *= 2.0;
    rho = std::sqrt(rho);
    delta *= 0.5;
    L *= 1.5;
  }
  throw CertificateFailure("counting_function: count unstable under refinement", history);
}

}  // namespace cusp
