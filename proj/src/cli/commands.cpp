#include <algorithm>
#include <cmath>
#include <ostream>

#include "cusp/cli.hpp"
#include "cusp/errors.hpp"
#include "cusp/robin_ball.hpp"
#include "cusp/weyl_count.hpp"

namespace cusp::cli {

namespace {

std::string num(double v) { return format_number(v); }

std::string check_line(const std::string& name, bool ok, const std::string& detail) {
  return name + ": " + (ok ? "pass" : "fail") + " (" + detail + ")";
}

Verdict verdict_of(const std::vector<std::string>& checks) {
  if (checks.empty()) return Verdict::inconclusive;
  for (const auto& c : checks)
    if (c.find(": fail") != std::string::npos) return Verdict::fail;
  return Verdict::pass;
}

ExperimentReport run_a1(const RunConfig& c) {
  const OneDParams P{c.real("p"), static_cast<int>(c.integer("n")), c.real("lambda")};
  const int k = static_cast<int>(c.integer("k"));
  const double tol = c.real("tol");
  const Spectrum s = eigenvalues_A1(P, k, c.real("accuracy"));
  std::vector<double> oracle(k);
  parallel_for(k, worker_count(static_cast<int>(c.integer("threads"))),
               [&](int j) { oracle[j] = shooting_oracle(P, j + 1); });
  ExperimentReport r;
  r.experiment = "a1";
  r.params = P;
  r.settings = {{"p", P.p}, {"n", P.n}, {"lambda", P.lambda}, {"k", k}, {"accuracy", c.real("accuracy")}};
  r.tolerance = "|E_j / oracle_j - 1| <= " + num(tol);
  double worst = 0.0;
  for (int j = 0; j < k; ++j) {
    r.table.push_back({static_cast<double>(j + 1), s.values[j], oracle[j], s.values[j] / oracle[j], j + 1});
    worst = std::max(worst, std::abs(s.values[j] / oracle[j] - 1.0));
  }
  r.checks.push_back(check_line("oracle agreement", worst <= tol, "max deviation " + num(worst)));
  r.grids.push_back(s.grid_descriptor);
  r.verdict = verdict_of(r.checks);
  return r;
}

ExperimentReport run_count(const RunConfig& c) {
  CountingExperimentOptions o;
  o.tol.slope_rel = c.real("slope-tol");
  o.tol.prefactor_rel = c.real("prefactor-tol");
  o.threads = static_cast<int>(c.integer("threads"));
  return run_counting_experiment(c.real("p"), static_cast<int>(c.integer("n")), c.reals("eps-list"), o);
}

ExperimentReport run_ball(const RunConfig& c) {
  const int n = static_cast<int>(c.integer("n"));
  const std::vector<double> xs = c.reals("x-list");
  const double bound = c.real("phi-bound");
  ExperimentReport r;
  r.experiment = "ball";
  r.settings = {{"n", n}, {"phi_bound", bound}};
  r.tolerance = "secular residual <= 1e-10, |(E_1 + n x) / x^2| <= " + num(bound);
  const int N = static_cast<int>(xs.size());
  std::vector<double> E(N), res(N);
  parallel_for(N, worker_count(static_cast<int>(c.integer("threads"))), [&](int i) {
    const double lam = ball_lambda(n, 1.0, xs[i]);
    E[i] = -lam * lam;
    res[i] = ball_secular_residual(n, 1.0, xs[i], lam);
  });
  double worst_res = 0.0, worst_phi = 0.0;
  for (int i = 0; i < N; ++i) {
    const double pred = -n * xs[i];
    r.table.push_back({xs[i], E[i], pred, E[i] / pred, 1});
    worst_res = std::max(worst_res, res[i]);
    worst_phi = std::max(worst_phi, std::abs((E[i] + n * xs[i]) / (xs[i] * xs[i])));
  }
  r.checks.push_back(check_line("secular residual", worst_res <= 1e-10, "max " + num(worst_res)));
  r.checks.push_back(check_line("phi bounded", worst_phi <= bound, "max |phi| " + num(worst_phi)));
  r.verdict = verdict_of(r.checks);
  return r;
}

ExperimentReport run_peak2d(const RunConfig& c) {
  const PeakModelParams prm{c.real("p"), c.real("eps"), c.real("a"),
                            c.text("bc") == "neumann" ? CapBC::Neumann : CapBC::Dirichlet, c.real("delta-s")};
  const int k = static_cast<int>(c.integer("k"));
  const double tol = c.real("tol");
  PeakSolveOptions o;
  o.grid.ratio = c.real("s-ratio");
  o.grid.tau_elements = static_cast<int>(c.integer("tau-elements"));
  o.max_unknowns = c.integer("max-unknowns");
  const Spectrum s = spectrum_T(prm, k, o);
  const Spectrum a1 = eigenvalues_A1({prm.p, 1, 1.0}, k, 1e-7);
  const double scale = std::pow(prm.eps, -2.0 / (2.0 - prm.p));
  ExperimentReport r;
  r.experiment = "peak2d";
  r.params = prm;
  r.settings = {{"p", prm.p}, {"eps", prm.eps}, {"a", prm.a}, {"k", k}};
  for (int j = 0; j < k; ++j) r.settings.emplace_back("E" + std::to_string(j + 1) + "_A1", a1.values[j]);
  r.tolerance = "|E_j(T) eps^(2/(2-p)) / E_j(A_1) - 1| <= " + num(tol);
  double worst = 0.0;
  for (int j = 0; j < k; ++j) {
    const double pred = scale * a1.values[j];
    r.table.push_back({static_cast<double>(j + 1), s.values[j], pred, s.values[j] / pred, j + 1});
    worst = std::max(worst, std::abs(s.values[j] / pred - 1.0));
  }
  r.checks.push_back(check_line("negative ground state", s.values[0] < 0.0, "E_1 = " + num(s.values[0])));
  r.checks.push_back(check_line("one-dimensional limit", worst <= tol, "max |R_j - 1| " + num(worst)));
  r.grids = {s.grid_descriptor, a1.grid_descriptor};
  r.verdict = verdict_of(r.checks);
  return r;
}

ExperimentReport run_thm1(const RunConfig& c) {
  Theorem1Options o;
  o.delta = c.real("delta");
  o.tol.slope_rel = c.real("slope-tol");
  o.peak.max_unknowns = c.integer("max-unknowns");
  o.threads = static_cast<int>(c.integer("threads"));
  return run_theorem1_experiment(c.real("p"), c.real("m"), static_cast<int>(c.integer("j-max")),
                                 c.reals("alpha-list"), o);
}

ExperimentReport run_thm2(const RunConfig& c) {
  Theorem2Options o;
  o.n = static_cast<int>(c.integer("n"));
  o.delta = c.real("delta");
  o.direct_2d = c.flag("direct-2d");
  o.threads = static_cast<int>(c.integer("threads"));
  return run_theorem2_experiment(c.real("p"), c.real("m"), c.real("B"), c.reals("alpha-list"), o);
}

ExperimentReport run_weyl(const RunConfig& c) {
  const std::vector<double> ps = c.reals("p-list");
  const int n = static_cast<int>(c.integer("n"));
  const double tol = c.real("tol");
  ExperimentReport r;
  r.experiment = "weyl";
  r.settings = {{"n", n}};
  r.tolerance = "|quadrature - (1/p) B(1/p - 1/2, 3/2)| <= " + num(tol);
  double worst = 0.0;
  for (double p : ps) {
    const double q = phase_integral(p), cf = phase_integral_closed_form(p);
    r.table.push_back({p, q, cf, q / cf, 1});
    worst = std::max(worst, std::abs(q - cf));
    r.notes.push_back("p = " + num(p) + ": J_p = " + num(weyl_J(p, n).J_p));
  }
  r.checks.push_back(check_line("closed form", worst <= tol, "max deviation " + num(worst)));
  r.verdict = verdict_of(r.checks);
  return r;
}

}  // namespace

ExperimentReport run_command(const RunConfig& c) {
  switch (c.command) {
    case Command::a1: return run_a1(c);
    case Command::count: return run_count(c);
    case Command::ball: return run_ball(c);
    case Command::peak2d: return run_peak2d(c);
    case Command::thm1: return run_thm1(c);
    case Command::thm2: return run_thm2(c);
    case Command::weyl: return run_weyl(c);
  }
  throw std::logic_error("unhandled command");
}

int exit_code(Verdict v) { return v == Verdict::fail ? 1 : 0; }

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = parse_config(args);
  } catch (const InfoRequested& e) {
    out << e.what();
    return 0;
  } catch (const ValidationError& e) {
    err << "cusp-spectra: " << e.what() << "\n";
    return 2;
  }
  if (cfg.print_config) {
    out << render_config(cfg);
    return 0;
  }
  try {
    const ExperimentReport r = run_command(cfg);
    emit_report(r, cfg, out);
    const Verdict v = r.table.empty() ? Verdict::inconclusive : r.verdict;
    err << "cusp-spectra " << to_string(cfg.command) << ": verdict " << to_string(v) << "\n";
    for (const auto& ch : r.checks) err << "  " << ch << "\n";
    for (const auto& nt : r.notes) err << "  note: " << nt << "\n";
    return exit_code(v);
  } catch (const std::invalid_argument& e) {
    err << "cusp-spectra: invalid input: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "cusp-spectra: computation failed: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace cusp::cli
