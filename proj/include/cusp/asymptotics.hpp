#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cusp/oned_effective.hpp"
#include "cusp/peak_fem.hpp"

namespace cusp {

struct PowerLawFit {
  double slope = 0.0;
  double intercept = 0.0;  // log of the prefactor
  double residual_rms = 0.0;
  int points_used = 0;
};

// Least squares on (log x, log |y|). Needs >= 2 points, distinct x > 0 and
// y of one sign.
PowerLawFit fit_power_law(const std::vector<std::pair<double, double>>& points);

enum class Verdict { pass, fail, inconclusive };
std::string to_string(Verdict v);

struct ReportRow {
  double control = 0.0;
  double computed = 0.0;
  double predicted = 0.0;
  double ratio = 0.0;
  int index = 1;  // eigenvalue index j for multi-index tables
};

struct Tolerances {
  double slope_rel = 0.02;
  double prefactor_rel = 0.10;
  int min_trend_points = 3;
  double algebra_abs = 1e-12;
};

struct ExperimentReport {
  std::string experiment;
  std::variant<std::monostate, OneDParams, PeakModelParams> params;
  // scalar settings and stored constants, in emission order
  std::vector<std::pair<std::string, double>> settings;
  std::vector<ReportRow> table;
  std::optional<PowerLawFit> fit;
  double target_slope = std::numeric_limits<double>::quiet_NaN();
  Verdict verdict = Verdict::inconclusive;
  std::string tolerance;
  std::vector<std::string> checks;  // "name: pass|fail (detail)"
  std::vector<std::string> notes;
  std::vector<std::string> grids;
};

// Worker count: `requested` (0 = hardware), capped by CUSP_SPECTRA_THREADS.
int worker_count(int requested = 0);

// Runs body(i) for i in [0, n) on a pool; rethrows the exception of the
// lowest failing index.
void parallel_for(int n, int threads, const std::function<void(int)>& body);

struct Theorem1Options {
  double delta = 0.1;
  double a1_accuracy = 1e-7;
  PeakSolveOptions peak;
  Tolerances tol;
  int threads = 0;
};

ExperimentReport run_theorem1_experiment(double p, double m, int j_max, const std::vector<double>& alpha_list,
                                         const Theorem1Options& opts = {});

struct CountingExperimentOptions {
  CountingOptions counting;
  Tolerances tol;
  int threads = 0;
};

ExperimentReport run_counting_experiment(double p, int n, const std::vector<double>& eps_list,
                                         const CountingExperimentOptions& opts = {});

struct Theorem2Options {
  int n = 1;
  double delta = 0.1;           // peak length for the direct 2D count
  bool direct_2d = true;        // qualitative 2D count at the largest alpha (n = 1 only)
  CountingOptions counting;
  PeakSolveOptions peak;
  Tolerances tol;
  int threads = 0;
};

// Reduced threshold B m^{2/(2-p)} alpha^{p(p-1)/(p-2)} for the count of A_1.
double theorem2_reduced_threshold(double p, double m, double B, double alpha);

ExperimentReport run_theorem2_experiment(double p, double m, double B, const std::vector<double>& alpha_list,
                                         const Theorem2Options& opts = {});

}  // namespace cusp
