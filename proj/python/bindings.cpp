#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "cusp/asymptotics.hpp"
#include "cusp/cli.hpp"
#include "cusp/errors.hpp"
#include "cusp/oned_effective.hpp"
#include "cusp/peak_fem.hpp"
#include "cusp/robin_ball.hpp"
#include "cusp/weyl_count.hpp"

namespace py = pybind11;
using namespace cusp;

namespace {

PeakSolveOptions peak_options(double s_ratio, int tau_elements, long max_unknowns) {
  PeakSolveOptions o;
  o.grid.ratio = s_ratio;
  o.grid.tau_elements = tau_elements;
  o.max_unknowns = max_unknowns;
  return o;
}

py::dict report_dict(const ExperimentReport& r) {
  py::dict d;
  d["experiment"] = r.experiment;
  py::list rows;
  for (const auto& row : r.table)
    rows.append(py::make_tuple(row.control, row.computed, row.predicted, row.ratio, row.index));
  d["table"] = rows;
  d["settings"] = r.settings;
  if (r.fit)
    d["fit"] = py::dict(py::arg("slope") = r.fit->slope, py::arg("intercept") = r.fit->intercept,
                        py::arg("residual_rms") = r.fit->residual_rms, py::arg("points_used") = r.fit->points_used);
  else
    d["fit"] = py::none();
  d["target_slope"] = r.target_slope;
  d["verdict"] = to_string(r.verdict);
  d["tolerance"] = r.tolerance;
  d["checks"] = r.checks;
  d["notes"] = r.notes;
  d["grids"] = r.grids;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Robin Laplacian spectra near power-law peaks";
  m.attr("__version__") = CUSP_SPECTRA_VERSION;

  auto base = py::register_exception<ComputationError>(m, "ComputationError", PyExc_RuntimeError);
  py::register_exception<BudgetExceeded>(m, "BudgetExceeded", base.ptr());
  py::register_exception<CertificateFailure>(m, "CertificateFailure", base.ptr());
  py::register_exception<LadderExhausted>(m, "LadderExhausted", base.ptr());

  py::class_<Spectrum>(m, "Spectrum")
      .def_readonly("values", &Spectrum::values)
      .def_readonly("residual_norms", &Spectrum::residual_norms)
      .def_readonly("grid_descriptor", &Spectrum::grid_descriptor)
      .def_readonly("shift_used", &Spectrum::shift_used)
      .def("__repr__", [](const Spectrum& s) { return "<Spectrum " + s.grid_descriptor + ">"; });

  py::class_<OneDParams>(m, "OneDParams")
      .def(py::init([](double p, int n, double lambda) { return OneDParams{p, n, lambda}; }), py::arg("p") = 1.5,
           py::arg("n") = 1, py::arg("lam") = 1.0)
      .def_readwrite("p", &OneDParams::p)
      .def_readwrite("n", &OneDParams::n)
      .def_readwrite("lam", &OneDParams::lambda);

  py::enum_<CapBC>(m, "CapBC").value("Dirichlet", CapBC::Dirichlet).value("Neumann", CapBC::Neumann);

  py::class_<PeakModelParams>(m, "PeakModelParams")
      .def(py::init([](double p, double eps, double a, CapBC bc, double delta_s) {
             return PeakModelParams{p, eps, a, bc, delta_s};
           }),
           py::arg("p") = 1.5, py::arg("eps") = 0.05, py::arg("a") = 1.0, py::arg("bc") = CapBC::Dirichlet,
           py::arg("delta_s") = 0.0)
      .def_readwrite("p", &PeakModelParams::p)
      .def_readwrite("eps", &PeakModelParams::eps)
      .def_readwrite("a", &PeakModelParams::a)
      .def_readwrite("bc", &PeakModelParams::bc_at_a)
      .def_readwrite("delta_s", &PeakModelParams::delta_s);

  m.def("phase_integral", &phase_integral, py::arg("p"));
  m.def("phase_integral_closed_form", &phase_integral_closed_form, py::arg("p"));
  m.def(
      "weyl_J", [](double p, int n) { return weyl_J(p, n).J_p; }, py::arg("p"), py::arg("n") = 1);
  m.def("threshold_count_coeff", &threshold_count_coeff, py::arg("p"), py::arg("n"), py::arg("m"), py::arg("B"));
  m.def("predicted_count", &predicted_count, py::arg("p"), py::arg("n"), py::arg("eps"));

  m.def("ground_state_interval", &ground_state_interval, py::arg("eps"), py::arg("r"));
  m.def("ball_lambda", &ball_lambda, py::arg("n"), py::arg("eps"), py::arg("r"));
  m.def("ground_state_ball", &ground_state_ball, py::arg("n"), py::arg("eps"), py::arg("r"));
  m.def("second_eigenvalue_disk", &second_eigenvalue_disk, py::arg("x"));

  m.def(
      "eigenvalues_A1", [](const OneDParams& P, int k, double accuracy) { return eigenvalues_A1(P, k, accuracy); },
      py::arg("params"), py::arg("k"), py::arg("accuracy") = 1e-7, py::call_guard<py::gil_scoped_release>());
  m.def(
      "shooting_oracle", [](const OneDParams& P, int j) { return shooting_oracle(P, j); }, py::arg("params"),
      py::arg("j"), py::call_guard<py::gil_scoped_release>());
  m.def(
      "counting_function", [](const OneDParams& P, double eps) { return counting_function(P, eps); },
      py::arg("params"), py::arg("eps"), py::call_guard<py::gil_scoped_release>());

  m.def(
      "spectrum_T",
      [](const PeakModelParams& prm, int k, double s_ratio, int tau_elements, long max_unknowns) {
        return spectrum_T(prm, k, peak_options(s_ratio, tau_elements, max_unknowns));
      },
      py::arg("params"), py::arg("k"), py::arg("s_ratio") = 1.01, py::arg("tau_elements") = 24,
      py::arg("max_unknowns") = 3000000, py::call_guard<py::gil_scoped_release>());
  m.def(
      "spectrum_Q",
      [](double p, double eps, double b, int k, CapBC cap, double s_ratio, int tau_elements, long max_unknowns) {
        return spectrum_Q(p, eps, b, k, peak_options(s_ratio, tau_elements, max_unknowns), cap);
      },
      py::arg("p"), py::arg("eps"), py::arg("b"), py::arg("k"), py::arg("cap") = CapBC::Neumann,
      py::arg("s_ratio") = 1.01, py::arg("tau_elements") = 24, py::arg("max_unknowns") = 3000000,
      py::call_guard<py::gil_scoped_release>());
  m.def(
      "count_Q_below",
      [](double p, double eps, double b, double threshold) { return count_Q_below(p, eps, b, threshold).count; },
      py::arg("p"), py::arg("eps"), py::arg("b"), py::arg("threshold"), py::call_guard<py::gil_scoped_release>());
  m.def(
      "physical_alpha_spectrum",
      [](double alpha, double mm, double p, double delta, int k) {
        return physical_alpha_spectrum(alpha, mm, p, delta, k);
      },
      py::arg("alpha"), py::arg("m"), py::arg("p"), py::arg("delta"), py::arg("k"),
      py::call_guard<py::gil_scoped_release>());

  m.def(
      "run_counting_experiment",
      [](double p, int n, const std::vector<double>& eps_list) {
        ExperimentReport r;
        {
          py::gil_scoped_release nogil;
          r = run_counting_experiment(p, n, eps_list);
        }
        return report_dict(r);
      },
      py::arg("p"), py::arg("n"), py::arg("eps_list"));
  m.def(
      "run_theorem1_experiment",
      [](double p, double mm, int j_max, const std::vector<double>& alphas, double delta) {
        Theorem1Options o;
        o.delta = delta;
        ExperimentReport r;
        {
          py::gil_scoped_release nogil;
          r = run_theorem1_experiment(p, mm, j_max, alphas, o);
        }
        return report_dict(r);
      },
      py::arg("p"), py::arg("m"), py::arg("j_max"), py::arg("alpha_list"), py::arg("delta") = 0.1);
  m.def(
      "run_theorem2_experiment",
      [](double p, double mm, double B, const std::vector<double>& alphas, bool direct_2d) {
        Theorem2Options o;
        o.direct_2d = direct_2d;
        ExperimentReport r;
        {
          py::gil_scoped_release nogil;
          r = run_theorem2_experiment(p, mm, B, alphas, o);
        }
        return report_dict(r);
      },
      py::arg("p"), py::arg("m"), py::arg("B"), py::arg("alpha_list"), py::arg("direct_2d") = false);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release nogil;
          code = cli::run_cli(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command line tool; returns (exit code, stdout text, stderr text).");
}
