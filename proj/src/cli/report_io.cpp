#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "cusp/cli.hpp"
#include "json.hpp"

namespace cusp::cli {

namespace {

using nlohmann::json;

// numbers pass through their 12-digit text so the JSON carries the same digits
json jnum(double v) {
  if (!std::isfinite(v)) return nullptr;
  return std::stod(format_number(v));
}

json model_params(const ExperimentReport& r) {
  json j = json::object();
  if (const auto* o = std::get_if<OneDParams>(&r.params)) {
    j["p"] = jnum(o->p);
    j["n"] = o->n;
    j["lambda"] = jnum(o->lambda);
  } else if (const auto* q = std::get_if<PeakModelParams>(&r.params)) {
    j["p"] = jnum(q->p);
    j["eps"] = jnum(q->eps);
    j["a"] = jnum(q->a);
    j["bc_at_a"] = q->bc_at_a == CapBC::Dirichlet ? "dirichlet" : "neumann";
    j["delta_s"] = jnum(q->delta_s);
  }
  return j;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << text;
  if (!f) throw std::runtime_error("write to " + path + " failed");
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string format_csv(const ExperimentReport& r) {
  std::string out = "control,computed,predicted,ratio\n";
  for (const auto& row : r.table)
    out += format_number(row.control) + "," + format_number(row.computed) + "," + format_number(row.predicted) + "," +
           format_number(row.ratio) + "\n";
  return out;
}

std::string format_table_jsonl(const ExperimentReport& r) {
  std::string out;
  for (const auto& row : r.table) {
    json j;
    j["control"] = jnum(row.control);
    j["computed"] = jnum(row.computed);
    j["predicted"] = jnum(row.predicted);
    j["ratio"] = jnum(row.ratio);
    out += j.dump() + "\n";
  }
  return out;
}

std::string format_meta(const ExperimentReport& r, const RunConfig& cfg) {
  json j;
  j["record"] = "run";
  j["toolkit"] = "cusp-spectra";
  j["version"] = CUSP_SPECTRA_VERSION;
  j["command"] = to_string(cfg.command);
  j["experiment"] = r.experiment;
  j["config"] = cfg.parameters;
  j["model"] = model_params(r);
  json settings = json::array();
  for (const auto& [k, v] : r.settings) settings.push_back({{"name", k}, {"value", jnum(v)}});
  j["settings"] = settings;
  j["columns"] = {"control", "computed", "predicted", "ratio"};
  json idx = json::array();
  for (const auto& row : r.table) idx.push_back(row.index);
  j["row_index"] = idx;
  j["rows"] = r.table.size();
  if (r.fit)
    j["fit"] = {{"slope", jnum(r.fit->slope)},
                {"intercept", jnum(r.fit->intercept)},
                {"residual_rms", jnum(r.fit->residual_rms)},
                {"points_used", r.fit->points_used}};
  else
    j["fit"] = nullptr;
  j["target_slope"] = jnum(r.target_slope);
  j["verdict"] = to_string(r.table.empty() ? Verdict::inconclusive : r.verdict);
  j["tolerance"] = r.tolerance;
  j["checks"] = r.checks;
  j["notes"] = r.notes;
  j["grids"] = r.grids;
  j["table"] = cfg.output_path;
  return j.dump() + "\n";
}

std::vector<CsvRow> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "control,computed,predicted,ratio")
    throw std::invalid_argument("parse_csv: missing header");
  std::vector<CsvRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string f[4];
    for (auto& s : f)
      if (!std::getline(ls, s, ',')) throw std::invalid_argument("parse_csv: short row '" + line + "'");
    rows.push_back({std::stod(f[0]), std::stod(f[1]), std::stod(f[2]), std::stod(f[3])});
  }
  return rows;
}

void emit_report(const ExperimentReport& r, const RunConfig& cfg, std::ostream& out) {
  const std::string table = cfg.format == OutputFormat::csv ? format_csv(r) : format_table_jsonl(r);
  if (cfg.output_path == "-")
    out << table << std::flush;
  else
    write_file(cfg.output_path, table);
  if (!cfg.meta_path.empty()) write_file(cfg.meta_path, format_meta(r, cfg));
}

}  // namespace cusp::cli
