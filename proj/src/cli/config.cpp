#include <unistd.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <optional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "CLI11.hpp"
#include "cusp/cli.hpp"

namespace cusp::cli {

namespace {

enum class Kind { real, integer, reals, boolean, choice, path };

struct Param {
  std::string key;
  Kind kind;
  std::string def;
  std::string help;
  std::vector<std::string> choices = {};
};

const std::vector<Param>& common_params() {
  static const std::vector<Param> v = {
      {"output", Kind::path, "-", "table destination, - for standard output"},
      {"format", Kind::choice, "csv", "table format", {"csv", "json-lines"}},
      {"meta", Kind::path, "", "metadata sidecar (default: <output>.meta.jsonl)"},
      {"threads", Kind::integer, "0", "worker threads, 0 = hardware (capped by CUSP_SPECTRA_THREADS)"},
  };
  return v;
}

const std::vector<Param>& command_params(Command c) {
  static const std::map<Command, std::vector<Param>> table = {
      {Command::a1,
       {{"p", Kind::real, "1.5", "peak exponent in (1,2)"},
        {"n", Kind::integer, "1", "cross-section dimension"},
        {"lambda", Kind::real, "1", "coupling lambda > 0"},
        {"k", Kind::integer, "3", "number of eigenvalues"},
        {"accuracy", Kind::real, "1e-7", "ladder relative accuracy"},
        {"tol", Kind::real, "1e-4", "allowed relative deviation from the shooting oracle"}}},
      {Command::count,
       {{"p", Kind::real, "1.2", "peak exponent in (1,2)"},
        {"n", Kind::integer, "1", "cross-section dimension"},
        {"eps-list", Kind::reals, "1e-3,1e-4,1e-5,1e-6", "thresholds, strictly descending"},
        {"slope-tol", Kind::real, "0.02", "relative slope tolerance"},
        {"prefactor-tol", Kind::real, "0.1", "relative prefactor tolerance"}}},
      {Command::ball,
       {{"n", Kind::integer, "2", "ball dimension"},
        {"x-list", Kind::reals, "1e-4,1e-3,1e-2,0.1,1,10", "Robin parameters x of the unit ball"},
        {"phi-bound", Kind::real, "2", "bound on |(E_1 + n x) / x^2|"}}},
      {Command::peak2d,
       {{"p", Kind::real, "1.5", "peak exponent in (1,2)"},
        {"eps", Kind::real, "0.05", "opening coefficient"},
        {"a", Kind::real, "1", "axial length"},
        {"k", Kind::integer, "1", "number of eigenvalues"},
        {"bc", Kind::choice, "dirichlet", "condition at s = a", {"dirichlet", "neumann"}},
        {"delta-s", Kind::real, "0", "tip cutoff, 0 = automatic"},
        {"s-ratio", Kind::real, "1.01", "axial element ratio near the eigenfunctions"},
        {"tau-elements", Kind::integer, "24", "cross-section elements"},
        {"max-unknowns", Kind::integer, "3000000", "unknown budget"},
        {"tol", Kind::real, "0.1", "allowed |R_j - 1| against the one-dimensional limit"}}},
      {Command::thm1,
       {{"p", Kind::real, "1.5", "peak exponent in (1,2)"},
        {"m", Kind::real, "1", "peak coefficient"},
        {"delta", Kind::real, "0.1", "peak length"},
        {"j-max", Kind::integer, "1", "eigenvalue indices 1..j-max"},
        {"alpha-list", Kind::reals, "100,400,2500,10000", "Robin parameters, strictly ascending"},
        {"slope-tol", Kind::real, "0.02", "relative slope tolerance"},
        {"max-unknowns", Kind::integer, "3000000", "unknown budget per solve"}}},
      {Command::thm2,
       {{"p", Kind::real, "1.5", "peak exponent in (1,2)"},
        {"m", Kind::real, "1", "peak coefficient"},
        {"B", Kind::real, "1", "threshold coefficient"},
        {"n", Kind::integer, "1", "cross-section dimension"},
        {"alpha-list", Kind::reals, "100,1000,10000", "Robin parameters, strictly ascending"},
        {"direct-2d", Kind::boolean, "true", "qualitative 2D count at the largest alpha"},
        {"delta", Kind::real, "0.1", "peak length for the 2D count"}}},
      {Command::weyl,
       {{"p-list", Kind::reals, "1.1,1.2,1.3,1.4,1.5,1.6,1.7,1.8,1.9", "exponents in (1,2)"},
        {"n", Kind::integer, "1", "cross-section dimension"},
        {"tol", Kind::real, "1e-10", "allowed |quadrature - closed form|"}}},
  };
  return table.at(c);
}

std::string type_label(const Param& p) {
  switch (p.kind) {
    case Kind::real: return "REAL";
    case Kind::integer: return "INT";
    case Kind::reals: return "REAL,...";
    case Kind::boolean: return "BOOL";
    case Kind::path: return "PATH";
    case Kind::choice: {
      std::string s;
      for (const auto& c : p.choices) s += (s.empty() ? "" : "|") + c;
      return s;
    }
  }
  return "TEXT";
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

std::optional<double> parse_real(const std::string& raw) {
  const std::string s = trim(raw);
  if (s.empty()) return std::nullopt;
  double v = 0.0;
  const char* b = s.data() + (s[0] == '+' ? 1 : 0);
  const auto [ptr, ec] = std::from_chars(b, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<long> parse_integer(const std::string& raw) {
  const std::string s = trim(raw);
  long v = 0;
  const char* b = s.data() + (!s.empty() && s[0] == '+' ? 1 : 0);
  const auto [ptr, ec] = std::from_chars(b, s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

std::optional<std::vector<double>> parse_reals(const std::string& raw) {
  std::vector<double> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto v = parse_real(item);
    if (!v) return std::nullopt;
    out.push_back(*v);
  }
  if (out.empty()) return std::nullopt;
  return out;
}

std::optional<bool> parse_bool(const std::string& raw) {
  std::string s = trim(raw);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  return std::nullopt;
}

std::optional<std::string> write_problem(const std::string& path) {
  namespace fs = std::filesystem;
  std::error_code ec;
  const fs::path p(path);
  if (fs::is_directory(p, ec)) return "is a directory";
  fs::path dir = p.parent_path();
  if (dir.empty()) dir = ".";
  if (!fs::is_directory(dir, ec)) return "directory " + dir.string() + " does not exist";
  if (fs::exists(p, ec)) {
    if (::access(path.c_str(), W_OK) != 0) return "file is not writable";
  } else if (::access(dir.c_str(), W_OK) != 0) {
    return "directory " + dir.string() + " is not writable";
  }
  return std::nullopt;
}

// Typed validation with error collection.
class Checker {
 public:
  Checker(const RunConfig& c, std::vector<std::string>& errs) : c_(c), errs_(errs) {}

  std::optional<double> real(const std::string& k) {
    const auto v = parse_real(c_.text(k));
    if (!v) bad(k, "malformed number");
    return v;
  }
  std::optional<long> integer(const std::string& k) {
    const auto v = parse_integer(c_.text(k));
    if (!v) bad(k, "malformed integer");
    return v;
  }
  std::optional<std::vector<double>> reals(const std::string& k) {
    const auto v = parse_reals(c_.text(k));
    if (!v) bad(k, "malformed comma-separated list of numbers");
    return v;
  }
  void require(bool ok, const std::string& msg) {
    if (!ok) errs_.push_back(msg);
  }
  void p_range(const std::string& k) {
    if (const auto p = real(k)) require(*p > 1.0 && *p < 2.0, k + " = " + c_.text(k) + " is outside (1, 2), the power-law peak range");
  }
  void positive(const std::string& k) {
    if (const auto v = real(k)) require(*v > 0.0, k + " = " + c_.text(k) + " must be > 0");
  }
  void at_least(const std::string& k, long lo) {
    if (const auto v = integer(k)) require(*v >= lo, k + " = " + c_.text(k) + " must be >= " + std::to_string(lo));
  }
  void sorted_list(const std::string& k, bool ascending, size_t min_size) {
    const auto v = reals(k);
    if (!v) return;
    require(v->size() >= min_size, k + " needs at least " + std::to_string(min_size) + " values");
    bool pos = true, order = true;
    for (size_t i = 0; i < v->size(); ++i) {
      pos = pos && (*v)[i] > 0.0;
      if (i > 0) order = order && (ascending ? (*v)[i] > (*v)[i - 1] : (*v)[i] < (*v)[i - 1]);
    }
    require(pos, k + " values must be > 0");
    require(order, k + (ascending ? " must be strictly ascending" : " must be strictly descending"));
  }

 private:
  void bad(const std::string& k, const std::string& what) { errs_.push_back(k + ": " + what + " '" + c_.text(k) + "'"); }
  const RunConfig& c_;
  std::vector<std::string>& errs_;
};

void validate_command(const RunConfig& c, std::vector<std::string>& errs) {
  Checker ck(c, errs);
  switch (c.command) {
    case Command::a1:
      ck.p_range("p");
      ck.at_least("n", 1);
      ck.positive("lambda");
      ck.at_least("k", 1);
      ck.positive("accuracy");
      ck.positive("tol");
      break;
    case Command::count:
      ck.p_range("p");
      ck.at_least("n", 1);
      ck.sorted_list("eps-list", false, 3);
      ck.positive("slope-tol");
      ck.positive("prefactor-tol");
      break;
    case Command::ball:
      ck.at_least("n", 1);
      if (const auto v = ck.reals("x-list")) {
        ck.require(std::all_of(v->begin(), v->end(), [](double x) { return x > 0.0; }), "x-list values must be > 0");
      }
      ck.positive("phi-bound");
      break;
    case Command::peak2d: {
      ck.p_range("p");
      ck.positive("eps");
      ck.positive("a");
      ck.at_least("k", 1);
      ck.at_least("tau-elements", 2);
      ck.at_least("max-unknowns", 1);
      ck.positive("tol");
      const auto p = parse_real(c.text("p")), eps = parse_real(c.text("eps")), a = parse_real(c.text("a"));
      if (const auto d = ck.real("delta-s")) {
        ck.require(*d >= 0.0, "delta-s must be >= 0");
        if (a) ck.require(*d < *a, "delta-s must be below a");
      }
      if (const auto r = ck.real("s-ratio")) ck.require(*r > 1.0, "s-ratio must be > 1");
      if (p && eps && a && *p > 1 && *p < 2 && *eps > 0 && *a > 0)
        ck.require(*eps * std::pow(*a, *p - 1.0) < 0.5, "eps a^(p-1) must be < 0.5");
      break;
    }
    case Command::thm1: {
      ck.p_range("p");
      ck.positive("m");
      ck.positive("delta");
      ck.at_least("j-max", 1);
      ck.sorted_list("alpha-list", true, 3);
      ck.positive("slope-tol");
      ck.at_least("max-unknowns", 1);
      const auto p = parse_real(c.text("p")), m = parse_real(c.text("m")), d = parse_real(c.text("delta"));
      if (p && m && d && *p > 1 && *p < 2 && *m > 0 && *d > 0)
        ck.require(*m * std::pow(*d, *p - 1.0) < 0.5, "m delta^(p-1) must be < 0.5");
      break;
    }
    case Command::thm2: {
      ck.p_range("p");
      ck.positive("m");
      ck.positive("B");
      ck.at_least("n", 1);
      ck.sorted_list("alpha-list", true, 3);
      ck.positive("delta");
      const auto p = parse_real(c.text("p")), m = parse_real(c.text("m")), d = parse_real(c.text("delta"));
      const auto two_d = parse_bool(c.text("direct-2d"));
      if (!two_d) errs.push_back("direct-2d: expected true or false, got '" + c.text("direct-2d") + "'");
      if (two_d && *two_d && p && m && d && *p > 1 && *p < 2 && *m > 0 && *d > 0)
        ck.require(*m * std::pow(*d, *p - 1.0) < 0.5, "m delta^(p-1) must be < 0.5");
      break;
    }
    case Command::weyl:
      if (const auto v = ck.reals("p-list"))
        for (double p : *v)
          ck.require(p > 1.0 && p < 2.0, "p-list value " + std::to_string(p) + " is outside (1, 2), the power-law peak range");
      ck.at_least("n", 1);
      ck.positive("tol");
      break;
  }
  Checker(c, errs).at_least("threads", 0);
}

std::string join(const std::vector<std::string>& v, const std::string& sep) {
  std::string out;
  for (size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + v[i];
  return out;
}

}  // namespace

std::string to_string(Command c) {
  switch (c) {
    case Command::a1: return "a1";
    case Command::count: return "count";
    case Command::ball: return "ball";
    case Command::peak2d: return "peak2d";
    case Command::thm1: return "thm1";
    case Command::thm2: return "thm2";
    case Command::weyl: return "weyl";
  }
  return "?";
}

const std::vector<Command>& all_commands() {
  static const std::vector<Command> v = {Command::a1,   Command::count, Command::ball, Command::peak2d,
                                         Command::thm1, Command::thm2,  Command::weyl};
  return v;
}

ValidationError::ValidationError(std::vector<std::string> v)
    : std::invalid_argument("invalid configuration:\n  " + join(v, "\n  ")), violations(std::move(v)) {}

const std::string& RunConfig::text(const std::string& key) const {
  const auto it = parameters.find(key);
  if (it == parameters.end()) throw std::out_of_range("no parameter '" + key + "'");
  return it->second;
}

double RunConfig::real(const std::string& key) const {
  const auto v = parse_real(text(key));
  if (!v) throw std::invalid_argument(key + ": malformed number");
  return *v;
}

long RunConfig::integer(const std::string& key) const {
  const auto v = parse_integer(text(key));
  if (!v) throw std::invalid_argument(key + ": malformed integer");
  return *v;
}

bool RunConfig::flag(const std::string& key) const {
  const auto v = parse_bool(text(key));
  if (!v) throw std::invalid_argument(key + ": expected true or false");
  return *v;
}

std::vector<double> RunConfig::reals(const std::string& key) const {
  const auto v = parse_reals(text(key));
  if (!v) throw std::invalid_argument(key + ": malformed list");
  return *v;
}

RunConfig parse_config(const std::vector<std::string>& args) {
  CLI::App app{"Spectral toolkit for Robin Laplacians on power-law peaks", "cusp-spectra"};
  app.set_version_flag("--version", CUSP_SPECTRA_VERSION);
  app.require_subcommand(1, 1);
  std::map<Command, std::map<std::string, std::string>> store;
  std::map<Command, std::string> config_file;
  std::map<Command, bool> print;
  std::map<Command, CLI::App*> subs;
  const std::map<Command, std::string> about = {
      {Command::a1, "eigenvalues of the one-dimensional comparison operator against the shooting oracle"},
      {Command::count, "eigenvalue counting law of the comparison operator"},
      {Command::ball, "ground state of the Robin unit ball"},
      {Command::peak2d, "two-dimensional model peak eigenvalues against the one-dimensional limit"},
      {Command::thm1, "eigenvalue asymptotics along an alpha ladder"},
      {Command::thm2, "threshold counting reduction"},
      {Command::weyl, "phase integral quadrature against the Beta closed form"},
  };
  for (Command c : all_commands()) {
    CLI::App* sub = app.add_subcommand(to_string(c), about.at(c));
    sub->allow_extras();
    sub->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    auto& st = store[c];
    for (const auto* list : {&command_params(c), &common_params()})
      for (const Param& prm : *list) {
        std::string help = prm.help + " [" + prm.def + "]";
        sub->add_option("--" + prm.key, st[prm.key], help)->type_name(type_label(prm));
      }
    sub->add_option("--config", config_file[c], "INI file; keys of section [" + to_string(c) + "] and top-level keys");
    sub->add_flag("--print-config", print[c], "print the resolved configuration and exit");
    subs[c] = sub;
  }

  std::vector<std::string> errs;
  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    std::ostringstream os;
    app.exit(e, os, os);
    throw InfoRequested(os.str());
  } catch (const CLI::CallForAllHelp& e) {
    std::ostringstream os;
    app.exit(e, os, os);
    throw InfoRequested(os.str());
  } catch (const CLI::CallForVersion& e) {
    std::ostringstream os;
    app.exit(e, os, os);
    throw InfoRequested(os.str());
  } catch (const CLI::ParseError& e) {
    throw ValidationError({e.what()});
  }

  RunConfig cfg;
  CLI::App* sub = nullptr;
  for (Command c : all_commands())
    if (subs[c]->parsed()) {
      cfg.command = c;
      sub = subs[c];
    }
  const Command c = cfg.command;
  cfg.print_config = print[c];

  std::map<std::string, Kind> known;
  for (const auto* list : {&command_params(c), &common_params()})
    for (const Param& prm : *list) {
      known[prm.key] = prm.kind;
      cfg.parameters[prm.key] = prm.def;
    }

  bool after_key = false;
  for (const std::string& extra : sub->remaining()) {
    if (extra.rfind("--", 0) == 0) {
      errs.push_back("unknown key '" + extra.substr(2) + "' for command " + to_string(c));
      after_key = true;
      continue;
    }
    if (extra.rfind("-", 0) == 0 && !parse_real(extra))
      errs.push_back("unknown option '" + extra + "'");
    else if (!after_key)
      errs.push_back("unexpected argument '" + extra + "'");
    after_key = false;
  }

  if (!config_file[c].empty()) {
    boost::property_tree::ptree tree;
    try {
      boost::property_tree::ini_parser::read_ini(config_file[c], tree);
      auto apply = [&](const std::string& raw, const std::string& value, const std::string& where) {
        std::string key = raw;
        std::replace(key.begin(), key.end(), '_', '-');
        if (!known.count(key))
          errs.push_back("unknown key '" + raw + "' in " + where + " of " + config_file[c]);
        else
          cfg.parameters[key] = trim(value);
      };
      for (const auto& [k, node] : tree) {
        if (node.empty()) {
          apply(k, node.data(), "top level");
        } else if (k == to_string(c)) {
          for (const auto& [k2, leaf] : node) apply(k2, leaf.data(), "section [" + k + "]");
        }
      }
    } catch (const boost::property_tree::ini_parser_error& e) {
      errs.push_back(std::string("config file: ") + e.what());
    }
  }

  for (const auto& [key, value] : store[c])
    if (sub->count("--" + key) > 0) cfg.parameters[key] = trim(value);

  // enumerations and paths
  for (const auto* list : {&command_params(c), &common_params()})
    for (const Param& prm : *list)
      if (prm.kind == Kind::choice &&
          std::find(prm.choices.begin(), prm.choices.end(), cfg.parameters[prm.key]) == prm.choices.end())
        errs.push_back(prm.key + " = '" + cfg.parameters[prm.key] + "' is not one of " + join(prm.choices, ", "));
  cfg.format = cfg.parameters["format"] == "json-lines" ? OutputFormat::json_lines : OutputFormat::csv;
  cfg.output_path = cfg.parameters["output"];
  if (cfg.output_path.empty()) errs.push_back("output: empty path");
  cfg.meta_path = cfg.parameters["meta"];
  if (cfg.meta_path.empty() && cfg.output_path != "-" && !cfg.output_path.empty())
    cfg.meta_path = cfg.output_path + ".meta.jsonl";
  cfg.parameters["meta"] = cfg.meta_path;
  if (cfg.output_path != "-" && !cfg.output_path.empty())
    if (const auto why = write_problem(cfg.output_path)) errs.push_back("output " + cfg.output_path + ": " + *why);
  if (!cfg.meta_path.empty()) {
    if (cfg.meta_path == cfg.output_path) errs.push_back("meta path equals the output path");
    if (const auto why = write_problem(cfg.meta_path)) errs.push_back("meta " + cfg.meta_path + ": " + *why);
  }

  validate_command(cfg, errs);
  if (!errs.empty()) throw ValidationError(errs);
  return cfg;
}

std::string render_config(const RunConfig& cfg) {
  std::string out = "[" + to_string(cfg.command) + "]\n";
  for (const auto& [k, v] : cfg.parameters) out += k + " = " + v + "\n";
  return out;
}

}  // namespace cusp::cli
