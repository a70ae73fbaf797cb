#pragma once

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "cusp/asymptotics.hpp"

namespace cusp::cli {

enum class Command { a1, count, ball, peak2d, thm1, thm2, weyl };
enum class OutputFormat { csv, json_lines };

std::string to_string(Command c);
const std::vector<Command>& all_commands();

struct RunConfig {
  Command command = Command::a1;
  // every key of the command, resolved (flag > file > default), canonical text
  std::map<std::string, std::string> parameters;
  std::string output_path = "-";  // "-" is standard output
  std::string meta_path;          // empty: no sidecar
  OutputFormat format = OutputFormat::csv;
  bool print_config = false;

  double real(const std::string& key) const;
  long integer(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::vector<double> reals(const std::string& key) const;
  const std::string& text(const std::string& key) const;
};

// All violations found while parsing and validating, one per entry.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(std::vector<std::string> violations);
  std::vector<std::string> violations;
};

// --help / --version: carries the text to print, exit code 0.
class InfoRequested : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// args excludes the program name. Reads the INI file named by --config
// ([command] section and top-level keys); flags override file values.
RunConfig parse_config(const std::vector<std::string>& args);

// Fully resolved configuration as INI text.
std::string render_config(const RunConfig& config);

// 12 significant digits, round-half-even on the binary value, C locale.
std::string format_number(double v);
std::string format_csv(const ExperimentReport& report);
std::string format_table_jsonl(const ExperimentReport& report);
std::string format_meta(const ExperimentReport& report, const RunConfig& config);
struct CsvRow {
  double control, computed, predicted, ratio;
};
std::vector<CsvRow> parse_csv(const std::string& text);

// Writes the table (CSV or json-lines) to the output path, or `out` for "-",
// and the sidecar metadata line to meta_path.
void emit_report(const ExperimentReport& report, const RunConfig& config, std::ostream& out);

ExperimentReport run_command(const RunConfig& config);

// 0 pass or inconclusive, 1 fail, 2 invalid input, 3 computation failure.
int exit_code(Verdict v);
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cusp::cli
