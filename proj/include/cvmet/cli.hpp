#pragma once

// Batch front end: JSON config, commands, CSV / JSON emitters.
//
//   cvmet <command> --config path.json [--set key=value]... [--out path.csv]
//
// Exit codes: 0 ok, 1 validation failure, 2 non-convergence, 3 contract
// violation.

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cvmet/applications.hpp"
#include "cvmet/qfi.hpp"

namespace cvmet {

std::string tool_version();

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{
      "qfi", "sweep", "ratio", "bch-table", "factorization-check", "optomech", "claims"};
  return names;
}

struct RunConfig {
  std::string command = "qfi";
  StrategyConfig strategy;
  Parameter parameter = Parameter::theta2;
  QfiMethod method = QfiMethod::generator_exact;
  DimensionLoop loop;
  int nu = 1;
  long long seed = 0;  // reserved

  // sweep
  std::string sweep_param = "n_queries";
  std::vector<double> sweep_values{2, 4, 6, 8};
  std::vector<QfiMethod> sweep_methods{QfiMethod::finite_difference, QfiMethod::generator_exact,
                                       QfiMethod::asymptotic};
  // ratio
  std::vector<int> ratio_m{1, 2, 3};
  std::vector<int> ratio_n{100, 200, 400, 800};
  // bch-table
  int bch_m_max = 6;
  // factorization-check
  std::vector<int> factorization_m{1, 2, 3};
  std::vector<double> factorization_lambda{0.1, 0.2, 0.3};
  int factorization_dim = 128;
  // optomech
  OptomechParams optomech;
  int optomech_dim_cap = 1024;
  std::vector<int> optomech_n{8, 10, 12, 14, 16, 18, 20, 22, 24};

  std::string csv_path;
  std::string json_path;
};

/// Defaults as a JSON document (the layout of every config file).
std::string default_config_json();

/// Merges the JSON text over the defaults, applies dotted key=value
/// overrides (values parsed as JSON, else taken as strings), validates.
/// Unknown keys are rejected.
RunConfig parse_config(const std::string& json_text,
                       const std::vector<std::string>& overrides = {});
RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

/// Throws ValidationError on inconsistent settings.
void validate(const RunConfig& cfg);

using Cell = std::variant<std::monostate, std::string, long long, double, bool>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

struct CommandOutput {
  Table table;
  std::vector<std::pair<std::string, Cell>> summary;
  /// 0, or 2 when some row did not converge, or 1 when a claim failed.
  int status = 0;
};

/// 17 significant digits, scientific notation; "nan", "inf", "-inf".
std::string format_double(double v);

/// RFC-4180 field quoting.
std::string csv_field(const std::string& s);

/// "# cvmet <version>" line, header row, body; '\n' line endings.
std::string to_csv(const Table& t);
/// {"tool": ..., "columns": [...], "rows": [{...}], "summary": {...}}.
std::string to_json(const CommandOutput& out);

CommandOutput execute(const RunConfig& cfg);

/// Full command-line entry point; returns the exit code.
int run_cli(int argc, char** argv);

}  // namespace cvmet
