#include "cvmet/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "cvmet/bch.hpp"
#include "cvmet/claims.hpp"

namespace cvmet {
namespace {

using json = nlohmann::json;

QfiMethod method_from_string(const std::string& s) {
  if (s == "finite_difference" || s == "fd") return QfiMethod::finite_difference;
  if (s == "generator_exact" || s == "generator") return QfiMethod::generator_exact;
  if (s == "asymptotic") return QfiMethod::asymptotic;
  throw ValidationError("unknown QFI method '" + s + "'");
}

std::string probe_kind(ProbeSpec::Kind k) {
  switch (k) {
    case ProbeSpec::Kind::vacuum: return "vacuum";
    case ProbeSpec::Kind::fock: return "fock";
    case ProbeSpec::Kind::coherent: return "coherent";
    case ProbeSpec::Kind::squeezed_vacuum: return "squeezed_vacuum";
  }
  return "?";
}

json probe_to_json(const ProbeSpec& p) {
  return {{"kind", probe_kind(p.kind)},
          {"n", p.n},
          {"alpha", {p.alpha.real(), p.alpha.imag()}},
          {"r", p.r}};
}

ProbeSpec probe_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  const auto alpha = j.at("alpha").get<std::vector<double>>();
  if (alpha.size() != 2) throw ValidationError("probe.alpha must be [re, im]");
  if (kind == "vacuum") return ProbeSpec::vacuum();
  if (kind == "fock") {
    const int n = j.at("n").get<int>();
    if (n < 0) throw ValidationError("probe.n must be >= 0");
    return ProbeSpec::fock(n);
  }
  if (kind == "coherent") return ProbeSpec::coherent({alpha[0], alpha[1]});
  if (kind == "squeezed_vacuum") return ProbeSpec::squeezed_vacuum(j.at("r").get<double>());
  throw ValidationError("unknown probe kind '" + kind + "'");
}

json config_to_json(const RunConfig& c) {
  std::vector<std::string> methods;
  for (auto m : c.sweep_methods) methods.push_back(to_string(m));
  const auto& o = c.optomech;
  return {
      {"command", c.command},
      {"strategy",
       {{"name", to_string(c.strategy.strategy)},
        {"theta1", c.strategy.theta1},
        {"theta2", c.strategy.theta2},
        {"n_queries", c.strategy.n_queries},
        {"m", c.strategy.m},
        {"probe", probe_to_json(c.strategy.probe)}}},
      {"parameter", to_string(c.parameter)},
      {"method", to_string(c.method)},
      {"dimension", {{"start", c.loop.start}, {"cap", c.loop.cap}, {"rtol", c.loop.rtol}}},
      {"nu", c.nu},
      {"seed", c.seed},
      {"sweep", {{"param", c.sweep_param}, {"values", c.sweep_values}, {"methods", methods}}},
      {"ratio", {{"m", c.ratio_m}, {"n", c.ratio_n}}},
      {"bch", {{"m_max", c.bch_m_max}}},
      {"factorization",
       {{"m", c.factorization_m}, {"lambda", c.factorization_lambda}, {"dim", c.factorization_dim}}},
      {"optomech",
       {{"g", o.g},
        {"mass", o.mass},
        {"omega_c", o.omega_c},
        {"tau", o.tau},
        {"mirror_probe", probe_to_json(o.mirror_probe)},
        {"mirror_dim", o.mirror_dim.d},
        {"cavity_dim", o.cavity_dim.d},
        {"dim_cap", c.optomech_dim_cap},
        {"n", c.optomech_n}}},
      {"output", {{"csv", c.csv_path}, {"json", c.json_path}}},
  };
}

RunConfig config_from_json(const json& j) {
  RunConfig c;
  c.command = j.at("command").get<std::string>();
  const json& s = j.at("strategy");
  c.strategy.strategy = strategy_from_string(s.at("name").get<std::string>());
  c.strategy.theta1 = s.at("theta1").get<double>();
  c.strategy.theta2 = s.at("theta2").get<double>();
  c.strategy.n_queries = s.at("n_queries").get<int>();
  c.strategy.m = s.at("m").get<int>();
  c.strategy.probe = probe_from_json(s.at("probe"));
  c.parameter = parameter_from_string(j.at("parameter").get<std::string>());
  c.method = method_from_string(j.at("method").get<std::string>());
  c.loop.start = j.at("dimension").at("start").get<int>();
  c.loop.cap = j.at("dimension").at("cap").get<int>();
  c.loop.rtol = j.at("dimension").at("rtol").get<double>();
  c.nu = j.at("nu").get<int>();
  c.seed = j.at("seed").get<long long>();
  c.sweep_param = j.at("sweep").at("param").get<std::string>();
  c.sweep_values = j.at("sweep").at("values").get<std::vector<double>>();
  c.sweep_methods.clear();
  for (const auto& m : j.at("sweep").at("methods")) c.sweep_methods.push_back(method_from_string(m));
  c.ratio_m = j.at("ratio").at("m").get<std::vector<int>>();
  c.ratio_n = j.at("ratio").at("n").get<std::vector<int>>();
  c.bch_m_max = j.at("bch").at("m_max").get<int>();
  c.factorization_m = j.at("factorization").at("m").get<std::vector<int>>();
  c.factorization_lambda = j.at("factorization").at("lambda").get<std::vector<double>>();
  c.factorization_dim = j.at("factorization").at("dim").get<int>();
  const json& o = j.at("optomech");
  c.optomech.g = o.at("g").get<double>();
  c.optomech.mass = o.at("mass").get<double>();
  c.optomech.omega_c = o.at("omega_c").get<double>();
  c.optomech.tau = o.at("tau").get<double>();
  c.optomech.mirror_probe = probe_from_json(o.at("mirror_probe"));
  c.optomech.mirror_dim = FockDim(o.at("mirror_dim").get<int>());
  c.optomech.cavity_dim = FockDim(o.at("cavity_dim").get<int>());
  c.optomech_dim_cap = o.at("dim_cap").get<int>();
  c.optomech_n = o.at("n").get<std::vector<int>>();
  c.csv_path = j.at("output").at("csv").get<std::string>();
  c.json_path = j.at("output").at("json").get<std::string>();
  return c;
}

void merge_into(json& base, const json& patch, const std::string& path) {
  if (!patch.is_object()) throw ValidationError("config " + (path.empty() ? "root" : path) +
                                                " must be an object");
  for (auto it = patch.begin(); it != patch.end(); ++it) {
    const std::string key = path.empty() ? it.key() : path + "." + it.key();
    if (!base.contains(it.key())) throw ValidationError("unknown config key '" + key + "'");
    json& slot = base[it.key()];
    if (slot.is_object())
      merge_into(slot, it.value(), key);
    else
      slot = it.value();
  }
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw ValidationError("--set expects key=value, got '" + assignment + "'");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  json* slot = &doc;
  std::stringstream parts(key);
  std::string part;
  while (std::getline(parts, part, '.')) {
    if (!slot->is_object() || !slot->contains(part))
      throw ValidationError("unknown config key '" + key + "'");
    slot = &(*slot)[part];
  }
  if (slot->is_object()) throw ValidationError("'" + key + "' is a section, not a value");
  *slot = value;
}

template <class T>
bool strictly_increasing(const std::vector<T>& v) {
  return std::adjacent_find(v.begin(), v.end(), [](T a, T b) { return !(a < b); }) == v.end();
}

bool is_whole(double v) { return std::isfinite(v) && v == std::floor(v); }

// ---- command bodies -------------------------------------------------------

Cell opt_double(bool present, double v) { return present ? Cell(v) : Cell(); }

CommandOutput cmd_qfi(const RunConfig& c) {
  QfiEstimate f;
  switch (c.method) {
    case QfiMethod::finite_difference: f = qfi_fd_converged(c.strategy, c.parameter, c.loop); break;
    case QfiMethod::generator_exact:
      f = qfi_generator_converged(c.strategy, c.parameter, c.loop);
      break;
    case QfiMethod::asymptotic: f = asymptotic_qfi(c.strategy, c.parameter); break;
  }
  CommandOutput out;
  out.table.columns = {"strategy", "m",         "N",     "theta1",   "theta2",    "parameter",
                       "method",   "F",         "nu",    "delta_theta", "step_used", "converged",
                       "dim_used"};
  Cell delta;
  if (f.value > 0.0) delta = crb_precision(f, c.nu).delta_theta;
  const auto dim = f.diagnostics.find("dim_used");
  out.table.rows.push_back({to_string(c.strategy.strategy), (long long)c.strategy.m,
                            (long long)c.strategy.n_queries, c.strategy.theta1, c.strategy.theta2,
                            to_string(c.parameter), to_string(f.method), f.value, (long long)c.nu,
                            delta, opt_double(f.method == QfiMethod::finite_difference, f.step_used),
                            f.converged,
                            dim == f.diagnostics.end() ? Cell() : Cell((long long)dim->second)});
  if (!f.converged) out.status = 2;
  return out;
}

std::vector<Cell> sweep_row(const RunConfig& c, const StrategyConfig& s) {
  auto has = [&](QfiMethod m) {
    return std::find(c.sweep_methods.begin(), c.sweep_methods.end(), m) != c.sweep_methods.end();
  };
  std::optional<QfiEstimate> fd, gen, asym;
  if (has(QfiMethod::finite_difference)) fd = qfi_fd_converged(s, c.parameter, c.loop);
  if (has(QfiMethod::generator_exact)) {
    try {
      gen = qfi_generator_converged(s, c.parameter, c.loop);
    } catch (const UnsupportedConfiguration&) {
    }
  }
  if (has(QfiMethod::asymptotic)) {
    try {
      asym = asymptotic_qfi(s, c.parameter);
    } catch (const UnsupportedConfiguration&) {
    }
  }
  const QfiEstimate* source = gen ? &*gen : (fd ? &*fd : nullptr);
  Cell delta;
  if (source && source->value > 0.0) delta = crb_precision(*source, c.nu).delta_theta;
  bool converged = true;
  if (fd) converged = converged && fd->converged;
  if (gen) converged = converged && gen->converged;
  Cell dim;
  if (source) {
    const auto it = source->diagnostics.find("dim_used");
    if (it != source->diagnostics.end()) dim = (long long)it->second;
  }
  return {(long long)s.n_queries, (long long)s.m, s.theta1, s.theta2, to_string(s.strategy),
          fd ? Cell(fd->value) : Cell(), gen ? Cell(gen->value) : Cell(),
          asym ? Cell(asym->value) : Cell(), delta, converged, dim};
}

CommandOutput cmd_sweep(const RunConfig& c) {
  std::vector<StrategyConfig> points;
  for (double v : c.sweep_values) {
    StrategyConfig s = c.strategy;
    if (c.sweep_param == "n_queries" || c.sweep_param == "N") {
      s.n_queries = static_cast<int>(v);
    } else if (c.sweep_param == "m") {
      s.m = static_cast<int>(v);
    } else if (c.sweep_param == "theta1") {
      s.theta1 = v;
    } else {
      s.theta2 = v;
    }
    points.push_back(s);
  }

  // Points are independent; evaluate in batches, keep sweep order.
  CommandOutput out;
  out.table.columns = {"N",     "m",     "theta1",      "theta2",    "strategy", "F_fd",
                       "F_gen", "F_asym", "delta_theta", "converged", "dim_used"};
  out.table.rows.resize(points.size());
  const std::size_t width = std::max(1u, std::thread::hardware_concurrency());
  for (std::size_t first = 0; first < points.size(); first += width) {
    std::vector<std::future<std::vector<Cell>>> batch;
    const std::size_t last = std::min(points.size(), first + width);
    for (std::size_t i = first; i < last; ++i)
      batch.push_back(std::async(std::launch::async, sweep_row, std::cref(c), points[i]));
    for (std::size_t i = first; i < last; ++i) out.table.rows[i] = batch[i - first].get();
  }
  for (const auto& row : out.table.rows)
    if (!std::get<bool>(row[9])) out.status = 2;
  return out;
}

CommandOutput cmd_ratio(const RunConfig& c) {
  CommandOutput out;
  out.table.columns = {"m", "N", "ratio_measured", "ratio_formula", "gate_passed", "converged"};
  for (int m : c.ratio_m) {
    for (int n : c.ratio_n) {
      StrategyConfig s = c.strategy;
      s.m = m;
      s.n_queries = n;
      const RatioResult r = precision_ratio(s, c.method, c.loop);
      out.table.rows.push_back(
          {(long long)m, (long long)n, r.measured, r.formula, r.gate_passed, r.converged});
      if (!r.converged) out.status = 2;
    }
  }
  return out;
}

CommandOutput cmd_bch(const RunConfig& c) {
  CommandOutput out;
  out.table.columns = {"m", "n", "variant", "power", "coeff_re", "coeff_im"};
  for (int m = 1; m <= c.bch_m_max; ++m) {
    for (Variant v : {Variant::AB, Variant::BA}) {
      for (const auto& [n, poly] : expansion_table(m, v).terms) {
        for (const auto& [power, coeff] : poly.terms())
          out.table.rows.push_back({(long long)m, (long long)n, to_string(v), (long long)power,
                                    coeff.re.str(), coeff.im.str()});
      }
    }
  }
  return out;
}

CommandOutput cmd_factorization(const RunConfig& c) {
  CommandOutput out;
  out.table.columns = {"m", "lambda", "dim", "variant", "residual", "envelope_mass", "status"};
  for (int m : c.factorization_m) {
    for (double lam : c.factorization_lambda) {
      for (Variant v : {Variant::AB, Variant::BA}) {
        std::vector<Cell> row{(long long)m, lam, (long long)c.factorization_dim, to_string(v)};
        try {
          const FactorizationCheck r = verify_factorization(m, lam, FockDim(c.factorization_dim), v);
          row.insert(row.end(), {r.residual, r.envelope_mass, std::string("ok")});
        } catch (const EnvelopeViolation& e) {
          row.insert(row.end(), {Cell(), e.mass(), std::string("envelope_violation")});
          out.status = 2;
        }
        out.table.rows.push_back(std::move(row));
      }
    }
  }
  return out;
}

CommandOutput cmd_optomech(const RunConfig& c) {
  CommandOutput out;
  out.table.columns = {"N", "delta2_g", "delta2_g_g2_N6", "mean_x", "dmean_x_dg", "mirror_dim",
                       "converged"};
  std::vector<std::pair<double, double>> pts;
  for (int n : c.optomech_n) {
    OptomechParams p = c.optomech;
    p.n_steps = n;
    const HomodyneResult h = homodyne_g_variance_adaptive(p, c.optomech_dim_cap);
    const double scaled = h.delta2_g * p.g * p.g * std::pow(n, 6);
    out.table.rows.push_back({(long long)n, h.delta2_g, scaled, h.mean_x, h.derivative,
                              (long long)h.mirror_dim_used, h.converged});
    pts.emplace_back(n, h.delta2_g);
    if (!h.converged) out.status = 2;
  }
  if (pts.size() >= 4) {
    const ScalingFit fit = fit_scaling(pts);
    out.summary = {{"fit_slope", fit.slope},
                   {"fit_intercept", fit.intercept},
                   {"fit_r_squared", fit.r_squared},
                   {"fit_points", (long long)pts.size()}};
  }
  return out;
}

CommandOutput cmd_claims(const RunConfig& c) {
  CommandOutput out;
  out.table.columns = {"criterion", "name", "status", "detail", "seconds"};
  for (const ClaimResult& r : run_claims(c)) {
    out.table.rows.push_back({(long long)r.id, r.name, std::string(r.passed ? "PASS" : "FAIL"),
                              r.detail, r.seconds});
    if (!r.passed) out.status = 1;
  }
  return out;
}

std::string cell_text(const Cell& cell) {
  struct {
    std::string operator()(std::monostate) const { return ""; }
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(long long v) const { return std::to_string(v); }
    std::string operator()(double v) const { return format_double(v); }
    std::string operator()(bool v) const { return v ? "true" : "false"; }
  } visit;
  return std::visit(visit, cell);
}

std::string cell_json(const Cell& cell) {
  if (std::holds_alternative<std::monostate>(cell)) return "null";
  if (const auto* s = std::get_if<std::string>(&cell)) return json(*s).dump();
  if (const auto* d = std::get_if<double>(&cell)) return std::isfinite(*d) ? format_double(*d) : "null";
  return cell_text(cell);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot open '" + path + "' for writing");
  f << content;
  if (!f) throw ValidationError("failed writing '" + path + "'");
}

}  // namespace

std::string tool_version() { return CVMET_VERSION; }

std::string default_config_json() { return config_to_json(RunConfig{}).dump(2) + "\n"; }

RunConfig parse_config(const std::string& json_text, const std::vector<std::string>& overrides) {
  json doc = config_to_json(RunConfig{});
  try {
    if (!json_text.empty()) merge_into(doc, json::parse(json_text), "");
    for (const auto& o : overrides) apply_override(doc, o);
    RunConfig cfg = config_from_json(doc);
    validate(cfg);
    return cfg;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot read config '" + path + "'");
  std::stringstream buf;
  buf << f.rdbuf();
  return parse_config(buf.str(), overrides);
}

void validate(const RunConfig& c) {
  const auto& names = command_names();
  if (std::find(names.begin(), names.end(), c.command) == names.end())
    throw ValidationError("unknown command '" + c.command + "'");
  const auto& s = c.strategy;
  if (s.n_queries < 1) throw ValidationError("strategy.n_queries must be >= 1");
  if (s.m < 1) throw ValidationError("strategy.m must be >= 1");
  if (!std::isfinite(s.theta1) || !std::isfinite(s.theta2))
    throw ValidationError("theta values must be finite");
  if (c.nu < 1) throw ValidationError("nu must be >= 1");
  if (c.loop.start < 4 || c.loop.cap < c.loop.start || !(c.loop.rtol > 0.0))
    throw ValidationError("dimension loop needs 4 <= start <= cap and rtol > 0");

  if (c.command == "sweep") {
    if (c.sweep_values.empty()) throw ValidationError("sweep.values is empty");
    if (!strictly_increasing(c.sweep_values))
      throw ValidationError("sweep.values must be strictly increasing");
    const std::string& p = c.sweep_param;
    if (p != "n_queries" && p != "N" && p != "m" && p != "theta1" && p != "theta2")
      throw ValidationError("sweep.param must be one of n_queries, m, theta1, theta2");
    if (p == "n_queries" || p == "N" || p == "m")
      for (double v : c.sweep_values)
        if (!is_whole(v) || v < 1) throw ValidationError("sweep.values must be integers >= 1");
    if (c.sweep_methods.empty()) throw ValidationError("sweep.methods is empty");
  }
  if (c.command == "ratio") {
    if (c.ratio_m.empty() || c.ratio_n.empty()) throw ValidationError("ratio.m and ratio.n are required");
    if (!strictly_increasing(c.ratio_n)) throw ValidationError("ratio.n must be strictly increasing");
    for (int m : c.ratio_m)
      if (m < 1) throw ValidationError("ratio.m entries must be >= 1");
    for (int n : c.ratio_n)
      if (n < 1) throw ValidationError("ratio.n entries must be >= 1");
  }
  if (c.command == "bch-table" && (c.bch_m_max < 1 || c.bch_m_max > 32))
    throw ValidationError("bch.m_max must be in [1, 32]");
  if (c.command == "factorization-check") {
    if (c.factorization_m.empty() || c.factorization_lambda.empty())
      throw ValidationError("factorization.m and factorization.lambda are required");
    for (int m : c.factorization_m)
      if (m < 1 || c.factorization_dim < 2 * m + 2)
        throw ValidationError("factorization.dim must be >= 2m + 2 for every m");
  }
  if (c.command == "optomech") {
    validate(c.optomech);
    if (c.optomech_n.empty()) throw ValidationError("optomech.n is empty");
    if (!strictly_increasing(c.optomech_n))
      throw ValidationError("optomech.n must be strictly increasing");
    if (c.optomech_n.front() < 1) throw ValidationError("optomech.n entries must be >= 1");
  }
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::scientific << std::setprecision(16) << v;
  return os.str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

std::string to_csv(const Table& t) {
  std::string out = "# cvmet " + tool_version() + "\n";
  auto line = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out += ',';
      out += csv_field(fields[i]);
    }
    out += '\n';
  };
  line(t.columns);
  for (const auto& row : t.rows) {
    std::vector<std::string> fields;
    for (const auto& cell : row) fields.push_back(cell_text(cell));
    line(fields);
  }
  return out;
}

std::string to_json(const CommandOutput& out) {
  std::string s = "{\n  \"tool\": " + json("cvmet " + tool_version()).dump() + ",\n  \"columns\": [";
  for (std::size_t i = 0; i < out.table.columns.size(); ++i)
    s += (i ? ", " : "") + json(out.table.columns[i]).dump();
  s += "],\n  \"rows\": [";
  for (std::size_t r = 0; r < out.table.rows.size(); ++r) {
    s += r ? ",\n    {" : "\n    {";
    const auto& row = out.table.rows[r];
    for (std::size_t i = 0; i < row.size(); ++i)
      s += (i ? ", " : "") + json(out.table.columns[i]).dump() + ": " + cell_json(row[i]);
    s += "}";
  }
  s += out.table.rows.empty() ? "],\n" : "\n  ],\n";
  s += "  \"summary\": {";
  for (std::size_t i = 0; i < out.summary.size(); ++i)
    s += (i ? ", " : "") + json(out.summary[i].first).dump() + ": " + cell_json(out.summary[i].second);
  s += "}\n}\n";
  return s;
}

CommandOutput execute(const RunConfig& c) {
  validate(c);
  if (c.command == "qfi") return cmd_qfi(c);
  if (c.command == "sweep") return cmd_sweep(c);
  if (c.command == "ratio") return cmd_ratio(c);
  if (c.command == "bch-table") return cmd_bch(c);
  if (c.command == "factorization-check") return cmd_factorization(c);
  if (c.command == "optomech") return cmd_optomech(c);
  return cmd_claims(c);
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Continuous-variable metrology with indefinite causal order"};
  std::string command;
  std::string config_path;
  std::vector<std::string> sets;
  std::string out_path;
  std::string json_path;
  app.add_option("command", command, "Command to run")
      ->required()
      ->check(CLI::IsMember(command_names()));
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--set", sets, "Override a config value: dotted.key=value")->allow_extra_args(false);
  app.add_option("--out", out_path, "CSV output path (default: stdout)");
  app.add_option("--json", json_path, "JSON mirror output path");
  bool dump = false;
  app.add_flag("--dump-config", dump, "Print the effective config as JSON and exit");
  app.set_version_flag("--version", "cvmet " + tool_version());

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    std::vector<std::string> overrides = sets;
    overrides.push_back("command=\"" + command + "\"");
    RunConfig cfg = config_path.empty() ? parse_config("", overrides)
                                        : load_config(config_path, overrides);
    if (!out_path.empty()) cfg.csv_path = out_path;
    if (!json_path.empty()) cfg.json_path = json_path;
    if (dump) {
      std::cout << config_to_json(cfg).dump(2) << "\n";
      return 0;
    }

    const CommandOutput out = execute(cfg);
    const std::string csv = to_csv(out.table);
    if (cfg.csv_path.empty())
      std::cout << csv << std::flush;
    else
      write_file(cfg.csv_path, csv);
    if (!cfg.json_path.empty()) write_file(cfg.json_path, to_json(out));
    for (const auto& [key, value] : out.summary) std::cerr << key << " = " << cell_text(value) << "\n";
    return out.status;
  } catch (const ValidationError& e) {
    std::cerr << "cvmet: validation error: " << e.what() << "\n";
    return 1;
  } catch (const NonConvergence& e) {
    std::cerr << "cvmet: did not converge: " << e.what() << "\n";
    return 2;
  } catch (const ContractViolation& e) {
    std::cerr << "cvmet: contract violation: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "cvmet: internal error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace cvmet
