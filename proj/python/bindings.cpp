#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cvmet/applications.hpp"
#include "cvmet/bch.hpp"
#include "cvmet/cli.hpp"
#include "cvmet/qfi.hpp"

namespace py = pybind11;
using namespace cvmet;

namespace {

ProbeSpec make_probe(const std::string& kind, int n, Complex alpha, double r) {
  if (kind == "vacuum") return ProbeSpec::vacuum();
  if (kind == "fock") return ProbeSpec::fock(n);
  if (kind == "coherent") return ProbeSpec::coherent(alpha);
  if (kind == "squeezed_vacuum") return ProbeSpec::squeezed_vacuum(r);
  throw ValidationError("unknown probe kind '" + kind + "'");
}

Variant make_variant(const std::string& name) {
  if (name == "AB") return Variant::AB;
  if (name == "BA") return Variant::BA;
  throw ValidationError("variant must be AB or BA");
}

StrategyConfig make_config(const std::string& strategy, double theta1, double theta2, int n_queries,
                           int m, const std::string& probe, int probe_n, Complex alpha, double r) {
  StrategyConfig c;
  c.strategy = strategy_from_string(strategy);
  c.theta1 = theta1;
  c.theta2 = theta2;
  c.n_queries = n_queries;
  c.m = m;
  c.probe = make_probe(probe, probe_n, alpha, r);
  return c;
}

py::dict estimate_dict(const QfiEstimate& e) {
  py::dict d;
  d["value"] = e.value;
  d["method"] = to_string(e.method);
  d["step_used"] = e.step_used;
  d["converged"] = e.converged;
  d["diagnostics"] = e.diagnostics;
  return d;
}

py::object cell_object(const Cell& c) {
  return std::visit(
      [](const auto& v) -> py::object {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>)
          return py::none();
        else
          return py::cast(v);
      },
      c);
}

OptomechParams make_optomech(double g, double mass, double omega_c, double tau, int n_steps,
                             int mirror_dim) {
  OptomechParams p;
  p.g = g;
  p.mass = mass;
  p.omega_c = omega_c;
  p.tau = tau;
  p.n_steps = n_steps;
  p.mirror_dim = FockDim(mirror_dim);
  return p;
}

#define STRATEGY_ARGS                                                                           \
  py::arg("strategy") = "cs", py::arg("theta1") = 0.1, py::arg("theta2") = 0.1,                 \
  py::arg("n_queries") = 1, py::arg("m") = 1, py::arg("probe") = "vacuum", py::arg("probe_n") = 0, \
  py::arg("alpha") = Complex(0.0), py::arg("r") = 0.0

}  // namespace

PYBIND11_MODULE(_cvmet, mod) {
  mod.doc() = "Continuous-variable metrology with indefinite causal order";

  auto error = py::register_exception<Error>(mod, "CvmetError");
  auto validation = py::register_exception<ValidationError>(mod, "ValidationError", error.ptr());
  py::register_exception<InvalidDimension>(mod, "InvalidDimension", validation.ptr());
  py::register_exception<UnsupportedConfiguration>(mod, "UnsupportedConfiguration", validation.ptr());
  py::register_exception<UnidentifiableParameter>(mod, "UnidentifiableParameter", validation.ptr());
  auto nonconv = py::register_exception<NonConvergence>(mod, "NonConvergence", error.ptr());
  py::register_exception<EnvelopeViolation>(mod, "EnvelopeViolation", nonconv.ptr());
  py::register_exception<ContractViolation>(mod, "ContractViolation", error.ptr());

  mod.attr("__version__") = tool_version();

  mod.def(
      "strategy_state",
      [](const std::string& strategy, double theta1, double theta2, int n_queries, int m,
         const std::string& probe, int probe_n, Complex alpha, double r, int dim) {
        const StrategyConfig c = make_config(strategy, theta1, theta2, n_queries, m, probe, probe_n, alpha, r);
        return Vector(strategy_output(c, FockDim(dim)).amplitudes());
      },
      STRATEGY_ARGS, py::arg("dim") = 128,
      "Control-major output amplitudes (|0> block, then |1> block).");

  mod.def(
      "qfi",
      [](const std::string& strategy, double theta1, double theta2, int n_queries, int m,
         const std::string& probe, int probe_n, Complex alpha, double r, const std::string& parameter,
         const std::string& method) {
        const StrategyConfig c = make_config(strategy, theta1, theta2, n_queries, m, probe, probe_n, alpha, r);
        const Parameter which = parameter_from_string(parameter);
        QfiEstimate e;
        if (method == "finite_difference")
          e = qfi_fd_converged(c, which);
        else if (method == "generator_exact")
          e = qfi_generator_converged(c, which);
        else if (method == "asymptotic")
          e = asymptotic_qfi(c, which);
        else
          throw ValidationError("unknown method '" + method + "'");
        return estimate_dict(e);
      },
      STRATEGY_ARGS, py::arg("parameter") = "theta2", py::arg("method") = "generator_exact");

  mod.def(
      "precision_ratio",
      [](double theta1, double theta2, int n_queries, int m) {
        StrategyConfig c;
        c.theta1 = theta1;
        c.theta2 = theta2;
        c.n_queries = n_queries;
        c.m = m;
        const RatioResult r = precision_ratio(c);
        py::dict d;
        d["measured"] = r.measured;
        d["formula"] = r.formula;
        d["gate_passed"] = r.gate_passed;
        d["converged"] = r.converged;
        return d;
      },
      py::arg("theta1"), py::arg("theta2"), py::arg("n_queries"), py::arg("m"));

  mod.def("ratio_formula", &ratio_formula, py::arg("m"));

  mod.def(
      "expansion_terms",
      [](int m, const std::string& variant) {
        const Variant v = make_variant(variant);
        py::list out;
        for (const auto& [n, poly] : expansion_table(m, v).terms)
          for (const auto& [power, c] : poly.terms())
            out.append(py::make_tuple(n, power, c.re.str(), c.im.str()));
        return out;
      },
      py::arg("m"), py::arg("variant") = "AB",
      "(n, power of P, real part, imaginary part) with exact rational strings.");

  mod.def(
      "verify_factorization",
      [](int m, double lambda_im, int dim, const std::string& variant) {
        const Variant v = make_variant(variant);
        const FactorizationCheck f = verify_factorization(m, lambda_im, FockDim(dim), v);
        return py::make_tuple(f.residual, f.envelope_mass);
      },
      py::arg("m"), py::arg("lambda_im"), py::arg("dim") = 128, py::arg("variant") = "AB");

  mod.def(
      "homodyne_g_variance",
      [](double g, double mass, double omega_c, double tau, int n_steps, int mirror_dim, int cap) {
        const HomodyneResult h =
            homodyne_g_variance_adaptive(make_optomech(g, mass, omega_c, tau, n_steps, mirror_dim), cap);
        py::dict d;
        d["delta2_g"] = h.delta2_g;
        d["mean_x"] = h.mean_x;
        d["second_x"] = h.second_x;
        d["derivative"] = h.derivative;
        d["converged"] = h.converged;
        d["mirror_dim_used"] = h.mirror_dim_used;
        return d;
      },
      py::arg("g") = 0.1, py::arg("mass") = 1.0, py::arg("omega_c") = 1.0, py::arg("tau") = 0.2,
      py::arg("n_steps") = 8, py::arg("mirror_dim") = 256, py::arg("cap") = 1024);

  mod.def(
      "fit_scaling",
      [](const std::vector<std::pair<double, double>>& points, bool expect_power_law) {
        const ScalingFit f = fit_scaling(points, expect_power_law);
        py::dict d;
        d["slope"] = f.slope;
        d["intercept"] = f.intercept;
        d["r_squared"] = f.r_squared;
        d["power_law_ok"] = f.power_law_ok;
        return d;
      },
      py::arg("points"), py::arg("expect_power_law") = true);

  mod.def("default_config", &default_config_json);

  mod.def(
      "run",
      [](const std::string& command, const std::vector<std::string>& overrides,
         const std::string& config_json) {
        std::vector<std::string> all{"command=" + command};
        all.insert(all.end(), overrides.begin(), overrides.end());
        const CommandOutput out = execute(parse_config(config_json, all));
        py::list rows;
        for (const auto& row : out.table.rows) {
          py::dict d;
          for (size_t i = 0; i < row.size(); ++i) d[py::str(out.table.columns[i])] = cell_object(row[i]);
          rows.append(d);
        }
        py::dict summary;
        for (const auto& [k, v] : out.summary) summary[py::str(k)] = cell_object(v);
        py::dict result;
        result["columns"] = out.table.columns;
        result["rows"] = rows;
        result["summary"] = summary;
        result["status"] = out.status;
        result["csv"] = to_csv(out.table);
        return result;
      },
      py::arg("command"), py::arg("overrides") = std::vector<std::string>{},
      py::arg("config_json") = "");
}
