#include "cvmet/qfi.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "cvmet/bch.hpp"

namespace cvmet {
namespace {

constexpr double kFdAgreement = 1e-4;
constexpr int kFdReductions = 3;

int effective_order(const StrategyConfig& cfg) {
  return cfg.strategy == Strategy::composite ? 1 : cfg.m;
}

// Probe prepared at the smallest power-of-two dimension (>= 64) that holds
// it without truncation leakage.
CvState settled_probe(const ProbeSpec& probe) {
  for (int d = 64; d <= 4096; d *= 2) {
    try {
      return prepare_probe(probe, FockDim(d));
    } catch (const EnvelopeViolation&) {
    }
  }
  throw NonConvergence("probe does not fit below d = 4096");
}

struct BranchGenerator {
  Operator g;
  double sign;
};

}  // namespace

std::string to_string(QfiMethod m) {
  switch (m) {
    case QfiMethod::finite_difference: return "finite_difference";
    case QfiMethod::generator_exact: return "generator_exact";
    case QfiMethod::asymptotic: return "asymptotic";
  }
  return "?";
}

std::string to_string(Parameter p) { return p == Parameter::theta1 ? "theta1" : "theta2"; }

Parameter parameter_from_string(const std::string& name) {
  if (name == "theta1") return Parameter::theta1;
  if (name == "theta2") return Parameter::theta2;
  throw ValidationError("unknown parameter '" + name + "' (expected theta1 or theta2)");
}

double PrecisionResult::scaled() const { return delta_theta * std::sqrt(static_cast<double>(nu)); }

double qfi_from_derivative(const Vector& psi, const Vector& dpsi) {
  if (psi.size() != dpsi.size()) throw InvalidDimension("state and derivative lengths differ");
  const double f = 4.0 * (dpsi.squaredNorm() - std::norm(dpsi.dot(psi)));
  return std::max(f, 0.0);
}

double default_fd_step(double theta) { return 1e-4 * std::max(1.0, std::abs(theta)); }

QfiEstimate qfi_fd(const StateBuilder& builder, double theta0, double step) {
  if (!(step > 0.0)) throw ValidationError("finite-difference step must be positive");
  const Vector psi = builder(theta0);
  auto derivative = [&](double h) { return Vector((builder(theta0 + h) - builder(theta0 - h)) / (2.0 * h)); };

  QfiEstimate out;
  out.method = QfiMethod::finite_difference;
  double h = step;
  for (int attempt = 0; attempt <= kFdReductions; ++attempt) {
    const Vector d_h = derivative(h);
    const Vector d_half = derivative(0.5 * h);
    const double f_h = qfi_from_derivative(psi, d_h);
    const double f_half = qfi_from_derivative(psi, d_half);
    const double scale = std::max(f_h, f_half);
    const Vector richardson = (4.0 * d_half - d_h) / 3.0;
    out.value = qfi_from_derivative(psi, richardson);
    out.step_used = h;
    out.diagnostics["f_step"] = f_h;
    out.diagnostics["f_half_step"] = f_half;
    out.diagnostics["richardson_residual"] = scale > 0.0 ? std::abs(f_h - f_half) / scale : 0.0;
    out.diagnostics["step_reductions"] = attempt;
    if (std::abs(f_h - f_half) <= kFdAgreement * scale || scale <= 1e-12) {
      out.converged = true;
      return out;
    }
    h *= 0.25;
  }
  out.converged = false;
  return out;
}

StateBuilder strategy_builder(const StrategyConfig& cfg, Parameter which, FockDim dim) {
  return [cfg, which, dim](double theta) {
    StrategyConfig c = cfg;
    (which == Parameter::theta1 ? c.theta1 : c.theta2) = theta;
    return Vector(strategy_output(c, dim).amplitudes());
  };
}

QfiEstimate qfi_fd_converged(const StrategyConfig& cfg, Parameter which, const DimensionLoop& loop) {
  const double theta0 = which == Parameter::theta1 ? cfg.theta1 : cfg.theta2;
  const int order = effective_order(cfg);
  std::optional<QfiEstimate> last;
  const DimensionResult dims = converge_in_dimension(
      [&](FockDim dim) {
        const QState centre = strategy_output(cfg, dim);
        const double mass = envelope_mass(centre, order);
        if (mass > kEnvelopeLimit)
          throw EnvelopeViolation("strategy output reaches the truncation edge", mass);
        last = qfi_fd(strategy_builder(cfg, which, dim), theta0, default_fd_step(theta0));
        return last->value;
      },
      loop);
  QfiEstimate out;
  out.method = QfiMethod::finite_difference;
  if (!last) {
    out.value = std::numeric_limits<double>::quiet_NaN();
    out.converged = false;
    out.diagnostics["dim_used"] = dims.dim_used;
    return out;
  }
  out = *last;
  out.value = dims.value;
  out.converged = out.converged && dims.converged;
  out.diagnostics["dim_used"] = dims.dim_used;
  out.diagnostics["dim_previous_value"] = dims.previous;
  return out;
}

QfiEstimate qfi_generator(const StrategyConfig& cfg, Parameter which, FockDim dim) {
  if (cfg.n_queries < 1) throw ValidationError("n_queries must be >= 1");
  const int m = effective_order(cfg);
  if (cfg.m < 1) throw ValidationError("nonlinearity order m must be >= 1");
  if (cfg.strategy == Strategy::composite && cfg.m != 1)
    throw UnsupportedConfiguration("the composite realization exists for m = 1 only");
  if (which == Parameter::theta1 && m > 1)
    throw UnsupportedConfiguration(
        "exact theta1 generators are available for m = 1 only; use finite differences");

  const CvState probe = prepare_probe(cfg.probe, dim);
  const double mass = tail_mass(probe.amplitudes(), dim.d - 2 * m);
  if (mass > kEnvelopeLimit)
    throw EnvelopeViolation("probe too close to the truncation edge for P^m moments", mass);

  const double n = cfg.n_queries;
  const bool is_switch = cfg.strategy == Strategy::quantum_switch;
  std::vector<BranchGenerator> branches;
  if (which == Parameter::theta2) {
    if (is_switch) {
      branches.push_back({to_operator(NumericPoly::monomial(m, Complex(n)), dim), +1.0});
      branches.push_back(
          {to_operator(phase_derivative_generator(m, cfg.theta1, cfg.n_queries,
                                                  BranchKind::switch_branch),
                       dim),
           +1.0});
    } else {
      const Operator g = to_operator(
          phase_derivative_generator(m, cfg.theta1, cfg.n_queries, BranchKind::cs_branch), dim);
      branches.push_back({g, +1.0});
      branches.push_back({g, -1.0});
    }
  } else {
    // m = 1: Heisenberg-shifted position generators.
    const Operator x = build_quadrature(dim, Quadrature::X);
    const Operator id = Operator::identity(dim);
    if (is_switch) {
      branches.push_back({x * n + id * (n * n * cfg.theta2), +1.0});
      branches.push_back({x * n, +1.0});
    } else {
      branches.push_back({x * (2.0 * n) + id * (2.0 * n * n * cfg.theta2), +1.0});
      branches.push_back({x * (2.0 * n) - id * (2.0 * n * n * cfg.theta2), +1.0});
    }
  }

  double second = 0.0;
  double first_sq = 0.0;
  Complex mean = 0.0;
  for (const auto& b : branches) {
    const double g1 = raw_moment(probe.amplitudes(), b.g, 1).real();
    const double g2 = raw_moment(probe.amplitudes(), b.g, 2).real();
    second += 0.5 * g2;
    first_sq += 0.5 * g1 * g1;
    mean += 0.5 * b.sign * g1;
  }
  QfiEstimate out;
  out.method = QfiMethod::generator_exact;
  out.value = std::max(0.0, 4.0 * (second - std::norm(mean)));
  out.converged = true;
  out.diagnostics["squared_expectation"] = 4.0 * (first_sq - std::norm(mean));
  out.diagnostics["dim_used"] = dim.d;
  return out;
}

QfiEstimate qfi_generator_converged(const StrategyConfig& cfg, Parameter which,
                                    const DimensionLoop& loop) {
  std::optional<QfiEstimate> last;
  const DimensionResult dims = converge_in_dimension(
      [&](FockDim dim) {
        last = qfi_generator(cfg, which, dim);
        return last->value;
      },
      loop);
  QfiEstimate out;
  out.method = QfiMethod::generator_exact;
  if (last) out = *last;
  out.value = last ? dims.value : std::numeric_limits<double>::quiet_NaN();
  out.converged = last.has_value() && dims.converged;
  out.diagnostics["dim_used"] = dims.dim_used;
  return out;
}

QfiEstimate asymptotic_qfi(const StrategyConfig& cfg, Parameter which) {
  if (cfg.n_queries < 1) throw ValidationError("n_queries must be >= 1");
  if (cfg.m < 1) throw ValidationError("nonlinearity order m must be >= 1");
  const int m = effective_order(cfg);
  const double n = cfg.n_queries;
  QfiEstimate out;
  out.method = QfiMethod::asymptotic;
  out.converged = true;

  if (cfg.strategy == Strategy::quantum_switch) {
    if (m == 1) {
      const CvState probe = settled_probe(cfg.probe);
      const Quadrature q = which == Parameter::theta1 ? Quadrature::X : Quadrature::P;
      const double var = variance(probe, build_quadrature(probe.dim(), q));
      const double other = which == Parameter::theta1 ? cfg.theta2 : cfg.theta1;
      out.value = other * other * std::pow(n, 4) + 4.0 * n * n * var;
      out.diagnostics["probe_variance"] = var;
      return out;
    }
    if (which == Parameter::theta1)
      throw UnsupportedConfiguration("no closed form for the switch theta1 QFI at m > 1");
    out.value = std::pow(cfg.theta1, 2 * m) * std::pow(n, 2 * (m + 1));
    return out;
  }

  if (which == Parameter::theta1) {
    if (m > 1) throw UnsupportedConfiguration("no closed form for the cs theta1 QFI at m > 1");
    out.value = 16.0 * std::pow(n, 4) * cfg.theta2 * cfg.theta2;
    return out;
  }
  out.value = std::pow(2.0, 2 * (m + 2)) * std::pow(cfg.theta1, 2 * m) *
              std::pow(n, 2 * (m + 1)) / ((m + 1.0) * (m + 1.0));
  if (m == 1) out.diagnostics["theta2_literal_form"] = 16.0 * std::pow(n, 4) * cfg.theta2 * cfg.theta2;
  return out;
}

PrecisionResult crb_precision(const QfiEstimate& f, int nu) {
  if (nu < 1) throw ValidationError("number of repetitions must be >= 1");
  if (!(f.value > 0.0))
    throw UnidentifiableParameter("QFI is zero; the parameter cannot be estimated");
  PrecisionResult r;
  r.nu = nu;
  r.source = f;
  r.delta_theta = 1.0 / std::sqrt(nu * f.value);
  return r;
}

double ratio_formula(int m) {
  if (m < 1) throw ValidationError("nonlinearity order m must be >= 1");
  return (m + 1.0) / std::pow(2.0, m + 2);
}

bool large_n_gate(const StrategyConfig& cfg) {
  const CvState probe = settled_probe(cfg.probe);
  const double mean_p = moment(probe, build_quadrature(probe.dim(), Quadrature::P), 1).real();
  return cfg.n_queries * std::abs(cfg.theta1) >= 10.0 * (std::abs(mean_p) + 1.0);
}

RatioResult precision_ratio(const StrategyConfig& cfg, QfiMethod method, const DimensionLoop& loop) {
  StrategyConfig cs = cfg;
  cs.strategy = Strategy::coherent_superposition;
  StrategyConfig qs = cfg;
  qs.strategy = Strategy::quantum_switch;

  RatioResult r;
  r.m = cfg.m;
  r.n_queries = cfg.n_queries;
  r.formula = ratio_formula(cfg.m);
  r.gate_passed = large_n_gate(cfg);
  switch (method) {
    case QfiMethod::generator_exact:
      r.cs = qfi_generator_converged(cs, Parameter::theta2, loop);
      r.qs = qfi_generator_converged(qs, Parameter::theta2, loop);
      break;
    case QfiMethod::finite_difference:
      r.cs = qfi_fd_converged(cs, Parameter::theta2, loop);
      r.qs = qfi_fd_converged(qs, Parameter::theta2, loop);
      break;
    case QfiMethod::asymptotic:
      r.cs = asymptotic_qfi(cs, Parameter::theta2);
      r.qs = asymptotic_qfi(qs, Parameter::theta2);
      break;
  }
  r.converged = r.cs.converged && r.qs.converged;
  // delta ~ 1/sqrt(F); nu cancels.
  r.measured = std::sqrt(r.qs.value / r.cs.value);
  return r;
}

}  // namespace cvmet
