#include "cvmet/strategies.hpp"

#include <cmath>

#include "cvmet/bch.hpp"

namespace cvmet {
namespace {

constexpr double kNormTol = 1e-10;

void require_mode(const StrategyConfig& cfg) {
  if (cfg.n_queries < 1) throw ValidationError("n_queries must be >= 1");
  if (cfg.m < 1) throw ValidationError("nonlinearity order m must be >= 1");
}

struct ModeOps {
  Operator x;
  Operator pm;
};

ModeOps mode_ops(FockDim dim, int m) {
  Operator x = build_quadrature(dim, Quadrature::X);
  Operator pm = operator_power(build_quadrature(dim, Quadrature::P), m);
  return {std::move(x), std::move(pm)};
}

// exp(S) v for S an anti-Hermitian polynomial in P.
Vector apply_exp_poly(const NumericPoly& s, const Vector& v, FockDim dim) {
  if (s.is_zero()) return v;
  return Propagator(to_operator(s * kI, dim)).apply(v, 1.0);
}

}  // namespace

QState::QState(FockDim fock, Vector amplitudes, QueryCount queries)
    : fock_(fock), amplitudes_(std::move(amplitudes)), queries_(queries) {
  if (amplitudes_.size() != 2 * fock.d)
    throw InvalidDimension("QState needs 2*d amplitudes");
  const double norm = amplitudes_.norm();
  if (std::abs(norm - 1.0) > kNormTol)
    throw ContractViolation("QState norm " + sci(norm) + " is not 1");
}

QState QState::from_branches(FockDim fock, const Vector& b0, const Vector& b1,
                             QueryCount queries) {
  if (b0.size() != fock.d || b1.size() != fock.d)
    throw InvalidDimension("branch length does not match Fock dimension");
  Vector amps(2 * fock.d);
  const double s = 1.0 / std::sqrt(2.0);
  amps.head(fock.d) = b0 * s;
  amps.tail(fock.d) = b1 * s;
  return QState(fock, std::move(amps), queries);
}

Vector QState::block(int b) const {
  if (b != 0 && b != 1) throw ValidationError("control index must be 0 or 1");
  return amplitudes_.segment(b * fock_.d, fock_.d);
}

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::quantum_switch: return "switch";
    case Strategy::coherent_superposition: return "coherent_superposition";
    case Strategy::composite: return "composite";
  }
  return "?";
}

Strategy strategy_from_string(const std::string& name) {
  if (name == "switch" || name == "qs") return Strategy::quantum_switch;
  if (name == "coherent_superposition" || name == "cs") return Strategy::coherent_superposition;
  if (name == "composite") return Strategy::composite;
  throw ValidationError("unknown strategy '" + name + "'");
}

QState switch_output(const StrategyConfig& cfg, FockDim dim) {
  require_mode(cfg);
  const ModeOps ops = mode_ops(dim, cfg.m);
  const Propagator u1(ops.x);
  const Propagator u2(ops.pm);
  const Vector phi = prepare_probe(cfg.probe, dim).amplitudes();

  // U1^N U2^N: U2 acts first.
  Vector b0 = phi;
  for (int q = 0; q < cfg.n_queries; ++q) b0 = u2.apply(b0, cfg.theta2);
  for (int q = 0; q < cfg.n_queries; ++q) b0 = u1.apply(b0, cfg.theta1);
  Vector b1 = phi;
  for (int q = 0; q < cfg.n_queries; ++q) b1 = u1.apply(b1, cfg.theta1);
  for (int q = 0; q < cfg.n_queries; ++q) b1 = u2.apply(b1, cfg.theta2);

  QueryCount used;
  used.u1 = cfg.n_queries;
  used.u2 = cfg.n_queries;
  return QState::from_branches(dim, b0, b1, used);
}

QState cs_output(const StrategyConfig& cfg, FockDim dim) {
  require_mode(cfg);
  const ModeOps ops = mode_ops(dim, cfg.m);
  const Vector phi = prepare_probe(cfg.probe, dim).amplitudes();
  const double time = 2.0 * cfg.n_queries;
  const Vector b0 = Propagator(ops.x * cfg.theta1 + ops.pm * cfg.theta2).apply(phi, time);
  const Vector b1 = Propagator(ops.x * cfg.theta1 - ops.pm * cfg.theta2).apply(phi, time);
  QueryCount used;
  used.u_plus = 2 * cfg.n_queries;
  used.u_minus = 2 * cfg.n_queries;
  return QState::from_branches(dim, b0, b1, used);
}

QState composite_output(const CompositeParams& p, int m, const ProbeSpec& probe, FockDim dim) {
  if (m != 1)
    throw UnsupportedConfiguration("the composite realization exists for m = 1 only");
  if (!(p.t > 0.0)) throw ValidationError("composite evolution time must be positive");
  const Operator x = build_quadrature(dim, Quadrature::X);
  const Operator mom = build_quadrature(dim, Quadrature::P);
  const Vector phi = prepare_probe(probe, dim).amplitudes();
  const Vector b0 = Propagator(x * p.g1 + mom * p.g2).apply(phi, p.t);
  const Vector b1 = Propagator(x * p.g1 - mom * p.g2).apply(phi, p.t);
  QueryCount used;
  used.u_plus = 2 * p.n_queries;
  used.u_minus = 2 * p.n_queries;
  return QState::from_branches(dim, b0, b1, used);
}

CompositeParams composite_params_for(const StrategyConfig& cfg, double t) {
  require_mode(cfg);
  CompositeParams p;
  p.t = t;
  p.n_queries = cfg.n_queries;
  p.g1 = 2.0 * cfg.n_queries * cfg.theta1 / t;
  p.g2 = 2.0 * cfg.n_queries * cfg.theta2 / t;
  return p;
}

QState strategy_output(const StrategyConfig& cfg, FockDim dim) {
  switch (cfg.strategy) {
    case Strategy::quantum_switch: return switch_output(cfg, dim);
    case Strategy::coherent_superposition: return cs_output(cfg, dim);
    case Strategy::composite:
      return composite_output(composite_params_for(cfg), cfg.m, cfg.probe, dim);
  }
  throw ValidationError("unknown strategy");
}

QState switch_closed_form_linear(const StrategyConfig& cfg, FockDim dim, int phase_sign) {
  require_mode(cfg);
  if (cfg.m != 1) throw UnsupportedConfiguration("the linear closed form needs m = 1");
  const Operator x = build_quadrature(dim, Quadrature::X);
  const Operator mom = build_quadrature(dim, Quadrature::P);
  const double n = cfg.n_queries;
  Vector v = prepare_probe(cfg.probe, dim).amplitudes();
  v = Propagator(x).apply(v, n * cfg.theta1);
  v = Propagator(mom).apply(v, n * cfg.theta2);
  const Complex phase = std::exp(Complex(0.0, phase_sign * n * n * cfg.theta1 * cfg.theta2));
  QueryCount used;
  used.u1 = cfg.n_queries;
  used.u2 = cfg.n_queries;
  return QState::from_branches(dim, v, v * phase, used);
}

QState switch_factorized(const StrategyConfig& cfg, FockDim dim) {
  require_mode(cfg);
  const ModeOps ops = mode_ops(dim, cfg.m);
  const double n = cfg.n_queries;
  const Vector phi = prepare_probe(cfg.probe, dim).amplitudes();
  const Complex lambda(0.0, -n);
  const NumericPoly reorder =
      zassenhaus_exponent(cfg.m, lambda, cfg.theta1, cfg.theta2, Variant::AB) -
      zassenhaus_exponent(cfg.m, lambda, cfg.theta1, cfg.theta2, Variant::BA);

  const Propagator ux(ops.x);
  const Propagator upm(ops.pm);
  auto lead = [&](const Vector& v) {
    return ux.apply(upm.apply(v, n * cfg.theta2), n * cfg.theta1);
  };
  QueryCount used;
  used.u1 = cfg.n_queries;
  used.u2 = cfg.n_queries;
  return QState::from_branches(dim, lead(phi), lead(apply_exp_poly(reorder, phi, dim)), used);
}

QState cs_factorized(const StrategyConfig& cfg, FockDim dim) {
  require_mode(cfg);
  const ModeOps ops = mode_ops(dim, cfg.m);
  const double n = cfg.n_queries;
  const Vector phi = prepare_probe(cfg.probe, dim).amplitudes();
  const Complex lambda(0.0, -2.0 * n);
  const Propagator ux(ops.x);
  const Propagator upm(ops.pm);
  auto branch = [&](double sign) {
    const NumericPoly tail =
        zassenhaus_exponent(cfg.m, lambda, cfg.theta1, sign * cfg.theta2, Variant::AB);
    Vector v = apply_exp_poly(tail, phi, dim);
    v = upm.apply(v, sign * 2.0 * n * cfg.theta2);
    return ux.apply(v, 2.0 * n * cfg.theta1);
  };
  QueryCount used;
  used.u_plus = 2 * cfg.n_queries;
  used.u_minus = 2 * cfg.n_queries;
  return QState::from_branches(dim, branch(+1.0), branch(-1.0), used);
}

double fidelity(const QState& a, const QState& b) {
  if (a.fock() != b.fock()) throw InvalidDimension("fidelity between different dimensions");
  return std::abs(a.amplitudes().dot(b.amplitudes()));
}

double switch_relative_phase(const StrategyConfig& cfg, FockDim dim) {
  const QState s = switch_output(cfg, dim);
  return std::arg(s.block(0).dot(s.block(1)));
}

double control_purity(const QState& s) {
  const Vector b0 = s.block(0);
  const Vector b1 = s.block(1);
  const double p00 = b0.squaredNorm();
  const double p11 = b1.squaredNorm();
  const double c01 = std::norm(b0.dot(b1));
  return p00 * p00 + p11 * p11 + 2.0 * c01;
}

double envelope_mass(const QState& s, int m) {
  const int edge = s.fock().d - 2 * m;
  // Blocks carry half the norm each; rescale so the mass refers to the
  // normalized branch state.
  return 2.0 * std::max(tail_mass(s.block(0), edge), tail_mass(s.block(1), edge));
}

QState evolve(const QState& state, const Operator& generator, double tau) {
  if (generator.dim() != state.fock())
    throw InvalidDimension("generator dimension does not match the mode");
  if (!generator.hermitian()) throw ContractViolation("evolve needs a Hermitian generator");
  if (tau == 0.0) return state;
  const Propagator prop(generator);
  const int d = state.fock().d;
  Vector amps(2 * d);
  amps.head(d) = prop.apply(state.amplitudes().head(d), tau);
  amps.tail(d) = prop.apply(state.amplitudes().tail(d), tau);
  return QState(state.fock(), std::move(amps), state.queries());
}

}  // namespace cvmet
