#pragma once

// Output states of the three coding strategies on (control qubit) x (mode).
// The control register always starts in (|0> + |1>)/sqrt2.

#include <string>

#include "cvmet/cvspace.hpp"

namespace cvmet {

/// Channel uses consumed to produce a state. The switch spends N queries
/// of each of U1 and U2; the coherent superposition spends 2N queries of
/// U+ on the |0> branch and 2N of U- on the |1> branch.
struct QueryCount {
  int u1 = 0;
  int u2 = 0;
  int u_plus = 0;
  int u_minus = 0;
};

/// Control-major amplitudes: the |0> block (d entries) then the |1> block.
class QState {
 public:
  QState(FockDim fock, Vector amplitudes, QueryCount queries = {});

  /// (|0>|b0> + |1>|b1>)/sqrt2 for unit-norm branch states.
  static QState from_branches(FockDim fock, const Vector& b0, const Vector& b1,
                              QueryCount queries = {});

  FockDim fock() const { return fock_; }
  static constexpr int control_dim() { return 2; }
  const Vector& amplitudes() const { return amplitudes_; }
  /// The mode block attached to control state |b> (norm 1/sqrt2 for the
  /// strategies here).
  Vector block(int b) const;
  const QueryCount& queries() const { return queries_; }

 private:
  FockDim fock_;
  Vector amplitudes_;
  QueryCount queries_;
};

enum class Strategy { quantum_switch, coherent_superposition, composite };

std::string to_string(Strategy s);
Strategy strategy_from_string(const std::string& name);

struct StrategyConfig {
  double theta1 = 0.1;
  double theta2 = 0.1;
  int n_queries = 1;
  int m = 1;
  Strategy strategy = Strategy::coherent_superposition;
  ProbeSpec probe = ProbeSpec::vacuum();
};

/// Parameters of H_c = G1 X + G2 sigma_Z P run for time T. n_queries only
/// fixes the mapping theta_j = T G_j / (2N).
struct CompositeParams {
  double g1 = 0.0;
  double g2 = 0.0;
  double t = 1.0;
  int n_queries = 1;
};

/// |0> U1^N U2^N |phi> + |1> U2^N U1^N |phi>, normalized, with
/// U1 = exp(-i theta1 X), U2 = exp(-i theta2 P^m) applied one query at a
/// time.
QState switch_output(const StrategyConfig& cfg, FockDim dim);

/// |0> U+^{2N} |phi> + |1> U-^{2N} |phi>, normalized, with
/// U+- = exp(-i(theta1 X +- theta2 P^m)); each branch is one exponential of
/// the branch Hamiltonian over time 2N.
QState cs_output(const StrategyConfig& cfg, FockDim dim);

/// exp(-i(G1 X + G2 P)T)|phi> on |0>, exp(-i(G1 X - G2 P)T)|phi> on |1>.
/// Only m = 1 is supported.
QState composite_output(const CompositeParams& p, int m, const ProbeSpec& probe, FockDim dim);

/// theta_j = T G_j / (2N) inverted for a given T.
CompositeParams composite_params_for(const StrategyConfig& cfg, double t = 1.0);

/// Dispatches on cfg.strategy (composite goes through composite_params_for).
QState strategy_output(const StrategyConfig& cfg, FockDim dim);

// Factorized forms, built from the Zassenhaus terms rather than from the
// channel sequence. They serve as independent references for the builders
// above.

/// Linear switch: (|0> + e^{i s N^2 theta1 theta2}|1>)/sqrt2 (x)
/// exp(-iN theta2 P) exp(-iN theta1 X)|phi>, with s = phase_sign. With
/// [X, P] = i the switch output matches s = +1.
QState switch_closed_form_linear(const StrategyConfig& cfg, FockDim dim, int phase_sign = +1);

/// Switch for any m: both branches share exp(-iN theta1 X) exp(-iN theta2 P^m);
/// the reordered branch carries exp(sum_n (-iN)^n theta1^(n-1) theta2 (C_n - C'_n)).
QState switch_factorized(const StrategyConfig& cfg, FockDim dim);

/// Coherent superposition: exp(-2iN theta1 X) exp(-+2iN theta2 P^m)
/// exp(+-sum_n (-2Ni)^n theta1^(n-1) theta2 C_n) on the two branches.
QState cs_factorized(const StrategyConfig& cfg, FockDim dim);

/// |<a|b>|, i.e. overlap modulo a global phase.
double fidelity(const QState& a, const QState& b);

/// arg <b0|b1> of the switch output; for m = 1 this is the relative phase
/// between the two causal orders.
double switch_relative_phase(const StrategyConfig& cfg, FockDim dim);

/// Purity Tr(rho_c^2) of the reduced control state.
double control_purity(const QState& s);

/// Largest occupation of either block beyond index d - 2m.
double envelope_mass(const QState& s, int m);

/// exp(-i tau (I_control (x) H)) applied to both blocks.
QState evolve(const QState& state, const Operator& generator, double tau);

}  // namespace cvmet
