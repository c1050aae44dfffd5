#pragma once

// Cavity optomechanics with a single photon in superposition, homodyne
// estimation of the radiation-pressure coupling g, and a log-log fitter.

#include <utility>
#include <vector>

#include "cvmet/cvspace.hpp"

namespace cvmet {

struct OptomechParams {
  double g = 0.1;
  double mass = 1.0;  // mirror mass
  double omega_c = 1.0;
  double tau = 0.2;
  int n_steps = 8;
  ProbeSpec mirror_probe = ProbeSpec::vacuum();
  FockDim mirror_dim{256};
  FockDim cavity_dim{3};
};

/// Throws ValidationError unless mass > 0, tau > 0, n_steps >= 1 and the
/// cavity keeps at least three levels.
void validate(const OptomechParams& p);

/// Cavity (x) mirror state, cavity-major: amplitude of |c>|k> sits at
/// c * mirror_dim + k.
class OptomechState {
 public:
  OptomechState(FockDim cavity, FockDim mirror, Vector amplitudes);

  FockDim cavity_dim() const { return cavity_; }
  FockDim mirror_dim() const { return mirror_; }
  const Vector& amplitudes() const { return amplitudes_; }

  /// Unnormalized mirror block attached to photon number c.
  Vector mirror_block(int c) const;
  /// <op (x) I_mirror> for an operator on the cavity.
  Complex cavity_expectation(const Matrix& cavity_op) const;

 private:
  FockDim cavity_;
  FockDim mirror_;
  Vector amplitudes_;
};

/// (|0>_c e^{-i H0 T}|phi> + |1>_c e^{-i H1 T}|phi>)/sqrt2 with T = N tau,
/// H0 = P^2/(2 mass), H1 = omega_c + P^2/(2 mass) + g X. Throws
/// EnvelopeViolation if either mirror branch occupies levels >= d - 4
/// beyond 1e-12.
OptomechState optomech_state(const OptomechParams& p);

/// omega_c n + P^2/(2 mass) + g n X on the cavity (x) mirror space, with n
/// the cavity photon number.
Operator optomech_full_hamiltonian(const OptomechParams& p);

/// Cavity photon-number population outside {|0>, |1>}.
double photon_leakage(const OptomechState& s);

struct HomodyneResult {
  double delta2_g = 0.0;
  double mean_x = 0.0;
  double second_x = 0.0;
  double derivative = 0.0;  // d<X_cav>/dg
  double step_used = 0.0;
  bool converged = false;
  int mirror_dim_used = 0;
};

/// <X_cav> and <X_cav^2> on optomech_state(p).
std::pair<double, double> homodyne_moments(const OptomechParams& p);

/// Error-transfer variance (<X^2> - <X>^2) / (d<X>/dg)^2 with the
/// derivative from central differences (h, h/2, Richardson; rel. 1e-4
/// agreement, up to three h -> h/4 reductions). fd_step <= 0 selects
/// 1e-4 max(1, |g|). A derivative below 1e-9 raises UnidentifiableParameter.
HomodyneResult homodyne_g_variance(const OptomechParams& p, double fd_step = 0.0);

/// homodyne_g_variance starting at p.mirror_dim and doubling the mirror
/// dimension (up to cap) while the envelope is violated.
HomodyneResult homodyne_g_variance_adaptive(const OptomechParams& p, int cap = 1024,
                                            double fd_step = 0.0);

/// QFI of g on the full cavity (x) mirror state by finite differences.
double optomech_qfi_g(const OptomechParams& p, double fd_step = 0.0);

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<std::pair<double, double>> points;  // (log N, log y)
  bool power_law_ok = true;
};

/// Ordinary least squares of log y on log N. Needs >= 4 points and
/// positive inputs (ValidationError otherwise). r_squared is 1 for a
/// constant series. With expect_power_law, power_law_ok records whether
/// r_squared >= 0.99.
ScalingFit fit_scaling(const std::vector<std::pair<double, double>>& points,
                       bool expect_power_law = true);

}  // namespace cvmet
