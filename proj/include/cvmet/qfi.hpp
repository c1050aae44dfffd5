#pragma once

// Quantum Fisher information of pure strategy outputs,
//
//   F = 4 ( <d psi|d psi> - |<d psi|psi>|^2 ),
//
// by finite differences, by exact derivative generators, and by the
// leading-order closed forms; plus Cramer-Rao precisions and the
// cs-versus-switch precision ratio.

#include <functional>
#include <map>
#include <string>

#include "cvmet/strategies.hpp"

namespace cvmet {

enum class QfiMethod { finite_difference, generator_exact, asymptotic };
std::string to_string(QfiMethod m);

enum class Parameter { theta1, theta2 };
std::string to_string(Parameter p);
Parameter parameter_from_string(const std::string& name);

struct QfiEstimate {
  double value = 0.0;
  QfiMethod method = QfiMethod::finite_difference;
  double step_used = 0.0;  // finite differences only
  bool converged = false;
  std::map<std::string, double> diagnostics;
};

struct PrecisionResult {
  double delta_theta = 0.0;
  int nu = 1;
  QfiEstimate source;

  /// delta_theta * sqrt(nu), independent of the repetition count.
  double scaled() const;
};

/// Normalized pure state as a function of one scalar parameter.
using StateBuilder = std::function<Vector(double)>;

/// Pure-state QFI from a state and its derivative. Clamped at 0 against
/// rounding.
double qfi_from_derivative(const Vector& psi, const Vector& dpsi);

/// 1e-4 * max(1, |theta|).
double default_fd_step(double theta);

/// Central differences at h and h/2 with one Richardson step. converged
/// when the two single-step estimates agree to rel. 1e-4; up to three
/// step reductions (h -> h/4) are tried before giving up. The reported
/// value uses the Richardson-combined derivative.
QfiEstimate qfi_fd(const StateBuilder& builder, double theta0, double step);

/// Strategy output as a function of the chosen parameter (amplitudes of
/// the full control (x) mode state).
StateBuilder strategy_builder(const StrategyConfig& cfg, Parameter which, FockDim dim);

/// qfi_fd inside the Fock-dimension doubling loop. converged requires both
/// the finite differences and the dimension loop to settle.
QfiEstimate qfi_fd_converged(const StrategyConfig& cfg, Parameter which,
                             const DimensionLoop& loop = {});

/// Exact QFI from per-branch derivative generators g_b:
///   F = 4 ( 1/2 sum_b <g_b^2> - |1/2 sum_b s_b <g_b>|^2 ),
/// with the theta2 generators taken from the Zassenhaus expansion. theta1
/// is supported for m = 1. diagnostics["squared_expectation"] holds the
/// same expression with <g_b^2> replaced by <g_b>^2.
QfiEstimate qfi_generator(const StrategyConfig& cfg, Parameter which, FockDim dim);

QfiEstimate qfi_generator_converged(const StrategyConfig& cfg, Parameter which,
                                    const DimensionLoop& loop = {});

/// Leading-order closed forms:
///   switch, m = 1:  F_theta1 = theta2^2 N^4 + 4 N^2 Var X,
///                   F_theta2 = theta1^2 N^4 + 4 N^2 Var P
///   switch, m > 1:  F_theta2 = theta1^(2m) N^(2(m+1))
///   cs:             F_theta2 = 2^(2(m+2)) theta1^(2m) N^(2(m+1)) / (m+1)^2
///   cs, m = 1:      F_theta1 = 16 N^4 theta2^2
/// Variances are taken on the probe.
QfiEstimate asymptotic_qfi(const StrategyConfig& cfg, Parameter which);

/// delta_theta = 1/sqrt(nu F).
PrecisionResult crb_precision(const QfiEstimate& f, int nu);

/// (m + 1) / 2^(m + 2).
double ratio_formula(int m);

/// N |theta1| >= 10 (|<P>| + 1) on the probe.
bool large_n_gate(const StrategyConfig& cfg);

struct RatioResult {
  int m = 1;
  int n_queries = 1;
  double measured = 0.0;  // delta theta2|cs / delta theta2|qs
  double formula = 0.0;
  bool gate_passed = false;
  bool converged = false;
  QfiEstimate cs;
  QfiEstimate qs;
};

/// Both strategies at the same (theta1, theta2, N, m, probe), QFI for
/// theta2 by the same method (generator_exact or finite_difference).
RatioResult precision_ratio(const StrategyConfig& cfg, QfiMethod method = QfiMethod::generator_exact,
                            const DimensionLoop& loop = {});

}  // namespace cvmet
