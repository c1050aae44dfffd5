#pragma once

// One bosonic mode on a truncated number basis |0>, ..., |d-1>.

#include <complex>
#include <functional>
#include <Eigen/Dense>

#include "cvmet/errors.hpp"

namespace cvmet {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr Complex kI{0.0, 1.0};

/// Fock truncation dimension.
struct FockDim {
  int d;

  constexpr explicit FockDim(int dim) : d(dim) {}
  friend constexpr bool operator==(FockDim, FockDim) = default;
};

enum class Quadrature { X, P };

/// Dense operator on one mode. The Hermitian/unitary flags are claims that
/// are checked when the operator is built, so a flagged operator can be
/// trusted downstream.
class Operator {
 public:
  Operator(FockDim dim, Matrix entries, bool hermitian, bool unitary = false);

  static Operator identity(FockDim dim);

  FockDim dim() const { return dim_; }
  const Matrix& matrix() const { return entries_; }
  bool hermitian() const { return hermitian_; }
  bool unitary() const { return unitary_; }
  /// Set by operator_power(op, 0): the identity stands in for a missing
  /// Hamiltonian term.
  bool degenerate() const { return degenerate_; }

  Operator operator+(const Operator& rhs) const;
  Operator operator-(const Operator& rhs) const;
  Operator operator*(double scale) const;
  friend Operator operator*(double scale, const Operator& op) { return op * scale; }
  /// Matrix product. The Hermitian claim survives only when both factors
  /// are the same Hermitian operator.
  Operator operator*(const Operator& rhs) const;

 private:
  friend Operator operator_power(const Operator& op, int m);

  FockDim dim_;
  Matrix entries_;
  bool hermitian_;
  bool unitary_;
  bool degenerate_ = false;
};

/// Pure state of the mode; the norm is held at 1 within 1e-10.
class CvState {
 public:
  CvState(FockDim dim, Vector amplitudes);

  /// Rescales to unit norm before validating.
  static CvState normalized(FockDim dim, Vector amplitudes);

  FockDim dim() const { return dim_; }
  const Vector& amplitudes() const { return amplitudes_; }

 private:
  FockDim dim_;
  Vector amplitudes_;
};

struct ProbeSpec {
  enum class Kind { vacuum, fock, coherent, squeezed_vacuum };

  Kind kind = Kind::vacuum;
  int n = 0;           // fock
  Complex alpha = 0;   // coherent
  double r = 0.0;      // squeezed_vacuum

  static ProbeSpec vacuum() { return {}; }
  static ProbeSpec fock(int n) { return {Kind::fock, n, 0.0, 0.0}; }
  static ProbeSpec coherent(Complex alpha) { return {Kind::coherent, 0, alpha, 0.0}; }
  static ProbeSpec squeezed_vacuum(double r) { return {Kind::squeezed_vacuum, 0, 0.0, r}; }
};

/// Largest probability mass a truncated coherent or squeezed probe may
/// lose at the cut.
inline constexpr double kProbeLeakageLimit = 1e-10;

/// X = (a + a^dag)/sqrt2 or P = i(a^dag - a)/sqrt2 with a|n> = sqrt(n)|n-1>.
Operator build_quadrature(FockDim dim, Quadrature which);

/// Exact repeated product op^m. m = 0 returns the identity flagged
/// degenerate().
Operator operator_power(const Operator& op, int m);

CvState prepare_probe(const ProbeSpec& spec, FockDim dim);

/// Eigendecomposition of a Hermitian generator H, reusable for any
/// evolution time: apply(v, tau) = exp(-i tau H) v.
class Propagator {
 public:
  explicit Propagator(const Operator& generator);

  FockDim dim() const { return dim_; }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }

  Vector apply(const Vector& v, double tau) const;
  Matrix unitary(double tau) const;

 private:
  FockDim dim_;
  Eigen::VectorXd eigenvalues_;
  Matrix eigenvectors_;
  bool zero_ = false;
};

CvState evolve(const CvState& state, const Operator& generator, double tau);

/// <state| op^k |state>. For Hermitian op the imaginary part must vanish
/// (relative to max(1, |Re|)) below 1e-10 and is then dropped; otherwise
/// ContractViolation.
Complex moment(const CvState& state, const Operator& op, int k);
double variance(const CvState& state, const Operator& op);

/// Same as moment() on a raw (not necessarily normalized) vector.
Complex raw_moment(const Vector& v, const Operator& op, int k);

/// Probability mass at basis indices >= first.
double tail_mass(const Vector& amplitudes, int first);

/// Doubling loop over the Fock dimension.
struct DimensionLoop {
  int start = 64;
  int cap = 1024;
  double rtol = 1e-6;
};

struct DimensionResult {
  double value = 0.0;
  double previous = 0.0;  // value at dim_used / 2 (NaN if only one step ran)
  int dim_used = 0;
  bool converged = false;
};

/// Evaluates f at start, 2*start, ... until two successive values agree to
/// rtol (relative, absolute when both are below 1e-300) or the cap is hit.
/// Exceptions from f at a given dimension (e.g. envelope violations) count
/// as "not yet converged" and move the loop on.
DimensionResult converge_in_dimension(const std::function<double(FockDim)>& f,
                                      const DimensionLoop& loop = {});

}  // namespace cvmet
