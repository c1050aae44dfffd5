#include "cvmet/cvspace.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

namespace cvmet {
namespace {

constexpr double kHermitianTol = 1e-12;
constexpr double kUnitaryTol = 1e-10;
constexpr double kNormTol = 1e-10;
constexpr double kImagTol = 1e-10;

void require_square(FockDim dim, const Matrix& m) {
  if (m.rows() != dim.d || m.cols() != dim.d)
    throw InvalidDimension("operator entries are " + std::to_string(m.rows()) + "x" +
                           std::to_string(m.cols()) + ", expected " + std::to_string(dim.d));
}

void require_same_dim(FockDim a, FockDim b) {
  if (a != b)
    throw InvalidDimension("dimension mismatch: " + std::to_string(a.d) + " vs " +
                           std::to_string(b.d));
}

}  // namespace

Operator::Operator(FockDim dim, Matrix entries, bool hermitian, bool unitary)
    : dim_(dim), entries_(std::move(entries)), hermitian_(hermitian), unitary_(unitary) {
  if (dim.d < 1) throw InvalidDimension("Fock dimension must be positive");
  require_square(dim_, entries_);
  if (hermitian_) {
    const double dev = (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
    // Scale with the largest entry so that P^m with big m is not rejected
    // for rounding alone.
    const double scale = std::max(1.0, entries_.cwiseAbs().maxCoeff());
    if (dev > kHermitianTol * scale)
      throw ContractViolation("operator claimed Hermitian but |A - A^dag| = " +
                              sci(dev));
  }
  if (unitary_) {
    const double dev =
        (entries_.adjoint() * entries_ - Matrix::Identity(dim.d, dim.d)).cwiseAbs().maxCoeff();
    if (dev > kUnitaryTol)
      throw ContractViolation("operator claimed unitary but |A^dag A - I| = " +
                              sci(dev));
  }
}

Operator Operator::identity(FockDim dim) {
  return Operator(dim, Matrix::Identity(dim.d, dim.d), true, true);
}

Operator Operator::operator+(const Operator& rhs) const {
  require_same_dim(dim_, rhs.dim_);
  return Operator(dim_, entries_ + rhs.entries_, hermitian_ && rhs.hermitian_);
}

Operator Operator::operator-(const Operator& rhs) const {
  require_same_dim(dim_, rhs.dim_);
  return Operator(dim_, entries_ - rhs.entries_, hermitian_ && rhs.hermitian_);
}

Operator Operator::operator*(double scale) const {
  return Operator(dim_, entries_ * scale, hermitian_, unitary_ && std::abs(scale) == 1.0);
}

Operator Operator::operator*(const Operator& rhs) const {
  require_same_dim(dim_, rhs.dim_);
  const bool same = hermitian_ && rhs.hermitian_ && entries_ == rhs.entries_;
  return Operator(dim_, entries_ * rhs.entries_, same, unitary_ && rhs.unitary_);
}

CvState::CvState(FockDim dim, Vector amplitudes) : dim_(dim), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != dim.d) throw InvalidDimension("state length does not match dimension");
  const double norm = amplitudes_.norm();
  if (std::abs(norm - 1.0) > kNormTol)
    throw ContractViolation("state norm " + sci(norm) + " is not 1");
}

CvState CvState::normalized(FockDim dim, Vector amplitudes) {
  const double norm = amplitudes.norm();
  if (norm == 0.0) throw ValidationError("cannot normalize the zero vector");
  amplitudes /= norm;
  return CvState(dim, std::move(amplitudes));
}

Operator build_quadrature(FockDim dim, Quadrature which) {
  if (dim.d < 2) throw InvalidDimension("quadratures need a Fock dimension of at least 2");
  Matrix lower = Matrix::Zero(dim.d, dim.d);
  for (int n = 1; n < dim.d; ++n) lower(n - 1, n) = std::sqrt(static_cast<double>(n));
  const Matrix raise = lower.adjoint();
  const double s = 1.0 / std::sqrt(2.0);
  if (which == Quadrature::X) return Operator(dim, (lower + raise) * s, true);
  return Operator(dim, (raise - lower) * (kI * s), true);
}

Operator operator_power(const Operator& op, int m) {
  if (m < 0) throw ValidationError("operator_power needs m >= 0");
  if (m == 0) {
    Operator id = Operator::identity(op.dim());
    id.degenerate_ = true;
    return id;
  }
  Matrix acc = op.matrix();
  for (int i = 1; i < m; ++i) acc = acc * op.matrix();
  return Operator(op.dim(), std::move(acc), op.hermitian(), op.unitary());
}

namespace {

// Mass of a distribution p_k (k >= first) given term(k); summed until the
// terms stop contributing. Used for truncation leakage.
template <class Term>
double tail_sum(int first, Term term) {
  double total = 0.0;
  for (int k = first; k < first + 100000; ++k) {
    const double t = term(k);
    total += t;
    if (k > first + 10 && t < 1e-30 * std::max(total, 1e-300) + 1e-300) break;
  }
  return total;
}

}  // namespace

CvState prepare_probe(const ProbeSpec& spec, FockDim dim) {
  if (dim.d < 1) throw InvalidDimension("Fock dimension must be positive");
  Vector amps = Vector::Zero(dim.d);
  switch (spec.kind) {
    case ProbeSpec::Kind::vacuum:
      amps(0) = 1.0;
      return CvState(dim, amps);
    case ProbeSpec::Kind::fock:
      if (spec.n < 0 || spec.n >= dim.d)
        throw InvalidDimension("Fock probe n=" + std::to_string(spec.n) +
                               " does not fit in dimension " + std::to_string(dim.d));
      amps(spec.n) = 1.0;
      return CvState(dim, amps);
    case ProbeSpec::Kind::coherent: {
      const double mean = std::norm(spec.alpha);
      // log Poisson weight, stable for large k.
      auto weight = [mean](int k) {
        if (mean == 0.0) return k == 0 ? 1.0 : 0.0;
        return std::exp(k * std::log(mean) - mean - std::lgamma(k + 1.0));
      };
      const double leak = tail_sum(dim.d, weight);
      if (leak > kProbeLeakageLimit)
        throw EnvelopeViolation("coherent probe leaks " + sci(leak) +
                                    " beyond the Fock cut",
                                leak);
      Complex c = std::exp(-0.5 * mean);
      for (int k = 0; k < dim.d; ++k) {
        if (k > 0) c *= spec.alpha / std::sqrt(static_cast<double>(k));
        amps(k) = c;
      }
      return CvState::normalized(dim, amps);
    }
    case ProbeSpec::Kind::squeezed_vacuum: {
      // S(r)|0> with S(r) = exp(r (a^2 - a^dag^2)/2): Var X = exp(-2r)/2.
      const double t = std::tanh(spec.r);
      const double c0 = 1.0 / std::sqrt(std::cosh(spec.r));
      auto weight = [&](int k) {
        if (k % 2 != 0 || t == 0.0) return k == 0 ? c0 * c0 : 0.0;
        const int n = k / 2;
        // |c_2n|^2 = c0^2 t^2n (2n)! / (4^n n!^2)
        return std::exp(2.0 * std::log(c0) + 2.0 * n * std::log(std::abs(t)) +
                        std::lgamma(2.0 * n + 1) - n * std::log(4.0) - 2.0 * std::lgamma(n + 1.0));
      };
      const double leak = tail_sum(dim.d, weight);
      if (leak > kProbeLeakageLimit)
        throw EnvelopeViolation("squeezed probe leaks " + sci(leak) +
                                    " beyond the Fock cut",
                                leak);
      double c = c0;
      for (int k = 0; k < dim.d; k += 2) {
        if (k > 0) c *= -t * std::sqrt(static_cast<double>(k) * (k - 1)) / k;
        amps(k) = c;
      }
      return CvState::normalized(dim, amps);
    }
  }
  throw ValidationError("unknown probe kind");
}

Propagator::Propagator(const Operator& generator) : dim_(generator.dim()) {
  if (!generator.hermitian())
    throw ContractViolation("propagator generator must be Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(generator.matrix());
  if (solver.info() != Eigen::Success)
    throw NonConvergence("Hermitian eigendecomposition failed");
  eigenvalues_ = solver.eigenvalues();
  eigenvectors_ = solver.eigenvectors();
  zero_ = generator.matrix().isZero(0.0);
}

Vector Propagator::apply(const Vector& v, double tau) const {
  if (v.size() != dim_.d) throw InvalidDimension("vector does not match propagator dimension");
  if (tau == 0.0 || zero_) return v;
  Vector coeffs = eigenvectors_.adjoint() * v;
  for (Eigen::Index k = 0; k < coeffs.size(); ++k)
    coeffs(k) *= std::exp(Complex(0.0, -tau * eigenvalues_(k)));
  return eigenvectors_ * coeffs;
}

Matrix Propagator::unitary(double tau) const {
  if (tau == 0.0 || zero_) return Matrix::Identity(dim_.d, dim_.d);
  Vector phases(eigenvalues_.size());
  for (Eigen::Index k = 0; k < phases.size(); ++k)
    phases(k) = std::exp(Complex(0.0, -tau * eigenvalues_(k)));
  return eigenvectors_ * phases.asDiagonal() * eigenvectors_.adjoint();
}

CvState evolve(const CvState& state, const Operator& generator, double tau) {
  require_same_dim(state.dim(), generator.dim());
  if (tau == 0.0) {
    if (!generator.hermitian()) throw ContractViolation("evolve needs a Hermitian generator");
    return state;
  }
  const Propagator prop(generator);
  return CvState::normalized(state.dim(), prop.apply(state.amplitudes(), tau));
}

Complex raw_moment(const Vector& v, const Operator& op, int k) {
  if (v.size() != op.dim().d) throw InvalidDimension("state and operator dimensions differ");
  if (k < 1) throw ValidationError("moment order must be positive");
  Complex value;
  if (op.hermitian() && k % 2 == 0) {
    // <v|A^k|v> = |A^{k/2} v|^2 for Hermitian A.
    Vector w = v;
    for (int i = 0; i < k / 2; ++i) w = op.matrix() * w;
    value = w.squaredNorm();
  } else {
    Vector w = v;
    for (int i = 0; i < k; ++i) w = op.matrix() * w;
    value = v.dot(w);
  }
  if (op.hermitian()) {
    const double bound = kImagTol * std::max(1.0, std::abs(value.real()));
    if (std::abs(value.imag()) > bound)
      throw ContractViolation("Hermitian moment has imaginary part " +
                              sci(value.imag()));
    value = value.real();
  }
  return value;
}

Complex moment(const CvState& state, const Operator& op, int k) {
  require_same_dim(state.dim(), op.dim());
  return raw_moment(state.amplitudes(), op, k);
}

double variance(const CvState& state, const Operator& op) {
  const Complex m1 = moment(state, op, 1);
  const Complex m2 = moment(state, op, 2);
  return (m2 - m1 * m1).real();
}

double tail_mass(const Vector& amplitudes, int first) {
  if (first >= amplitudes.size()) return 0.0;
  first = std::max(first, 0);
  return amplitudes.tail(amplitudes.size() - first).squaredNorm();
}

DimensionResult converge_in_dimension(const std::function<double(FockDim)>& f,
                                      const DimensionLoop& loop) {
  DimensionResult out;
  out.previous = std::numeric_limits<double>::quiet_NaN();
  bool have_prev = false;
  for (int d = loop.start; d <= loop.cap; d *= 2) {
    double value = 0.0;
    try {
      value = f(FockDim(d));
    } catch (const NonConvergence&) {
      have_prev = false;
      out.dim_used = d;
      continue;
    }
    out.dim_used = d;
    if (have_prev) {
      const double scale = std::max(std::abs(value), std::abs(out.value));
      const double diff = std::abs(value - out.value);
      out.previous = out.value;
      out.value = value;
      if (diff <= loop.rtol * scale || scale < 1e-300) {
        out.converged = true;
        return out;
      }
    } else {
      out.value = value;
      have_prev = true;
    }
  }
  return out;
}

}  // namespace cvmet
