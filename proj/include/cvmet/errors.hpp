#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace cvmet {

/// Short scientific rendering for error messages.
inline std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

/// Base of every error raised by the library. The CLI maps the three
/// families below onto exit codes 1, 2 and 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: out-of-range parameters, malformed configs, unsupported
/// combinations.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class InvalidDimension : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class UnsupportedConfiguration : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class UnidentifiableParameter : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A numerical procedure could not certify its answer (dimension loop hit
/// the cap, finite differences did not settle, state leaked to the
/// truncation edge).
class NonConvergence : public Error {
 public:
  using Error::Error;
};

class EnvelopeViolation : public NonConvergence {
 public:
  EnvelopeViolation(const std::string& what, double mass)
      : NonConvergence(what), mass_(mass) {}
  double mass() const { return mass_; }

 private:
  double mass_;
};

/// An internal claim did not hold (non-Hermitian generator passed to a
/// propagator, complex expectation of a Hermitian operator, ...).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace cvmet
