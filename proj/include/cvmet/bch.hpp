#pragma once

// Zassenhaus factorization for the pair (X, P^m):
//
//   exp(l(A+B)) = exp(lA) exp(lB) exp(l^2 C_2) exp(l^3 C_3) ...
//
// For A = X, B = P^m every nested commutator is a polynomial in P, so the
// series stops at n = m + 1 and each C_n is a single monomial. The BA
// variant swaps the roles: A = P^m, B = X, coefficients C'_n.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "cvmet/cvspace.hpp"

namespace cvmet {

using Rational = boost::multiprecision::cpp_rational;

/// Complex number with exact rational parts.
struct ExactComplex {
  Rational re{0};
  Rational im{0};

  ExactComplex() = default;
  ExactComplex(Rational r, Rational i = Rational(0)) : re(std::move(r)), im(std::move(i)) {}
  ExactComplex(int r) : re(r) {}

  static ExactComplex i() { return {Rational(0), Rational(1)}; }

  bool is_zero() const { return re == 0 && im == 0; }
  Complex to_complex() const;
  std::string str() const;

  ExactComplex& operator+=(const ExactComplex& o);
  ExactComplex& operator-=(const ExactComplex& o);
  ExactComplex& operator*=(const ExactComplex& o);

  friend ExactComplex operator+(ExactComplex a, const ExactComplex& b) { return a += b; }
  friend ExactComplex operator-(ExactComplex a, const ExactComplex& b) { return a -= b; }
  friend ExactComplex operator*(ExactComplex a, const ExactComplex& b) { return a *= b; }
  friend ExactComplex operator-(const ExactComplex& a) { return {-a.re, -a.im}; }
  friend bool operator==(const ExactComplex& a, const ExactComplex& b) {
    return a.re == b.re && a.im == b.im;
  }
};

ExactComplex pow(const ExactComplex& base, int exponent);

namespace detail {
inline bool coeff_is_zero(const ExactComplex& c) { return c.is_zero(); }
inline bool coeff_is_zero(const Complex& c) { return c == Complex(0.0); }
}  // namespace detail

/// sum_k c_k P^k with no stored zero coefficients.
template <class Coeff>
class PolyInP {
 public:
  using Terms = std::map<int, Coeff>;

  PolyInP() = default;
  static PolyInP monomial(int power, Coeff c) {
    PolyInP p;
    p.add_term(power, std::move(c));
    return p;
  }

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int degree() const { return terms_.empty() ? -1 : terms_.rbegin()->first; }
  Coeff coeff(int power) const {
    auto it = terms_.find(power);
    return it == terms_.end() ? Coeff(0) : it->second;
  }

  void add_term(int power, const Coeff& c) {
    if (power < 0 || detail::coeff_is_zero(c)) return;
    auto [it, inserted] = terms_.emplace(power, c);
    if (!inserted) {
      it->second += c;
      if (detail::coeff_is_zero(it->second)) terms_.erase(it);
    }
  }

  PolyInP& operator+=(const PolyInP& o) {
    for (const auto& [k, c] : o.terms_) add_term(k, c);
    return *this;
  }
  PolyInP& operator-=(const PolyInP& o) {
    for (const auto& [k, c] : o.terms_) add_term(k, -c);
    return *this;
  }
  PolyInP& operator*=(const Coeff& s) {
    if (detail::coeff_is_zero(s)) {
      terms_.clear();
      return *this;
    }
    for (auto& [k, c] : terms_) c *= s;
    return *this;
  }

  friend PolyInP operator+(PolyInP a, const PolyInP& b) { return a += b; }
  friend PolyInP operator-(PolyInP a, const PolyInP& b) { return a -= b; }
  friend PolyInP operator*(PolyInP a, const Coeff& s) { return a *= s; }
  friend PolyInP operator*(const Coeff& s, PolyInP a) { return a *= s; }
  friend PolyInP operator*(const PolyInP& a, const PolyInP& b) {
    PolyInP out;
    for (const auto& [ka, ca] : a.terms_)
      for (const auto& [kb, cb] : b.terms_) out.add_term(ka + kb, ca * cb);
    return out;
  }
  friend bool operator==(const PolyInP& a, const PolyInP& b) { return a.terms_ == b.terms_; }

 private:
  Terms terms_;
};

using PPoly = PolyInP<ExactComplex>;
using NumericPoly = PolyInP<Complex>;

NumericPoly to_numeric(const PPoly& p);

/// sum_k c_k P^k with P the truncated momentum quadrature (powers formed
/// by repeated products, like operator_power).
Matrix substitute(const NumericPoly& p, FockDim dim);
/// Same, flagged Hermitian when every coefficient is real.
Operator to_operator(const NumericPoly& p, FockDim dim);

enum class Variant { AB, BA };
std::string to_string(Variant v);

/// Closed-form C_n (AB) or C'_n (BA) for the pair (X, P^m). Zero for
/// n > m + 1.
PPoly zassenhaus_term(int m, int n, Variant variant);

/// (-1)^(n-1)/n! [X^(n-1), P^m] from ad_X(P^k) = i k P^(k-1), iterated
/// symbolically. n = 1 gives P^m itself.
PPoly nested_commutator_oracle(int m, int n);

struct ExpansionTable {
  int m = 1;
  Variant variant = Variant::AB;
  std::vector<std::pair<int, PPoly>> terms;  // n = 2 .. m+1
};

ExpansionTable expansion_table(int m, Variant variant);

/// sum_{n=2}^{m+1} l^n a^(n-1) b C_n for the factorization of
/// exp(l(aX + bP^m)); for BA the C'_n are used and the leading factors are
/// exp(l b P^m) exp(l a X).
NumericPoly zassenhaus_exponent(int m, Complex lambda, double a, double b, Variant variant);

enum class BranchKind { cs_branch, switch_branch };

/// theta2-derivative generator g of one branch, in the sense
/// d/dtheta2 (branch state) = -i U g |phi>, with U the branch unitary.
///
/// cs_branch: the |0> branch of the coherent superposition,
///   g = 2N P^m + i sum_n (-2Ni)^n theta1^(n-1) C_n   (the |1> branch is -g).
/// switch_branch: the reordered (U2 first) branch of the switch,
///   g = N P^m + i sum_n (-iN)^n theta1^(n-1) (C_n - C'_n).
NumericPoly phase_derivative_generator(int m, double theta1, int n_queries, BranchKind kind);

struct FactorizationCheck {
  double residual = 0.0;
  double envelope_mass = 0.0;  // worst occupation beyond d - 2m over checked columns
};

/// Compares exp(l(X + P^m)) against the Zassenhaus product with
/// l = -i*lambda_im on the first `occupied_levels` Fock columns. Throws
/// EnvelopeViolation if any checked column carries more than 1e-12 of
/// probability beyond index d - 2m. `extra_terms` appends that many C_n
/// with n > m + 1 (all zero) to the product.
FactorizationCheck verify_factorization(int m, double lambda_im, FockDim dim, Variant variant,
                                        int occupied_levels = 1, int extra_terms = 0);

inline constexpr double kEnvelopeLimit = 1e-12;

}  // namespace cvmet
