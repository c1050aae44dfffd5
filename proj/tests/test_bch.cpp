#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cvmet/bch.hpp"

using namespace cvmet;

namespace {

Rational binom(int n, int k) {
  Rational r(1);
  for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

double factorial(int n) { return std::tgamma(n + 1.0); }

// Reordering e^{lB} e^{lA} into e^{l(A+B)} for (A, B) = (X, P^m) collects
// the exponent  int_0^l s * i m (P - i s)^(m-1) ds  after the leading
// factors, term by term in l.
PPoly ba_oracle(int m, int n) {
  const int k = n - 2;
  if (k < 0 || k > m - 1) return {};
  const ExactComplex c = ExactComplex::i() * ExactComplex(Rational(m)) *
                         ExactComplex(binom(m - 1, k)) * pow(-ExactComplex::i(), k) *
                         ExactComplex(Rational(1, n));
  return PPoly::monomial(m - 1 - k, c);
}

NumericPoly binomial_shift(int m, double scale, double shift) {
  // scale * (P + shift)^m
  NumericPoly out;
  for (int k = 0; k <= m; ++k)
    out.add_term(m - k, Complex(scale * std::tgamma(m + 1.0) /
                                (std::tgamma(k + 1.0) * std::tgamma(m - k + 1.0)) *
                                std::pow(shift, k)));
  return out;
}

double max_diff(const NumericPoly& a, const NumericPoly& b) {
  double worst = 0.0;
  for (int k = 0; k <= std::max(a.degree(), b.degree()); ++k)
    worst = std::max(worst, std::abs(a.coeff(k) - b.coeff(k)));
  return worst;
}

}  // namespace

TEST_CASE("exact complex arithmetic") {
  const ExactComplex half(Rational(1, 2));
  CHECK(half.str() == "1/2");
  CHECK(ExactComplex(Rational(0), Rational(-3, 4)).str() == "-3/4i");
  CHECK(pow(ExactComplex::i(), 4) == ExactComplex(1));
  CHECK(pow(ExactComplex::i(), 3) == -ExactComplex::i());
  CHECK((half * half).re == Rational(1, 4));
  CHECK(std::abs(ExactComplex(Rational(1, 3), Rational(2)).to_complex() - Complex(1.0 / 3, 2)) < 1e-16);
}

TEST_CASE("polynomials in P store no zeros") {
  const PPoly p = PPoly::monomial(1, 1) + PPoly::monomial(0, 1);
  const PPoly q = PPoly::monomial(1, 1) - PPoly::monomial(0, 1);
  const PPoly prod = p * q;
  CHECK(prod.terms().size() == 2);
  CHECK(prod.coeff(2) == ExactComplex(1));
  CHECK(prod.coeff(0) == ExactComplex(-1));
  CHECK(prod.coeff(1).is_zero());
  CHECK((p - p).is_zero());
  CHECK((p - p).degree() == -1);
  CHECK(PPoly::monomial(3, 0).is_zero());
}

TEST_CASE("closed-form terms equal the nested commutators") {
  for (int m = 1; m <= 6; ++m)
    for (int n = 2; n <= m + 2; ++n)
      CHECK_MESSAGE(zassenhaus_term(m, n, Variant::AB) == nested_commutator_oracle(m, n),
                    "m=" << m << " n=" << n);
  CHECK(zassenhaus_term(3, 7, Variant::AB).is_zero());
  CHECK_THROWS_AS(zassenhaus_term(2, 1, Variant::AB), ValidationError);
}

TEST_CASE("C_n monomial against the factorial formula") {
  for (int m = 1; m <= 6; ++m) {
    for (int n = 2; n <= m + 1; ++n) {
      const NumericPoly c = to_numeric(zassenhaus_term(m, n, Variant::AB));
      const Complex expect = std::pow(Complex(0, -1), n - 1) * factorial(m) /
                             (factorial(n) * factorial(m - n + 1));
      CHECK(c.terms().size() == 1);
      CHECK(c.degree() == m - n + 1);
      CHECK(std::abs(c.coeff(m - n + 1) - expect) < 1e-12 * std::abs(expect));
    }
  }
}

TEST_CASE("reversed order terms") {
  for (int m = 1; m <= 6; ++m) {
    for (int n = 2; n <= m + 2; ++n) {
      const PPoly ab = zassenhaus_term(m, n, Variant::AB);
      const PPoly ba = zassenhaus_term(m, n, Variant::BA);
      CHECK(ba == ab * ExactComplex(Rational(-(n - 1))));
      CHECK_MESSAGE(ba == ba_oracle(m, n), "m=" << m << " n=" << n);
    }
  }
}

TEST_CASE("m = 1 reduces to the Weyl relation") {
  const PPoly c2 = zassenhaus_term(1, 2, Variant::AB);
  CHECK(c2 == PPoly::monomial(0, ExactComplex(Rational(0), Rational(-1, 2))));
  const ExpansionTable t = expansion_table(1, Variant::AB);
  CHECK(t.terms.size() == 1);
  CHECK(t.terms[0].first == 2);
}

TEST_CASE("factorization identity on the truncated space") {
  for (int m = 1; m <= 2; ++m) {
    for (double lam : {0.1, 0.3}) {
      for (Variant v : {Variant::AB, Variant::BA}) {
        const FactorizationCheck r = verify_factorization(m, lam, FockDim(128), v);
        CHECK(r.residual < 1e-12);
        CHECK(r.envelope_mass < kEnvelopeLimit);
      }
    }
  }
  CHECK(verify_factorization(3, 0.1, FockDim(128), Variant::AB).residual < 1e-9);
  CHECK(verify_factorization(2, 0.0, FockDim(32), Variant::AB).residual == 0.0);
  // Appended C_n beyond m + 1 are zero and change nothing.
  const double base = verify_factorization(2, 0.2, FockDim(64), Variant::AB).residual;
  CHECK(verify_factorization(2, 0.2, FockDim(64), Variant::AB, 1, 3).residual ==
        doctest::Approx(base).epsilon(1e-6));
  CHECK_THROWS_AS(verify_factorization(3, 0.1, FockDim(7), Variant::AB), InvalidDimension);
}

TEST_CASE("factorization check reports truncation, then converges with d") {
  CHECK_THROWS_AS(verify_factorization(3, 0.3, FockDim(128), Variant::AB), EnvelopeViolation);
  const FactorizationCheck big = verify_factorization(3, 0.3, FockDim(512), Variant::AB);
  CHECK(big.residual < 1e-7);
}

TEST_CASE("theta2 derivative generators") {
  for (int m = 1; m <= 4; ++m) {
    for (int n : {1, 3}) {
      for (double t1 : {0.05, 0.2}) {
        // Reordered switch branch: N (P - N theta1)^m.
        const NumericPoly sw = phase_derivative_generator(m, t1, n, BranchKind::switch_branch);
        CHECK(max_diff(sw, binomial_shift(m, n, -n * t1)) <
              1e-12 * std::pow(1.0 + n * t1, m) * n);
        // cs branch: integral over s in [0, 2N] of (P - theta1 s)^m.
        NumericPoly cs_oracle;
        for (int k = 0; k <= m; ++k)
          cs_oracle.add_term(m - k, Complex(factorial(m) / (factorial(k) * factorial(m - k)) *
                                            std::pow(-t1, k) * std::pow(2.0 * n, k + 1) / (k + 1)));
        const NumericPoly cs = phase_derivative_generator(m, t1, n, BranchKind::cs_branch);
        CHECK(max_diff(cs, cs_oracle) < 1e-12 * std::pow(1.0 + 2 * n * t1, m) * 2 * n);
        for (const auto& [k, c] : cs.terms()) CHECK(c.imag() == 0.0);
      }
    }
  }
}

TEST_CASE("Hermitian operators from real polynomials") {
  const NumericPoly p = NumericPoly::monomial(2, Complex(1.5)) + NumericPoly::monomial(0, Complex(-2.0));
  const Operator op = to_operator(p, FockDim(12));
  CHECK(op.hermitian());
  const Operator mom = build_quadrature(FockDim(12), Quadrature::P);
  const Matrix expect = 1.5 * operator_power(mom, 2).matrix() - 2.0 * Matrix::Identity(12, 12);
  CHECK((op.matrix() - expect).cwiseAbs().maxCoeff() < 1e-14);
  CHECK_FALSE(to_operator(NumericPoly::monomial(1, kI), FockDim(12)).hermitian());
}
