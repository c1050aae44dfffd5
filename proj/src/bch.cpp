#include "cvmet/bch.hpp"

#include <cmath>
#include <string>

namespace cvmet {
namespace {

using boost::multiprecision::cpp_int;

cpp_int factorial(int n) {
  cpp_int f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

void require_order(int m) {
  if (m < 1) throw ValidationError("nonlinearity order m must be >= 1");
}

}  // namespace

Complex ExactComplex::to_complex() const { return {to_double(re), to_double(im)}; }

std::string ExactComplex::str() const {
  if (im == 0) return re.str();
  if (re == 0) return im.str() + "i";
  return re.str() + (im > 0 ? "+" : "") + im.str() + "i";
}

ExactComplex& ExactComplex::operator+=(const ExactComplex& o) {
  re += o.re;
  im += o.im;
  return *this;
}

ExactComplex& ExactComplex::operator-=(const ExactComplex& o) {
  re -= o.re;
  im -= o.im;
  return *this;
}

ExactComplex& ExactComplex::operator*=(const ExactComplex& o) {
  Rational r = re * o.re - im * o.im;
  Rational i = re * o.im + im * o.re;
  re = std::move(r);
  im = std::move(i);
  return *this;
}

ExactComplex pow(const ExactComplex& base, int exponent) {
  if (exponent < 0) throw ValidationError("negative exponent in exact power");
  ExactComplex out(1);
  for (int k = 0; k < exponent; ++k) out *= base;
  return out;
}

NumericPoly to_numeric(const PPoly& p) {
  NumericPoly out;
  for (const auto& [k, c] : p.terms()) out.add_term(k, c.to_complex());
  return out;
}

Matrix substitute(const NumericPoly& p, FockDim dim) {
  Matrix out = Matrix::Zero(dim.d, dim.d);
  if (p.is_zero()) return out;
  const Matrix mom = build_quadrature(dim, Quadrature::P).matrix();
  Matrix power = Matrix::Identity(dim.d, dim.d);
  int current = 0;
  for (const auto& [k, c] : p.terms()) {
    for (; current < k; ++current) power = power * mom;
    out += c * power;
  }
  return out;
}

Operator to_operator(const NumericPoly& p, FockDim dim) {
  bool real = true;
  for (const auto& [k, c] : p.terms()) real = real && c.imag() == 0.0;
  return Operator(dim, substitute(p, dim), real);
}

std::string to_string(Variant v) { return v == Variant::AB ? "AB" : "BA"; }

PPoly zassenhaus_term(int m, int n, Variant variant) {
  require_order(m);
  if (n < 2) throw ValidationError("Zassenhaus terms start at n = 2");
  if (n > m + 1) return {};
  // (-i)^(n-1) m! / (n! (m-n+1)!)
  ExactComplex c = pow(-ExactComplex::i(), n - 1);
  c *= ExactComplex(Rational(factorial(m), factorial(n) * factorial(m - n + 1)));
  if (variant == Variant::BA) c *= ExactComplex(Rational(-(n - 1)));
  return PPoly::monomial(m - n + 1, c);
}

PPoly nested_commutator_oracle(int m, int n) {
  require_order(m);
  if (n < 1) throw ValidationError("nested commutator index must be >= 1");
  PPoly current = PPoly::monomial(m, ExactComplex(1));
  for (int step = 1; step < n; ++step) {
    // ad_X(c P^k) = i k c P^(k-1)
    PPoly next;
    for (const auto& [k, c] : current.terms())
      if (k > 0) next.add_term(k - 1, c * ExactComplex::i() * ExactComplex(k));
    current = std::move(next);
  }
  const Rational sign = (n - 1) % 2 == 0 ? Rational(1) : Rational(-1);
  return current * ExactComplex(sign / Rational(factorial(n)));
}

ExpansionTable expansion_table(int m, Variant variant) {
  ExpansionTable t;
  t.m = m;
  t.variant = variant;
  for (int n = 2; n <= m + 1; ++n) t.terms.emplace_back(n, zassenhaus_term(m, n, variant));
  return t;
}

NumericPoly zassenhaus_exponent(int m, Complex lambda, double a, double b, Variant variant) {
  NumericPoly out;
  for (int n = 2; n <= m + 1; ++n) {
    const Complex scale = std::pow(lambda, n) * std::pow(a, n - 1) * b;
    out += to_numeric(zassenhaus_term(m, n, variant)) * scale;
  }
  return out;
}

NumericPoly phase_derivative_generator(int m, double theta1, int n_queries, BranchKind kind) {
  require_order(m);
  if (n_queries < 1) throw ValidationError("query count N must be >= 1");
  const double N = n_queries;
  // The Zassenhaus exponent is linear in theta2; its theta2-derivative is
  // the exponent at theta2 = 1. Multiplying by i turns d/dtheta2 exp(S)
  // = S' exp(S) into the -i g convention.
  NumericPoly exponent_rate;
  double query = 0.0;
  if (kind == BranchKind::cs_branch) {
    query = 2.0 * N;
    exponent_rate = zassenhaus_exponent(m, Complex(0.0, -2.0 * N), theta1, 1.0, Variant::AB);
  } else {
    query = N;
    exponent_rate = zassenhaus_exponent(m, Complex(0.0, -N), theta1, 1.0, Variant::AB) -
                    zassenhaus_exponent(m, Complex(0.0, -N), theta1, 1.0, Variant::BA);
  }
  NumericPoly g = NumericPoly::monomial(m, Complex(query)) + exponent_rate * kI;
  // Coefficients are real by construction; drop rounding residue in the
  // imaginary parts so the result maps to a Hermitian operator.
  NumericPoly cleaned;
  for (const auto& [k, c] : g.terms()) {
    if (std::abs(c.imag()) > 1e-12 * std::max(1.0, std::abs(c.real())))
      throw ContractViolation("derivative generator has a non-real coefficient");
    cleaned.add_term(k, Complex(c.real(), 0.0));
  }
  return cleaned;
}

FactorizationCheck verify_factorization(int m, double lambda_im, FockDim dim, Variant variant,
                                        int occupied_levels, int extra_terms) {
  require_order(m);
  if (occupied_levels < 1 || occupied_levels > dim.d)
    throw ValidationError("occupied_levels must lie in [1, d]");
  if (dim.d < 2 * m + 2) throw InvalidDimension("factorization check needs d >= 2m + 2");

  const Operator x = build_quadrature(dim, Quadrature::X);
  const Operator pm = operator_power(build_quadrature(dim, Quadrature::P), m);
  const Complex lambda(0.0, -lambda_im);

  // exp(l S) with l = -i lambda_im is exp(-i lambda_im S).
  const Propagator lhs(x + pm);
  const Propagator ux(x);
  const Propagator upm(pm);

  NumericPoly exponent = zassenhaus_exponent(m, lambda, 1.0, 1.0, variant);
  for (int n = m + 2; n < m + 2 + extra_terms; ++n)
    exponent += to_numeric(zassenhaus_term(m, n, variant)) * std::pow(lambda, n);
  // exponent is anti-Hermitian: exp(S) = exp(-i K) with K = i S.
  const Propagator tail(to_operator(exponent * kI, dim));

  FactorizationCheck out;
  const int edge = dim.d - 2 * m;
  for (int j = 0; j < occupied_levels; ++j) {
    Vector e = Vector::Zero(dim.d);
    e(j) = 1.0;
    const Vector left = lhs.apply(e, lambda_im);
    Vector right = tail.apply(e, 1.0);
    if (variant == Variant::AB)
      right = ux.apply(upm.apply(right, lambda_im), lambda_im);
    else
      right = upm.apply(ux.apply(right, lambda_im), lambda_im);
    const double mass = std::max(tail_mass(left, edge), tail_mass(right, edge));
    out.envelope_mass = std::max(out.envelope_mass, mass);
    out.residual = std::max(out.residual, (left - right).cwiseAbs().maxCoeff());
  }
  if (out.envelope_mass > kEnvelopeLimit)
    throw EnvelopeViolation("factorization check leaves the truncation envelope (mass " +
                                sci(out.envelope_mass) + " beyond index " +
                                std::to_string(edge) + ")",
                            out.envelope_mass);
  return out;
}

}  // namespace cvmet
