#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cvmet/bch.hpp"
#include "cvmet/strategies.hpp"

using namespace cvmet;

namespace {

StrategyConfig config(Strategy s, int m, int n, double t1, double t2) {
  StrategyConfig c;
  c.strategy = s;
  c.m = m;
  c.n_queries = n;
  c.theta1 = t1;
  c.theta2 = t2;
  return c;
}

}  // namespace

TEST_CASE("QState shape and norm") {
  const FockDim dim(4);
  Vector b = Vector::Zero(4);
  b(0) = 1.0;
  const QState s = QState::from_branches(dim, b, b);
  CHECK(s.amplitudes().size() == 8);
  CHECK(QState::control_dim() == 2);
  CHECK(s.block(1).norm() == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK_THROWS_AS(s.block(2), ValidationError);
  CHECK_THROWS_AS(QState(dim, Vector::Zero(8)), ContractViolation);
  CHECK_THROWS_AS(QState(dim, Vector::Zero(6)), InvalidDimension);
}

TEST_CASE("strategy names") {
  CHECK(strategy_from_string("qs") == Strategy::quantum_switch);
  CHECK(strategy_from_string("switch") == Strategy::quantum_switch);
  CHECK(strategy_from_string("cs") == Strategy::coherent_superposition);
  CHECK(strategy_from_string(to_string(Strategy::composite)) == Strategy::composite);
  CHECK_THROWS_AS(strategy_from_string("serial"), ValidationError);
}

TEST_CASE("query accounting") {
  const FockDim dim(32);
  const QState sw = switch_output(config(Strategy::quantum_switch, 1, 3, 0.1, 0.1), dim);
  CHECK(sw.queries().u1 == 3);
  CHECK(sw.queries().u2 == 3);
  const QState cs = cs_output(config(Strategy::coherent_superposition, 1, 3, 0.1, 0.1), dim);
  CHECK(cs.queries().u_plus == 6);
  CHECK(cs.queries().u_minus == 6);
}

TEST_CASE("commuting channels leave the control pure and product") {
  const FockDim dim(64);
  const QState s = switch_output(config(Strategy::quantum_switch, 2, 3, 0.0, 0.1), dim);
  CHECK(control_purity(s) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((s.block(0) - s.block(1)).norm() < 1e-12);
}

TEST_CASE("switch relative phase is +N^2 theta1 theta2 for m = 1") {
  const FockDim dim(96);
  for (int n : {1, 2, 4}) {
    for (double t : {0.05, 0.1}) {
      const StrategyConfig c = config(Strategy::quantum_switch, 1, n, t, t);
      const double phase = switch_relative_phase(c, dim);
      double expect = std::remainder(n * n * t * t, 2 * std::numbers::pi);
      CHECK(phase == doctest::Approx(expect).epsilon(1e-9));
    }
  }
}

TEST_CASE("linear closed form: sign of the order phase") {
  const FockDim dim(96);
  const StrategyConfig c = config(Strategy::quantum_switch, 1, 4, 0.1, 0.1);
  const QState sw = switch_output(c, dim);
  CHECK(fidelity(sw, switch_closed_form_linear(c, dim, +1)) > 1 - 1e-12);
  // Opposite sign: fidelity |cos(N^2 theta1 theta2)|.
  CHECK(fidelity(sw, switch_closed_form_linear(c, dim, -1)) ==
        doctest::Approx(std::abs(std::cos(0.16))).epsilon(1e-10));
}

TEST_CASE("factorized forms reproduce the channel sequences") {
  for (int m : {1, 2, 3}) {
    const FockDim dim(m == 3 ? 256 : 128);
    for (int n : {1, 2, 3}) {
      const double t = m == 3 ? 0.03 : 0.08;
      const StrategyConfig c = config(Strategy::quantum_switch, m, n, t, m == 3 ? 0.01 : 0.05);
      const QState sw = switch_output(c, dim);
      const QState cs = cs_output(c, dim);
      REQUIRE(envelope_mass(sw, m) < kEnvelopeLimit);
      REQUIRE(envelope_mass(cs, m) < kEnvelopeLimit);
      CHECK(fidelity(sw, switch_factorized(c, dim)) > 1 - 1e-9);
      CHECK(fidelity(cs, cs_factorized(c, dim)) > 1 - 1e-9);
    }
  }
}

TEST_CASE("composite realization equals the coherent superposition") {
  const FockDim dim(64);
  const StrategyConfig c = config(Strategy::coherent_superposition, 1, 3, 0.07, 0.04);
  for (double t : {0.25, 1.0, 3.0}) {
    const QState comp = composite_output(composite_params_for(c, t), 1, c.probe, dim);
    CHECK(fidelity(comp, cs_output(c, dim)) > 1 - 1e-12);
  }
  StrategyConfig via = c;
  via.strategy = Strategy::composite;
  CHECK(fidelity(strategy_output(via, dim), cs_output(c, dim)) > 1 - 1e-12);
  CHECK_THROWS_AS(composite_output(composite_params_for(c), 2, c.probe, dim), UnsupportedConfiguration);
  CHECK_THROWS_AS(composite_output(CompositeParams{0.1, 0.1, 0.0, 1}, 1, c.probe, dim),
                  ValidationError);
}

TEST_CASE("validation") {
  const FockDim dim(16);
  CHECK_THROWS_AS(switch_output(config(Strategy::quantum_switch, 1, 0, 0.1, 0.1), dim), ValidationError);
  CHECK_THROWS_AS(cs_output(config(Strategy::coherent_superposition, 0, 1, 0.1, 0.1), dim),
                  ValidationError);
  CHECK_THROWS_AS(switch_closed_form_linear(config(Strategy::quantum_switch, 2, 1, 0.1, 0.1), dim),
                  UnsupportedConfiguration);
  const QState s = switch_output(config(Strategy::quantum_switch, 1, 1, 0.1, 0.1), dim);
  const Operator xp = build_quadrature(dim, Quadrature::X) * build_quadrature(dim, Quadrature::P);
  CHECK_THROWS_AS(evolve(s, xp, 1.0), ContractViolation);
  CHECK_THROWS_AS(fidelity(s, switch_output(config(Strategy::quantum_switch, 1, 1, 0.1, 0.1), FockDim(17))),
                  InvalidDimension);
}

TEST_CASE("evolve acts on both branches") {
  const FockDim dim(48);
  const QState s = cs_output(config(Strategy::coherent_superposition, 1, 1, 0.1, 0.1), dim);
  const Operator x = build_quadrature(dim, Quadrature::X);
  const QState out = evolve(s, x, 0.4);
  const Propagator u(x);
  CHECK((out.block(0) - u.apply(s.block(0), 0.4)).norm() < 1e-13);
  CHECK((out.block(1) - u.apply(s.block(1), 0.4)).norm() < 1e-13);
  CHECK(control_purity(out) == doctest::Approx(control_purity(s)).epsilon(1e-12));
}
