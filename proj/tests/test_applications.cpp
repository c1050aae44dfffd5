#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cvmet/applications.hpp"

using namespace cvmet;

namespace {

OptomechParams small(int n) {
  OptomechParams p;
  p.n_steps = n;
  p.mirror_dim = FockDim(256);
  return p;
}

Complex branch_overlap(const OptomechState& s) {
  // Blocks carry amplitude 1/sqrt2 each.
  return 2.0 * s.mirror_block(0).dot(s.mirror_block(1));
}

// Vacuum mirror: e^{-iP^2 T/2M} and e^{-i(w + P^2/2M + gX)T} differ by a
// linear-potential kick, which gives the overlap in closed form.
Complex overlap_oracle(const OptomechParams& p) {
  const double t = p.n_steps * p.tau;
  const double g = p.g, m = p.mass;
  const double phase = -p.omega_c * t + g * g * t * t * t / (12 * m);
  const double decay = g * g * t * t * (1 + t * t / (4 * m * m)) / 4;
  return std::exp(Complex(-decay, phase));
}

}  // namespace

TEST_CASE("fit_scaling") {
  std::vector<std::pair<double, double>> pts;
  for (double n : {2.0, 4.0, 8.0, 16.0}) pts.emplace_back(n, 7.0 * std::pow(n, -3));
  const ScalingFit fit = fit_scaling(pts);
  CHECK(std::abs(fit.slope + 3.0) < 1e-12);
  CHECK(fit.intercept == doctest::Approx(std::log(7.0)).epsilon(1e-12));
  CHECK(fit.r_squared == doctest::Approx(1.0));
  CHECK(fit.points.size() == 4);

  const ScalingFit flat = fit_scaling({{1, 3}, {2, 3}, {3, 3}, {4, 3}});
  CHECK(flat.slope == 0.0);
  CHECK(flat.r_squared == 1.0);

  const ScalingFit noisy = fit_scaling({{1, 1}, {2, 9}, {3, 0.2}, {4, 5}});
  CHECK(noisy.r_squared >= 0.0);
  CHECK(noisy.r_squared <= 1.0);
  CHECK_FALSE(noisy.power_law_ok);
  CHECK(fit_scaling({{1, 1}, {2, 9}, {3, 0.2}, {4, 5}}, false).power_law_ok);

  CHECK_THROWS_AS(fit_scaling({{1, 1}, {2, 2}, {3, 3}}), ValidationError);
  CHECK_THROWS_AS(fit_scaling({{1, 1}, {2, 2}, {3, -3}, {4, 4}}), ValidationError);
  CHECK_THROWS_AS(fit_scaling({{0, 1}, {2, 2}, {3, 3}, {4, 4}}), ValidationError);
  CHECK_THROWS_AS(fit_scaling({{2, 1}, {2, 2}, {2, 3}, {2, 4}}), ValidationError);
}

TEST_CASE("parameter validation") {
  OptomechParams p = small(4);
  p.cavity_dim = FockDim(2);
  CHECK_THROWS_AS(optomech_state(p), InvalidDimension);
  p = small(4);
  p.mass = 0.0;
  CHECK_THROWS_AS(optomech_state(p), ValidationError);
  p = small(4);
  p.tau = -1.0;
  CHECK_THROWS_AS(optomech_state(p), ValidationError);
  p = small(0);
  CHECK_THROWS_AS(optomech_state(p), ValidationError);
}

TEST_CASE("no coupling, no cavity phase: identical branches") {
  OptomechParams p = small(6);
  p.g = 0.0;
  p.omega_c = 0.0;
  const OptomechState s = optomech_state(p);
  CHECK((s.mirror_block(0) - s.mirror_block(1)).norm() == 0.0);
  CHECK(std::abs(branch_overlap(s) - 1.0) < 1e-14);
}

TEST_CASE("branch overlap matches the closed form and decays with N") {
  double previous = 1.0;
  for (int n = 4; n <= 16; n += 2) {
    const OptomechParams p = small(n);
    const OptomechState s = optomech_state(p);
    const Complex ov = branch_overlap(s);
    CHECK(std::abs(ov - overlap_oracle(p)) < 1e-10);
    CHECK(std::abs(ov) < previous);
    previous = std::abs(ov);
  }
}

TEST_CASE("homodyne moments from the cavity operator algebra") {
  for (int n : {4, 9}) {
    const OptomechParams p = small(n);
    const OptomechState s = optomech_state(p);
    const auto [mean, second] = homodyne_moments(p);
    CHECK(mean == doctest::Approx(branch_overlap(s).real() / std::sqrt(2.0)).epsilon(1e-10));
    // (<0|X^2|0> + <1|X^2|1>)/2 = (1/2 + 3/2)/2.
    CHECK(second == doctest::Approx(1.0).epsilon(1e-12));
  }
  OptomechParams wide = small(5);
  wide.cavity_dim = FockDim(6);
  CHECK(homodyne_moments(wide).second == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("photon number is conserved") {
  const OptomechParams p = small(7);
  CHECK(photon_leakage(optomech_state(p)) == 0.0);

  OptomechParams q = small(3);
  q.mirror_dim = FockDim(40);
  q.cavity_dim = FockDim(4);
  const Operator h = optomech_full_hamiltonian(q);
  CHECK(h.hermitian());
  const int dm = q.mirror_dim.d;
  const Vector phi = prepare_probe(q.mirror_probe, q.mirror_dim).amplitudes();
  Vector psi = Vector::Zero(4 * dm);
  psi.segment(0, dm) = phi / std::sqrt(2.0);
  psi.segment(dm, dm) = phi / std::sqrt(2.0);
  const Vector out = Propagator(h).apply(psi, 0.9);
  CHECK(photon_leakage(OptomechState(q.cavity_dim, q.mirror_dim, out)) < 1e-24);
}

TEST_CASE("full Hamiltonian reproduces the two-branch state") {
  OptomechParams p = small(3);
  p.mirror_dim = FockDim(48);
  const int dm = 48;
  const Vector phi = prepare_probe(p.mirror_probe, p.mirror_dim).amplitudes();
  Vector psi = Vector::Zero(3 * dm);
  psi.segment(0, dm) = phi / std::sqrt(2.0);
  psi.segment(dm, dm) = phi / std::sqrt(2.0);
  const Vector out = Propagator(optomech_full_hamiltonian(p)).apply(psi, p.n_steps * p.tau);
  CHECK((out - optomech_state(p).amplitudes()).norm() < 1e-11);
}

TEST_CASE("homodyne variance") {
  const OptomechParams p = small(6);
  const HomodyneResult h = homodyne_g_variance(p);
  CHECK(h.converged);
  CHECK(h.delta2_g > 0.0);
  // Derivative of Re<phi0|phi1>/sqrt2 from the closed-form overlap.
  const double eps = 1e-5;
  OptomechParams up = p, dn = p;
  up.g += eps;
  dn.g -= eps;
  const double slope = (overlap_oracle(up).real() - overlap_oracle(dn).real()) / (2 * eps * std::sqrt(2.0));
  CHECK(h.derivative == doctest::Approx(slope).epsilon(1e-6));
  CHECK(h.delta2_g == doctest::Approx((1.0 - h.mean_x * h.mean_x) / (slope * slope)).epsilon(1e-6));
}

TEST_CASE("homodyne cannot beat the quantum Cramer-Rao bound") {
  for (int n : {4, 8, 12}) {
    const OptomechParams p = small(n);
    CHECK(homodyne_g_variance(p).delta2_g >= 1.0 / optomech_qfi_g(p));
  }
}

TEST_CASE("cavity phase is 2 pi periodic") {
  for (int n : {5, 10}) {
    OptomechParams p = small(n);
    const double base = homodyne_g_variance(p).delta2_g;
    p.omega_c += 2 * std::numbers::pi / (n * p.tau);
    CHECK(homodyne_g_variance(p).delta2_g == doctest::Approx(base).epsilon(1e-8));
  }
}

TEST_CASE("vanishing derivative is unidentifiable") {
  OptomechParams p = small(4);
  p.g = 0.0;
  p.omega_c = 0.0;
  CHECK_THROWS_AS(homodyne_g_variance(p), UnidentifiableParameter);
}

TEST_CASE("mirror envelope") {
  OptomechParams p = small(24);
  p.mirror_dim = FockDim(32);
  CHECK_THROWS_AS(optomech_state(p), EnvelopeViolation);
  CHECK_THROWS_AS(homodyne_g_variance_adaptive(p, 64), EnvelopeViolation);
  p.mirror_dim = FockDim(128);
  const HomodyneResult h = homodyne_g_variance_adaptive(p, 1024);
  CHECK(h.mirror_dim_used >= 256);
}
