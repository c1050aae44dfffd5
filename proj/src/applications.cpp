#include "cvmet/applications.hpp"

#include <algorithm>
#include <cmath>

#include "cvmet/qfi.hpp"

namespace cvmet {
namespace {

constexpr int kEnvelopeMargin = 4;
constexpr double kEnvelope = 1e-12;
constexpr double kDerivativeFloor = 1e-9;
constexpr double kFdAgreement = 1e-4;
constexpr int kFdReductions = 3;

Operator kinetic(const OptomechParams& p) {
  const Operator mom = build_quadrature(p.mirror_dim, Quadrature::P);
  return operator_power(mom, 2) * (0.5 / p.mass);
}

Matrix cavity_x(FockDim cavity) { return build_quadrature(cavity, Quadrature::X).matrix(); }

}  // namespace

void validate(const OptomechParams& p) {
  if (!(p.mass > 0.0)) throw ValidationError("mirror mass must be positive");
  if (!(p.tau > 0.0)) throw ValidationError("tau must be positive");
  if (p.n_steps < 1) throw ValidationError("n_steps must be >= 1");
  if (p.cavity_dim.d < 3) throw InvalidDimension("cavity_dim must be >= 3");
  if (p.mirror_dim.d < 2 * kEnvelopeMargin) throw InvalidDimension("mirror_dim too small");
}

OptomechState::OptomechState(FockDim cavity, FockDim mirror, Vector amplitudes)
    : cavity_(cavity), mirror_(mirror), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != static_cast<Eigen::Index>(cavity.d) * mirror.d)
    throw InvalidDimension("optomechanical state has the wrong length");
  if (std::abs(amplitudes_.norm() - 1.0) > 1e-10)
    throw ContractViolation("optomechanical state is not normalized");
}

Vector OptomechState::mirror_block(int c) const {
  if (c < 0 || c >= cavity_.d) throw ValidationError("photon number out of range");
  return amplitudes_.segment(static_cast<Eigen::Index>(c) * mirror_.d, mirror_.d);
}

Complex OptomechState::cavity_expectation(const Matrix& op) const {
  if (op.rows() != cavity_.d || op.cols() != cavity_.d)
    throw InvalidDimension("cavity operator has the wrong size");
  Complex acc = 0.0;
  for (int i = 0; i < cavity_.d; ++i) {
    const Vector bi = mirror_block(i);
    for (int j = 0; j < cavity_.d; ++j)
      if (op(i, j) != Complex(0.0)) acc += op(i, j) * bi.dot(mirror_block(j));
  }
  return acc;
}

OptomechState optomech_state(const OptomechParams& p) {
  validate(p);
  const FockDim dm = p.mirror_dim;
  const Vector phi = prepare_probe(p.mirror_probe, dm).amplitudes();
  const Operator h0 = kinetic(p);
  const Operator h1 = h0 + Operator::identity(dm) * p.omega_c +
                      build_quadrature(dm, Quadrature::X) * p.g;
  const double t = p.n_steps * p.tau;
  const Vector b0 = Propagator(h0).apply(phi, t);
  const Vector b1 = Propagator(h1).apply(phi, t);

  const int edge = dm.d - kEnvelopeMargin;
  const double mass = std::max(tail_mass(b0, edge), tail_mass(b1, edge));
  if (mass > kEnvelope)
    throw EnvelopeViolation("mirror state reaches the truncation edge", mass);

  Vector amps = Vector::Zero(static_cast<Eigen::Index>(p.cavity_dim.d) * dm.d);
  const double s = 1.0 / std::sqrt(2.0);
  amps.segment(0, dm.d) = b0 * s;
  amps.segment(dm.d, dm.d) = b1 * s;
  return OptomechState(p.cavity_dim, dm, std::move(amps));
}

Operator optomech_full_hamiltonian(const OptomechParams& p) {
  validate(p);
  const int dc = p.cavity_dim.d;
  const int dm = p.mirror_dim.d;
  const Matrix x = build_quadrature(p.mirror_dim, Quadrature::X).matrix();
  const Matrix kin = kinetic(p).matrix();
  const Matrix id_m = Matrix::Identity(dm, dm);
  Matrix h = Matrix::Zero(static_cast<Eigen::Index>(dc) * dm, static_cast<Eigen::Index>(dc) * dm);
  for (int c = 0; c < dc; ++c)
    h.block(static_cast<Eigen::Index>(c) * dm, static_cast<Eigen::Index>(c) * dm, dm, dm) =
        kin + (p.omega_c * c) * id_m + (p.g * c) * x;
  return Operator(FockDim(dc * dm), std::move(h), true);
}

double photon_leakage(const OptomechState& s) {
  double mass = 0.0;
  for (int c = 2; c < s.cavity_dim().d; ++c) mass += s.mirror_block(c).squaredNorm();
  return mass;
}

std::pair<double, double> homodyne_moments(const OptomechParams& p) {
  const OptomechState s = optomech_state(p);
  const Matrix x = cavity_x(p.cavity_dim);
  return {s.cavity_expectation(x).real(), s.cavity_expectation(x * x).real()};
}

HomodyneResult homodyne_g_variance(const OptomechParams& p, double fd_step) {
  validate(p);
  HomodyneResult out;
  const auto [mean, second] = homodyne_moments(p);
  out.mean_x = mean;
  out.second_x = second;

  auto mean_at = [&](double g) {
    OptomechParams q = p;
    q.g = g;
    return homodyne_moments(q).first;
  };
  auto central = [&](double h) { return (mean_at(p.g + h) - mean_at(p.g - h)) / (2.0 * h); };

  double h = fd_step > 0.0 ? fd_step : 1e-4 * std::max(1.0, std::abs(p.g));
  for (int attempt = 0; attempt <= kFdReductions; ++attempt) {
    const double d_h = central(h);
    const double d_half = central(0.5 * h);
    out.derivative = (4.0 * d_half - d_h) / 3.0;
    out.step_used = h;
    const double scale = std::max(std::abs(d_h), std::abs(d_half));
    if (std::abs(d_h - d_half) <= kFdAgreement * scale || scale < kDerivativeFloor) {
      out.converged = true;
      break;
    }
    h *= 0.25;
  }
  if (std::abs(out.derivative) < kDerivativeFloor)
    throw UnidentifiableParameter("d<X_cav>/dg vanishes; g is not identifiable from homodyne data");
  out.delta2_g = (second - mean * mean) / (out.derivative * out.derivative);
  out.mirror_dim_used = p.mirror_dim.d;
  return out;
}

HomodyneResult homodyne_g_variance_adaptive(const OptomechParams& p, int cap, double fd_step) {
  OptomechParams q = p;
  while (true) {
    try {
      return homodyne_g_variance(q, fd_step);
    } catch (const EnvelopeViolation&) {
      if (2 * q.mirror_dim.d > cap) throw;
      q.mirror_dim = FockDim(2 * q.mirror_dim.d);
    }
  }
}

double optomech_qfi_g(const OptomechParams& p, double fd_step) {
  validate(p);
  const double h = fd_step > 0.0 ? fd_step : default_fd_step(p.g);
  const QfiEstimate f = qfi_fd(
      [&](double g) {
        OptomechParams q = p;
        q.g = g;
        return Vector(optomech_state(q).amplitudes());
      },
      p.g, h);
  if (!f.converged) throw NonConvergence("QFI of g: finite differences did not settle");
  return f.value;
}

ScalingFit fit_scaling(const std::vector<std::pair<double, double>>& points, bool expect_power_law) {
  if (points.size() < 4) throw ValidationError("fit_scaling needs at least 4 points");
  ScalingFit fit;
  for (const auto& [n, y] : points) {
    if (!(n > 0.0) || !(y > 0.0)) throw ValidationError("fit_scaling needs positive N and y");
    fit.points.emplace_back(std::log(n), std::log(y));
  }
  const double k = static_cast<double>(fit.points.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : fit.points) {
    mx += x;
    my += y;
  }
  mx /= k;
  my /= k;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [x, y] : fit.points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  if (sxx == 0.0) throw ValidationError("fit_scaling needs at least two distinct N");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0.0;
  for (const auto& [x, y] : fit.points) {
    const double r = y - (fit.intercept + fit.slope * x);
    ss_res += r * r;
  }
  fit.r_squared = syy > 0.0 ? std::clamp(1.0 - ss_res / syy, 0.0, 1.0) : 1.0;
  fit.power_law_ok = !expect_power_law || fit.r_squared >= 0.99;
  return fit;
}

}  // namespace cvmet
