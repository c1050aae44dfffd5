#include "cvmet/claims.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>

#include "cvmet/bch.hpp"

namespace cvmet {
namespace {

constexpr double kLinearRel = 1e-3;       // criteria 1, 2
constexpr double kCrossSweepRel = 1e-6;   // criterion 2, theta2 independence
constexpr double kRatioTol[] = {0.02, 0.05, 0.05};  // criterion 3, m = 1, 2, 3
constexpr double kSlopeTol = 0.05;        // criterion 4
constexpr double kResidualMax = 1e-7;     // criterion 5
constexpr double kFactorizedInfidelity = 1e-7;  // criterion 6
constexpr double kCompositeInfidelity = 1e-12;  // criterion 7
constexpr double kOptomechSlope = -6.0;   // criterion 8
constexpr double kOptomechSlopeTol = 0.2;
constexpr double kPlateauVariation = 0.10;
constexpr double kGaugeRel = 1e-9;        // criterion 9
constexpr double kLeakageMax = 1e-24;
constexpr double kCommutatorTol = 1e-12;

const std::vector<int> kLargeN{100, 200, 400, 800};

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

struct Check {
  bool ok = true;
  std::ostringstream notes;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      if (!ok) notes << "; ";
      else notes.str("");
      ok = false;
      notes << what;
    }
  }
};

ClaimResult timed(int id, std::string name, const std::function<void(Check&)>& body) {
  ClaimResult r;
  r.id = id;
  r.name = std::move(name);
  const auto t0 = std::chrono::steady_clock::now();
  Check c;
  try {
    body(c);
  } catch (const std::exception& e) {
    c.require(false, std::string("exception: ") + e.what());
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.passed = c.ok;
  r.detail = c.notes.str();
  return r;
}

StrategyConfig linear(Strategy s, int n) {
  StrategyConfig c;
  c.strategy = s;
  c.m = 1;
  c.theta1 = 0.1;
  c.theta2 = 0.1;
  c.n_queries = n;
  return c;
}

// 1 ---------------------------------------------------------------------------
void switch_linear(const RunConfig& cfg, Check& c) {
  double worst = 0.0;
  for (int n : {2, 4, 6, 8}) {
    const StrategyConfig s = linear(Strategy::quantum_switch, n);
    const double expect = s.theta2 * s.theta2 * std::pow(n, 4) + 4.0 * n * n * 0.5;
    for (Parameter p : {Parameter::theta1, Parameter::theta2}) {
      const QfiEstimate f = qfi_fd_converged(s, p, cfg.loop);
      const double e = rel(f.value, expect);
      worst = std::max(worst, e);
      c.require(f.converged, "N=" + std::to_string(n) + " " + to_string(p) + " not converged");
      c.require(e < kLinearRel, "N=" + std::to_string(n) + " " + to_string(p) + " F=" +
                                    num(f.value) + " expected " + num(expect));
    }
  }
  if (c.ok) c.notes << "max rel err " << num(worst) << " (tol " << kLinearRel << ")";
}

// 2 ---------------------------------------------------------------------------
void cs_linear(const RunConfig& cfg, Check& c) {
  double worst = 0.0;
  for (int n : {2, 4, 6, 8}) {
    const StrategyConfig s = linear(Strategy::coherent_superposition, n);
    const double expect = 16.0 * std::pow(n, 4) * s.theta1 * s.theta1 + 16.0 * n * n * 0.5;
    const QfiEstimate fd = qfi_fd_converged(s, Parameter::theta2, cfg.loop);
    const QfiEstimate gen = qfi_generator_converged(s, Parameter::theta2, cfg.loop);
    const std::string tag = "N=" + std::to_string(n);
    c.require(fd.converged && gen.converged, tag + " not converged");
    c.require(rel(fd.value, gen.value) < kLinearRel,
              tag + " fd " + num(fd.value) + " vs generator " + num(gen.value));
    c.require(rel(fd.value, expect) < kLinearRel,
              tag + " F=" + num(fd.value) + " expected " + num(expect));
    worst = std::max({worst, rel(fd.value, expect), rel(gen.value, expect)});
  }
  // theta2 enters only through the branch sign: F must not move with it.
  StrategyConfig s = linear(Strategy::coherent_superposition, 4);
  double ref = 0.0, spread = 0.0;
  for (double t2 : {0.02, 0.05, 0.1, 0.2}) {
    s.theta2 = t2;
    const double f = qfi_fd_converged(s, Parameter::theta2, cfg.loop).value;
    if (ref == 0.0) ref = f;
    spread = std::max(spread, rel(f, ref));
  }
  c.require(spread < kCrossSweepRel, "F varies with theta2 at fixed theta1: rel " + num(spread));
  if (c.ok)
    c.notes << "max rel err " << num(worst) << "; theta2 cross-sweep spread " << num(spread);
}

// 3 ---------------------------------------------------------------------------
void ratios(const RunConfig& cfg, Check& c) {
  std::ostringstream summary;
  for (int m = 1; m <= 3; ++m) {
    StrategyConfig s = cfg.strategy;
    s.m = m;
    s.theta1 = 0.1;
    s.theta2 = 0.1;
    s.probe = ProbeSpec::vacuum();
    int chosen = 0;
    for (int n : kLargeN) {
      s.n_queries = n;
      if (large_n_gate(s)) chosen = n;
    }
    c.require(chosen > 0, "m=" + std::to_string(m) + ": no N passes the large-N gate");
    if (!chosen) continue;
    s.n_queries = chosen;
    const RatioResult r = precision_ratio(s, QfiMethod::generator_exact, cfg.loop);
    const double e = rel(r.measured, r.formula);
    c.require(r.converged, "m=" + std::to_string(m) + " not converged");
    c.require(e <= kRatioTol[m - 1], "m=" + std::to_string(m) + " ratio " + num(r.measured) +
                                         " vs " + num(r.formula));
    summary << (m > 1 ? "; " : "") << "m=" << m << " N=" << chosen << " ratio " << num(r.measured)
            << " (" << num(r.formula) << ")";
  }
  if (c.ok) c.notes << summary.str();
}

// 4 ---------------------------------------------------------------------------
void slopes(const RunConfig& cfg, Check& c) {
  std::ostringstream summary;
  for (int m = 1; m <= 3; ++m) {
    for (Strategy st : {Strategy::coherent_superposition, Strategy::quantum_switch}) {
      std::vector<std::pair<double, double>> pts;
      for (int n : kLargeN) {
        StrategyConfig s;
        s.strategy = st;
        s.m = m;
        s.n_queries = n;
        const QfiEstimate f = qfi_generator_converged(s, Parameter::theta2, cfg.loop);
        pts.emplace_back(n, crb_precision(f, 1).delta_theta);
      }
      const ScalingFit fit = fit_scaling(pts);
      const std::string tag = "m=" + std::to_string(m) + " " + to_string(st);
      c.require(std::abs(fit.slope + (m + 1)) <= kSlopeTol, tag + " slope " + num(fit.slope));
      summary << (summary.tellp() > 0 ? "; " : "") << tag << " " << num(fit.slope);
    }
  }
  if (c.ok) c.notes << summary.str();
}

// 5 ---------------------------------------------------------------------------
void zassenhaus(const RunConfig&, Check& c) {
  int exact = 0;
  for (int m = 1; m <= 6; ++m) {
    for (int n = 2; n <= m + 2; ++n) {
      const PPoly ab = zassenhaus_term(m, n, Variant::AB);
      const PPoly ba = zassenhaus_term(m, n, Variant::BA);
      const std::string tag = "m=" + std::to_string(m) + " n=" + std::to_string(n);
      c.require(ab == nested_commutator_oracle(m, n), tag + " C_n differs from the commutator oracle");
      c.require(ba == ab * ExactComplex(Rational(-(n - 1))), tag + " C'_n != -(n-1) C_n");
      ++exact;
    }
  }
  double worst = 0.0;
  for (int m = 1; m <= 3; ++m) {
    for (double lam : {0.1, 0.2, 0.3}) {
      for (Variant v : {Variant::AB, Variant::BA}) {
        const std::string tag = "m=" + std::to_string(m) + " lambda=" + num(lam) + " " + to_string(v);
        try {
          const FactorizationCheck r = verify_factorization(m, lam, FockDim(128), v);
          worst = std::max(worst, r.residual);
          c.require(r.residual < kResidualMax, tag + " residual " + num(r.residual));
        } catch (const EnvelopeViolation& e) {
          c.require(false, tag + " envelope violated at d=128 (mass " + num(e.mass()) + ")");
        }
      }
    }
  }
  if (c.ok) c.notes << exact << " exact term pairs; max residual " << num(worst);
}

// 6 ---------------------------------------------------------------------------
void factorized_forms(const RunConfig&, Check& c) {
  const double grid[] = {0.02, 0.06, 0.1};
  double worst = 0.0;
  for (int m : {1, 2}) {
    for (int n = 1; n <= 6; ++n) {
      for (double t1 : grid) {
        for (double t2 : grid) {
          StrategyConfig s;
          s.m = m;
          s.n_queries = n;
          s.theta1 = t1;
          s.theta2 = t2;
          const FockDim dim(128);
          const std::string tag = "m=" + std::to_string(m) + " N=" + std::to_string(n) +
                                  " theta=(" + num(t1) + "," + num(t2) + ")";
          const QState sw = switch_output(s, dim);
          const QState cs = cs_output(s, dim);
          c.require(envelope_mass(sw, m) < kEnvelopeLimit && envelope_mass(cs, m) < kEnvelopeLimit,
                    tag + " envelope violated");
          const double f_sw = fidelity(sw, switch_factorized(s, dim));
          const double f_cs = fidelity(cs, cs_factorized(s, dim));
          double f_lin = 1.0;
          if (m == 1) f_lin = fidelity(sw, switch_closed_form_linear(s, dim, +1));
          worst = std::max({worst, 1.0 - f_sw, 1.0 - f_cs, 1.0 - f_lin});
          c.require(f_sw >= 1.0 - kFactorizedInfidelity, tag + " switch fidelity " + num(f_sw));
          c.require(f_cs >= 1.0 - kFactorizedInfidelity, tag + " cs fidelity " + num(f_cs));
          c.require(f_lin >= 1.0 - kFactorizedInfidelity, tag + " linear closed form " + num(f_lin));
        }
      }
    }
  }
  if (c.ok) c.notes << "max infidelity " << num(worst);
}

// 7 ---------------------------------------------------------------------------
void composite(const RunConfig&, Check& c) {
  const double grid[] = {0.02, 0.06, 0.1};
  double worst = 0.0;
  for (int n : {1, 2, 4}) {
    for (double t1 : grid) {
      for (double t2 : grid) {
        for (double t : {0.5, 1.0, 2.0}) {
          StrategyConfig s;
          s.n_queries = n;
          s.theta1 = t1;
          s.theta2 = t2;
          const FockDim dim(64);
          const double f = fidelity(composite_output(composite_params_for(s, t), 1, s.probe, dim),
                                    cs_output(s, dim));
          worst = std::max(worst, 1.0 - f);
          c.require(f >= 1.0 - kCompositeInfidelity, "N=" + std::to_string(n) + " T=" + num(t) +
                                                         " fidelity " + num(f));
        }
      }
    }
  }
  if (c.ok) c.notes << "max infidelity " << num(worst);
}

// 8 ---------------------------------------------------------------------------
void optomech(const RunConfig& cfg, Check& c) {
  std::vector<std::pair<double, double>> pts;
  std::vector<double> scaled;
  double crb_margin = INFINITY;
  for (int n = 8; n <= 24; n += 2) {
    OptomechParams p = cfg.optomech;
    p.n_steps = n;
    const HomodyneResult h = homodyne_g_variance_adaptive(p, cfg.optomech_dim_cap);
    p.mirror_dim = FockDim(h.mirror_dim_used);
    const double bound = 1.0 / optomech_qfi_g(p);
    crb_margin = std::min(crb_margin, h.delta2_g / bound);
    c.require(h.delta2_g >= bound, "N=" + std::to_string(n) + " homodyne beats the QFI bound");
    pts.emplace_back(n, h.delta2_g);
    scaled.push_back(h.delta2_g * p.g * p.g * std::pow(n, 6));
  }
  const ScalingFit fit = fit_scaling(pts);
  const std::size_t half = scaled.size() / 2;
  double lo = INFINITY, hi = -INFINITY, mean = 0.0;
  for (std::size_t i = half; i < scaled.size(); ++i) {
    lo = std::min(lo, scaled[i]);
    hi = std::max(hi, scaled[i]);
    mean += scaled[i];
  }
  mean /= static_cast<double>(scaled.size() - half);
  const double variation = (hi - lo) / mean;
  c.require(std::abs(fit.slope - kOptomechSlope) <= kOptomechSlopeTol,
            "slope " + num(fit.slope) + " (r2 " + num(fit.r_squared) + ")");
  c.require(variation < kPlateauVariation,
            "delta2_g g^2 N^6 varies by " + num(variation) + " over the top half");
  if (c.ok)
    c.notes << "slope " << num(fit.slope) << "; plateau variation " << num(variation);
  c.notes << "; min delta2_g F_g " << num(crb_margin) << "; delta2_g g^2 N^6 at N=24 "
          << num(scaled.back()) << " (diagnostic, reference constant 72)";
}

// 9 ---------------------------------------------------------------------------
void properties(const RunConfig& cfg, Check& c) {
  // Gauge: a theta-independent global phase leaves F unchanged.
  for (Strategy st : {Strategy::coherent_superposition, Strategy::quantum_switch}) {
    StrategyConfig s;
    s.strategy = st;
    s.m = 2;
    s.n_queries = 3;
    const FockDim dim(64);
    const StateBuilder plain = strategy_builder(s, Parameter::theta2, dim);
    const StateBuilder phased = [&](double t) {
      return Vector(plain(t) * std::exp(Complex(0.0, 0.7)));
    };
    const double h = default_fd_step(s.theta2);
    const double a = qfi_fd(plain, s.theta2, h).value;
    const double b = qfi_fd(phased, s.theta2, h).value;
    c.require(rel(b, a) < kGaugeRel, "gauge invariance broken for " + to_string(st));
  }
  // Non-negativity over a small grid, including degenerate points.
  for (Strategy st : {Strategy::coherent_superposition, Strategy::quantum_switch}) {
    for (double t1 : {0.0, 0.05, -0.1}) {
      for (int m : {1, 2}) {
        StrategyConfig s;
        s.strategy = st;
        s.m = m;
        s.theta1 = t1;
        s.n_queries = 2;
        for (Parameter p : {Parameter::theta1, Parameter::theta2}) {
          const double f = qfi_fd(strategy_builder(s, p, FockDim(64)),
                                  p == Parameter::theta1 ? s.theta1 : s.theta2,
                                  default_fd_step(0.1))
                               .value;
          c.require(f >= 0.0, "negative QFI");
        }
      }
    }
  }
  // Photon number is conserved by the full optomechanical Hamiltonian.
  {
    OptomechParams p = cfg.optomech;
    p.mirror_dim = FockDim(48);
    p.n_steps = 2;
    const Operator h = optomech_full_hamiltonian(p);
    const int dm = p.mirror_dim.d;
    const Vector phi = prepare_probe(p.mirror_probe, p.mirror_dim).amplitudes();
    Vector psi = Vector::Zero(static_cast<Eigen::Index>(p.cavity_dim.d) * dm);
    psi.segment(0, dm) = phi / std::sqrt(2.0);
    psi.segment(dm, dm) = phi / std::sqrt(2.0);
    const Vector out = Propagator(h).apply(psi, p.n_steps * p.tau);
    const double leak = photon_leakage(OptomechState(p.cavity_dim, p.mirror_dim, out));
    c.require(leak <= kLeakageMax, "photon leakage " + num(leak));
    p.mirror_dim = cfg.optomech.mirror_dim;
    c.require(photon_leakage(optomech_state(p)) == 0.0, "branch construction leaks photons");
  }
  // Truncated commutator: i on the diagonal except i(1 - d) in the corner.
  for (int d : {8, 64, 256}) {
    const FockDim dim(d);
    const Matrix x = build_quadrature(dim, Quadrature::X).matrix();
    const Matrix p = build_quadrature(dim, Quadrature::P).matrix();
    Matrix expect = kI * Matrix::Identity(d, d);
    expect(d - 1, d - 1) = kI * double(1 - d);
    const double dev = (x * p - p * x - expect).cwiseAbs().maxCoeff();
    c.require(dev < kCommutatorTol, "[X,P] structure off by " + num(dev) + " at d=" + std::to_string(d));
  }
  // CSV determinism: same config, same bytes below the version line.
  {
    RunConfig s = cfg;
    s.command = "sweep";
    s.strategy = StrategyConfig{};
    s.strategy.m = 2;
    s.sweep_param = "n_queries";
    s.sweep_values = {1, 2, 3, 4};
    auto body = [](const std::string& csv) { return csv.substr(csv.find('\n') + 1); };
    const std::string a = body(to_csv(execute(s).table));
    const std::string b = body(to_csv(execute(s).table));
    c.require(a == b, "sweep CSV differs between runs");
  }
  if (c.ok) c.notes << "gauge, non-negativity, photon number, [X,P], CSV determinism";
}

}  // namespace

std::vector<ClaimResult> run_claims(const RunConfig& cfg) {
  std::vector<ClaimResult> out;
  auto add = [&](int id, const char* name, void (*fn)(const RunConfig&, Check&)) {
    out.push_back(timed(id, name, [&](Check& c) { fn(cfg, c); }));
  };
  add(1, "switch linear QFI", switch_linear);
  add(2, "coherent-superposition linear QFI", cs_linear);
  add(3, "precision ratios", ratios);
  add(4, "scaling exponents", slopes);
  add(5, "Zassenhaus suite", zassenhaus);
  add(6, "factorized-state oracles", factorized_forms);
  add(7, "composite realization", composite);
  add(8, "optomechanical N^-6 law", optomech);
  add(9, "property suites", properties);
  return out;
}

}  // namespace cvmet
