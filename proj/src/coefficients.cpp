#include "g2ldp/coefficients.hpp"

#include <cmath>

namespace g2ldp {

CoefficientSet::CoefficientSet(std::string name, MarkSpace marks, StateMap drift, StateMap gain,
                               JumpMap jump, double lip_drift, double lip_gain, double lip_jump,
                               Envelope env0, Envelope env1, bool has_drift, bool has_gain,
                               bool has_jump)
    : name_(std::move(name)),
      marks_(std::move(marks)),
      drift_(std::move(drift)),
      gain_(std::move(gain)),
      jump_(std::move(jump)),
      lip_drift_(lip_drift),
      lip_gain_(lip_gain),
      lip_jump_(lip_jump),
      env0_(std::move(env0)),
      env1_(std::move(env1)),
      has_drift_(has_drift),
      has_gain_(has_gain),
      has_jump_(has_jump) {
  marks_.validate();
}

SpectralField CoefficientSet::smoothed_drift(const SpectralField& u, double t,
                                             const FluidParams& p) const {
  return solve_generalized_stokes(drift_(u, t), p);
}

SpectralField CoefficientSet::smoothed_gain(const SpectralField& u, double t,
                                            const FluidParams& p) const {
  return solve_generalized_stokes(gain_(u, t), p);
}

SpectralField CoefficientSet::smoothed_jump(double t, const SpectralField& u, std::size_t mark,
                                            const FluidParams& p) const {
  return solve_generalized_stokes(jump_(t, u, mark), p);
}

CoefficientSet CoefficientSet::zero(const FluidParams& p, MarkSpace marks) {
  int n = p.mode_cutoff;
  double side = p.domain_side;
  auto zf = [n, side](const SpectralField&, double) { return SpectralField(n, side); };
  auto zj = [n, side](double, const SpectralField&, std::size_t) {
    return SpectralField(n, side);
  };
  auto ze = [](double, std::size_t) { return 0.0; };
  return CoefficientSet("zero", std::move(marks), zf, zf, zj, 0.0, 0.0, 0.0, ze, ze, false,
                        false, false);
}

CoefficientSet CoefficientSet::default_family(const FluidParams& p, MarkSpace marks,
                                              DefaultFamilyShape shape) {
  marks.validate();
  std::size_t nmarks = marks.size();
  std::vector<double> betas = shape.jump_scales;
  std::vector<double> gammas = shape.jump_couplings;
  if (betas.empty())
    for (std::size_t j = 0; j < nmarks; ++j) betas.push_back(0.25 / double(j + 1));
  if (gammas.empty())
    for (std::size_t j = 0; j < nmarks; ++j) gammas.push_back(0.3 / double(j + 1));
  if (betas.size() != nmarks || gammas.size() != nmarks)
    throw std::invalid_argument("default_family: per-mark parameter size mismatch");

  double a = shape.drift_scale;
  double b = shape.gain_scale;
  FluidParams pc = p;
  pc.validate();

  auto drift = [a, pc](const SpectralField& u, double) {
    double r = norm_v(u, pc);
    double factor = r > 1e-300 ? a * std::tanh(r) / r : a;
    SpectralField out = u;
    out *= factor;
    return out;
  };
  auto gain = [b](const SpectralField& u, double) {
    SpectralField out = u;
    out *= b;
    return out;
  };

  std::vector<SpectralField> profiles;
  std::vector<double> profile_vnorm;
  for (std::size_t j = 0; j < nmarks; ++j) {
    profiles.push_back(smooth_profile_field(p.mode_cutoff, p.domain_side,
                                            static_cast<int>(j) + 1, 0.5));
    profile_vnorm.push_back(norm_v(profiles.back(), pc));
  }
  auto jump = [betas, gammas, profiles](double, const SpectralField& u, std::size_t mark) {
    SpectralField out = profiles.at(mark);
    out.axpy(gammas[mark], u);
    out *= betas[mark];
    return out;
  };

  // Exact constants for the affine/saturating shapes: the radial tanh
  // saturation is 1-Lipschitz, so squared constants come out as plain squares.
  double lip_drift = a * a;
  double lip_gain = b * b;
  double lip_jump = 0.0;
  for (std::size_t j = 0; j < nmarks; ++j)
    lip_jump += marks.weights[j] * betas[j] * betas[j] * gammas[j] * gammas[j];

  std::vector<double> e0(nmarks), e1(nmarks);
  for (std::size_t j = 0; j < nmarks; ++j) {
    e0[j] = betas[j] * std::max(profile_vnorm[j], gammas[j]);
    e1[j] = betas[j] * gammas[j];
  }
  auto env0 = [e0](double, std::size_t mark) { return e0.at(mark); };
  auto env1 = [e1](double, std::size_t mark) { return e1.at(mark); };

  return CoefficientSet("default", std::move(marks), std::move(drift), std::move(gain),
                        std::move(jump), lip_drift, lip_gain, lip_jump, std::move(env0),
                        std::move(env1));
}

CoefficientSet CoefficientSet::brownian_diagnostic(const FluidParams& p, MarkSpace marks,
                                                   SpectralField gain_field) {
  int n = p.mode_cutoff;
  double side = p.domain_side;
  auto zf = [n, side](const SpectralField&, double) { return SpectralField(n, side); };
  auto zj = [n, side](double, const SpectralField&, std::size_t) {
    return SpectralField(n, side);
  };
  auto gain = [gain_field](const SpectralField&, double) { return gain_field; };
  auto ze = [](double, std::size_t) { return 0.0; };
  return CoefficientSet("brownian_diagnostic", std::move(marks), zf, std::move(gain), zj, 0.0,
                        0.0, 0.0, ze, ze, false, true, false);
}

CoefficientSet CoefficientSet::jump_diagnostic(const FluidParams& p, MarkSpace marks,
                                               SpectralField jump_field,
                                               std::vector<double> jump_scales) {
  marks.validate();
  std::size_t nmarks = marks.size();
  if (jump_scales.empty()) jump_scales.assign(nmarks, 1.0);
  if (jump_scales.size() != nmarks)
    throw std::invalid_argument("jump_diagnostic: scale count mismatch");
  int n = p.mode_cutoff;
  double side = p.domain_side;
  double vn = norm_v(jump_field, p);
  auto zf = [n, side](const SpectralField&, double) { return SpectralField(n, side); };
  auto jump = [jump_field, jump_scales](double, const SpectralField&, std::size_t mark) {
    SpectralField out = jump_field;
    out *= jump_scales.at(mark);
    return out;
  };
  std::vector<double> e0(nmarks);
  for (std::size_t j = 0; j < nmarks; ++j) e0[j] = std::abs(jump_scales[j]) * vn;
  auto env0 = [e0](double, std::size_t mark) { return e0.at(mark); };
  auto env1 = [](double, std::size_t) { return 0.0; };
  return CoefficientSet("jump_diagnostic", std::move(marks), zf, zf, std::move(jump), 0.0, 0.0,
                        0.0, std::move(env0), std::move(env1), false, false, true);
}

// --- Checkers -----------------------------------------------------------------

namespace {
double ratio_or_zero(double num, double den) { return den > 0.0 ? num / den : 0.0; }
}  // namespace

bool LipschitzReport::within_declared(const CoefficientSet& c, double tol) const {
  return drift_zero_at_origin && gain_zero_at_origin &&
         ratio_drift <= c.lip_drift() * (1.0 + tol) + tol &&
         ratio_gain <= c.lip_gain() * (1.0 + tol) + tol &&
         ratio_jump <= c.lip_jump() * (1.0 + tol) + tol && env0_excess <= tol &&
         env1_excess <= tol;
}

LipschitzReport check_lipschitz(const CoefficientSet& c, const FluidParams& p, int samples,
                                uint64_t seed, double horizon) {
  if (samples < 1) throw std::invalid_argument("check_lipschitz: samples must be >= 1");
  Rng rng(derive_seed(seed, 0xc0ffee));
  LipschitzReport rep;
  SpectralField origin(p.mode_cutoff, p.domain_side);
  for (int s = 0; s < samples; ++s) {
    double t = horizon * rng.uniform();
    SpectralField u1 = random_real_field(p.mode_cutoff, p.domain_side, rng, 1.0, 0.8);
    SpectralField u2 = random_real_field(p.mode_cutoff, p.domain_side, rng, 1.0, 0.8);
    double dv2 = inner_v(u1 - u2, u1 - u2, p);
    if (dv2 <= 0.0) continue;

    SpectralField df = c.drift(u1, t) - c.drift(u2, t);
    SpectralField dg = c.gain(u1, t) - c.gain(u2, t);
    rep.ratio_drift = std::max(rep.ratio_drift, ratio_or_zero(inner_v(df, df, p), dv2));
    rep.ratio_gain = std::max(rep.ratio_gain, ratio_or_zero(inner_v(dg, dg, p), dv2));

    double jacc = 0.0;
    for (std::size_t j = 0; j < c.marks().size(); ++j) {
      SpectralField ds = c.jump(t, u1, j) - c.jump(t, u2, j);
      jacc += c.marks().weights[j] * inner_v(ds, ds, p);
    }
    rep.ratio_jump = std::max(rep.ratio_jump, ratio_or_zero(jacc, dv2));

    double un1 = norm_v(u1, p);
    for (std::size_t j = 0; j < c.marks().size(); ++j) {
      double sn = norm_v(c.jump(t, u1, j), p);
      rep.env0_excess = std::max(rep.env0_excess, sn / (1.0 + un1) - c.env0(t, j));
      SpectralField ds = c.jump(t, u1, j) - c.jump(t, u2, j);
      rep.env1_excess =
          std::max(rep.env1_excess, norm_v(ds, p) / std::sqrt(dv2) - c.env1(t, j));
    }

    SpectralField f0 = c.drift(origin, t);
    SpectralField g0 = c.gain(origin, t);
    if (norm_v(f0, p) > 0.0) rep.drift_zero_at_origin = false;
    if (norm_v(g0, p) > 0.0) rep.gain_zero_at_origin = false;
  }
  return rep;
}

GrowthReport check_growth(const CoefficientSet& c, const FluidParams& p, int samples,
                          uint64_t seed, double horizon) {
  if (samples < 1) throw std::invalid_argument("check_growth: samples must be >= 1");
  Rng rng(derive_seed(seed, 0x9e0b1e));
  GrowthReport rep;
  for (int s = 0; s < samples; ++s) {
    double t = horizon * rng.uniform();
    SpectralField u = random_real_field(p.mode_cutoff, p.domain_side, rng, 1.5, 0.7);
    double un2 = inner_v(u, u, p);
    double acc1 = 0.0, acc2 = 0.0;
    for (std::size_t j = 0; j < c.marks().size(); ++j) {
      double sn2 = inner_v(c.jump(t, u, j), c.jump(t, u, j), p);
      acc1 += c.marks().weights[j] * sn2;
      acc2 += c.marks().weights[j] * sn2 * sn2;
    }
    rep.ratio_q1 = std::max(rep.ratio_q1, acc1 / (1.0 + un2));
    rep.ratio_q2 = std::max(rep.ratio_q2, acc2 / (1.0 + un2 * un2));
  }
  return rep;
}

ExponentialIntegrabilityReport check_exponential_integrability(const CoefficientSet& c,
                                                               double delta, double horizon,
                                                               int time_cells) {
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be > 0");
  if (time_cells < 1) throw std::invalid_argument("time_cells must be >= 1");
  ExponentialIntegrabilityReport rep;
  double dt = horizon / time_cells;
  for (int i = 0; i < time_cells; ++i) {
    double t = (i + 0.5) * dt;
    for (std::size_t j = 0; j < c.marks().size(); ++j) {
      double w = c.marks().weights[j] * dt;
      rep.value0 += w * std::exp(delta * c.env0(t, j) * c.env0(t, j));
      rep.value1 += w * std::exp(delta * c.env1(t, j) * c.env1(t, j));
    }
  }
  return rep;
}

EntropyBudgetConstants entropy_budget_constants(const CoefficientSet& c, double m,
                                                std::span<const IntensityControl> trials) {
  if (trials.empty())
    throw std::invalid_argument("entropy_budget_constants: no trial controls");
  EntropyBudgetConstants out;
  for (const auto& g : trials) {
    g.validate();
    if (g.marks != c.marks().size())
      throw std::invalid_argument("entropy_budget_constants: mark count mismatch");
    if (entropy_cost(g, c.marks()) > m * (1.0 + 1e-12))
      throw std::invalid_argument("entropy_budget_constants: trial outside the cost budget");
    double c02 = 0.0, c01 = 0.0, c12 = 0.0, c11 = 0.0;
    for (std::size_t i = 0; i < g.intervals(); ++i) {
      double dt = g.times[i + 1] - g.times[i];
      double tm = 0.5 * (g.times[i] + g.times[i + 1]);
      for (std::size_t j = 0; j < g.marks; ++j) {
        double nu = c.marks().weights[j];
        double gv = g.values[i * g.marks + j];
        double s0 = c.env0(tm, j);
        double s1 = c.env1(tm, j);
        c02 += s0 * s0 * (gv + 1.0) * dt * nu;
        c01 += s0 * std::abs(gv - 1.0) * dt * nu;
        c12 += s1 * s1 * (gv + 1.0) * dt * nu;
        c11 += s1 * std::abs(gv - 1.0) * dt * nu;
      }
    }
    out.c02 = std::max(out.c02, c02);
    out.c01 = std::max(out.c01, c01);
    out.c12 = std::max(out.c12, c12);
    out.c11 = std::max(out.c11, c11);
  }
  return out;
}

}  // namespace g2ldp
