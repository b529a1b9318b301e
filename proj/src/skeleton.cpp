#include "g2ldp/skeleton.hpp"

#include <cmath>

#include "integrate.hpp"

namespace g2ldp {

Trajectory solve_skeleton(const SpectralField& X0, const ControlPair& q,
                          const CoefficientSet& c, const FluidParams& p,
                          const SkeletonOptions& opt) {
  q.validate();
  detail::IntegrateSpec spec;
  spec.x0 = &X0;
  spec.eps = 0.0;
  spec.shift = &q.f;
  spec.tilt = &q.g;
  spec.coeffs = &c;
  spec.params = &p;
  spec.dt = opt.dt;
  spec.horizon = q.horizon();
  spec.store_fields = opt.store_fields;
  spec.nonlinearity = opt.nonlinearity;
  spec.cutoff = opt.cutoff;
  spec.cutoff_level = opt.cutoff_level;
  spec.blowup_w = opt.blowup_w;
  return detail::integrate(spec).trajectory;
}

std::vector<double> energy_report(Trajectory& traj, const ControlPair& q,
                                  const CoefficientSet& c, const FluidParams& p) {
  if (!traj.has_states())
    throw std::invalid_argument("energy_report: trajectory must store states");
  std::size_t n = traj.nodes();
  std::vector<double> rhs(n, 0.0);
  const auto& nu = c.marks().weights;

  // d/dt |X|_W^2 with the quadratic term dropped: it pairs to zero in the
  // W-inner product.
  auto rate = [&](std::size_t i) {
    const SpectralField& x = traj.state_at(i);
    double t = traj.times[i];
    double acc = -2.0 * p.kappa * inner_w(apply_filtered_stokes(x, p), x, p);
    acc += 2.0 * inner_w(c.smoothed_drift(x, t, p), x, p);
    double f = q.f.at(t);
    if (f != 0.0) acc += 2.0 * f * inner_w(c.smoothed_gain(x, t, p), x, p);
    for (std::size_t j = 0; j < nu.size(); ++j) {
      double g = q.g.at(t, j);
      if (g != 1.0)
        acc += 2.0 * (g - 1.0) * nu[j] * inner_w(c.smoothed_jump(t, x, j, p), x, p);
    }
    return acc;
  };

  std::vector<double> residual(n, 0.0);
  double integral = 0.0;
  double w0 = traj.norm_w[0] * traj.norm_w[0];
  double prev_rate = rate(0);
  for (std::size_t i = 1; i < n; ++i) {
    double cur = rate(i);
    integral += 0.5 * (prev_rate + cur) * (traj.times[i] - traj.times[i - 1]);
    prev_rate = cur;
    residual[i] = std::abs(traj.norm_w[i] * traj.norm_w[i] - (w0 + integral));
  }
  traj.energy_residual = residual;
  return residual;
}

ScalarControl random_scalar_control(double horizon, double q1_target, int grid_steps,
                                    uint64_t seed) {
  if (grid_steps < 1) throw std::invalid_argument("random_scalar_control: bad grid");
  Rng rng(derive_seed(seed, 0xf5ca1a2));
  ScalarControl f = ScalarControl::constant(0.0, horizon, grid_steps);
  double raw = 0.0;
  for (auto& v : f.values) {
    v = rng.normal();
    raw += v * v;
  }
  raw *= 0.5 * horizon / grid_steps;
  if (q1_target <= 0.0 || raw <= 0.0) {
    std::fill(f.values.begin(), f.values.end(), 0.0);
    return f;
  }
  double scale = std::sqrt(q1_target / raw);
  for (auto& v : f.values) v *= scale;
  return f;
}

IntensityControl random_intensity_control(double horizon, const MarkSpace& marks,
                                          double q2_target, int grid_steps, uint64_t seed) {
  if (grid_steps < 1) throw std::invalid_argument("random_intensity_control: bad grid");
  marks.validate();
  Rng rng(derive_seed(seed, 0x1d7e2517));
  IntensityControl g = IntensityControl::constant(1.0, horizon, marks.size(), grid_steps);
  if (q2_target <= 0.0) return g;
  std::vector<double> theta(g.values.size());
  bool all_zero = true;
  for (auto& t : theta) {
    t = rng.normal();
    if (t != 0.0) all_zero = false;
  }
  if (all_zero) return g;

  auto cost_at = [&](double s) {
    IntensityControl trial = g;
    for (std::size_t i = 0; i < theta.size(); ++i) trial.values[i] = std::exp(s * theta[i]);
    return entropy_cost(trial, marks);
  };
  double lo = 0.0, hi = 1.0;
  while (cost_at(hi) < q2_target && hi < 64.0) hi *= 2.0;
  for (int it = 0; it < 80; ++it) {
    double mid = 0.5 * (lo + hi);
    (cost_at(mid) < q2_target ? lo : hi) = mid;
  }
  double s = 0.5 * (lo + hi);
  for (std::size_t i = 0; i < theta.size(); ++i) g.values[i] = std::exp(s * theta[i]);
  return g;
}

ControlPair random_control_pair(double horizon, const MarkSpace& marks, double q1_target,
                                double q2_target, int grid_steps, uint64_t seed) {
  return {random_scalar_control(horizon, q1_target, grid_steps, derive_seed(seed, 1)),
          random_intensity_control(horizon, marks, q2_target, grid_steps,
                                   derive_seed(seed, 2))};
}

WBoundScan w_bound_scan(int m, int trials_per_level, const SpectralField& X0,
                        const CoefficientSet& c, const FluidParams& p,
                        const SkeletonOptions& opt, double horizon, std::size_t mark_count,
                        uint64_t seed) {
  if (m < 1 || trials_per_level < 1) throw std::invalid_argument("w_bound_scan: bad sizes");
  if (mark_count != c.marks().size())
    throw std::invalid_argument("w_bound_scan: mark count mismatch");

  // Trial family: the uncontrolled pair plus, for every budget level l <= m,
  // trials_per_level random pairs with costs <= l.  Seeds depend on (level,
  // trial) only, so the trial set is nested across budgets.
  std::vector<ControlPair> trials;
  trials.push_back(ControlPair::uncontrolled(horizon, mark_count));
  for (int level = 1; level <= m; ++level)
    for (int t = 0; t < trials_per_level; ++t) {
      Rng ratio_rng(derive_seed(seed, uint64_t(level), uint64_t(t)));
      double q1 = level * ratio_rng.uniform();
      double q2 = level * ratio_rng.uniform();
      trials.push_back(random_control_pair(horizon, c.marks(), q1, q2, 10,
                                           derive_seed(seed, uint64_t(level) << 16,
                                                       uint64_t(t))));
    }

  SkeletonOptions o = opt;
  o.store_fields = false;
  WBoundScan scan;
  scan.sup_w2.assign(trials.size(), 0.0);
  scan.cost_q1.assign(trials.size(), 0.0);
  scan.cost_q2.assign(trials.size(), 0.0);
  std::vector<int> blowup(trials.size(), 0);
  parallel_for(trials.size(), [&](std::size_t i) {
    scan.cost_q1[i] = energy_cost(trials[i].f);
    scan.cost_q2[i] = entropy_cost(trials[i].g, c.marks());
    try {
      Trajectory tr = solve_skeleton(X0, trials[i], c, p, o);
      double s = tr.sup_norm_w();
      scan.sup_w2[i] = s * s;
    } catch (const BlowupError&) {
      blowup[i] = 1;
    }
  });
  for (std::size_t i = 0; i < trials.size(); ++i) {
    scan.blowups += blowup[i];
    scan.max_sup_w2 = std::max(scan.max_sup_w2, scan.sup_w2[i]);
  }
  return scan;
}

UniquenessGap uniqueness_gap(const SpectralField& X0, const ControlPair& q,
                             const CoefficientSet& c, const FluidParams& p, double dt1,
                             double dt2, double c_b, const SkeletonOptions& base) {
  SkeletonOptions o1 = base;
  o1.dt = dt1;
  o1.store_fields = true;
  SkeletonOptions o2 = base;
  o2.dt = dt2;
  o2.store_fields = true;
  Trajectory a = solve_skeleton(X0, q, c, p, o1);
  Trajectory b = solve_skeleton(X0, q, c, p, o2);

  UniquenessGap out;
  out.gap_v = sup_distance_v(a, b, p);

  // Gronwall budget along the finer trajectory.
  const Trajectory& fine = a.nodes() >= b.nodes() ? a : b;
  const auto& nu = c.marks().weights;
  double integral = 0.0;
  double prev = 0.0;
  for (std::size_t i = 0; i < fine.nodes(); ++i) {
    double t = fine.times[i];
    double f = q.f.at(t);
    double jump_part = 0.0;
    for (std::size_t j = 0; j < nu.size(); ++j)
      jump_part += c.env1(t, j) * std::abs(q.g.at(t, j) - 1.0) * nu[j];
    double phi = c_b * fine.norm_w[i] + 2.0 * c.lip_drift() +
                 2.0 * c.lip_gain() * (1.0 + f * f) + 2.0 * jump_part;
    if (i > 0) integral += 0.5 * (prev + phi) * (fine.times[i] - fine.times[i - 1]);
    prev = phi;
  }
  out.gronwall_budget = std::exp(integral);
  return out;
}

}  // namespace g2ldp
