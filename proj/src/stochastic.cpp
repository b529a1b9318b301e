#include "g2ldp/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "g2ldp/skeleton.hpp"
#include "integrate.hpp"

namespace g2ldp {

MarkedPointStream sample_marked_poisson(double eps, const IntensityControl* tilt,
                                        const MarkSpace& marks, double horizon,
                                        uint64_t seed) {
  if (!(eps > 0.0)) throw std::invalid_argument("sample_marked_poisson: eps must be > 0");
  marks.validate();
  if (tilt) {
    tilt->validate();
    if (tilt->marks != marks.size())
      throw std::invalid_argument("sample_marked_poisson: tilt mark count mismatch");
    if (!(tilt->min_value() > 0.0))
      throw std::invalid_argument("sample_marked_poisson: tilt must be strictly positive");
  }

  struct Event {
    double t;
    std::size_t mark;
  };
  std::vector<Event> events;
  for (std::size_t j = 0; j < marks.size(); ++j) {
    double bound = 1.0;
    if (tilt) {
      bound = 0.0;
      for (std::size_t i = 0; i < tilt->intervals(); ++i)
        bound = std::max(bound, tilt->values[i * tilt->marks + j]);
    }
    if (bound <= 0.0) continue;
    double rate = bound * marks.weights[j] / eps;
    Rng rng(derive_seed(seed, 0x9a11, j));
    double t = 0.0;
    while (true) {
      t += rng.exponential(rate);
      if (t >= horizon) break;
      if (tilt && rng.uniform() > tilt->at(t, j) / bound) continue;
      events.push_back({t, j});
    }
  }
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
    return a.t < b.t || (a.t == b.t && a.mark < b.mark);
  });
  MarkedPointStream out;
  for (const auto& e : events) {
    out.times.push_back(e.t);
    out.marks.push_back(e.mark);
  }
  return out;
}

NoiseRealization sample_noise(double eps, const IntensityControl* tilt, const MarkSpace& marks,
                              double horizon, double dt, uint64_t seed) {
  NoiseRealization nr;
  nr.eps = eps;
  nr.horizon = horizon;
  nr.dt = dt;
  nr.seed = seed;
  std::size_t nsteps = detail::step_count(dt, horizon);
  if (eps > 0.0) nr.jumps = sample_marked_poisson(eps, tilt, marks, horizon, seed);

  // Merge the base grid with the jump times into the substep partition.
  nr.times.push_back(0.0);
  std::size_t je = 0;
  double tol = 1e-13 * std::max(1.0, horizon);
  for (std::size_t i = 1; i <= nsteps; ++i) {
    double tn = i == nsteps ? horizon : double(i) * dt;
    while (je < nr.jumps.count() && nr.jumps.times[je] < tn - tol) {
      if (nr.jumps.times[je] > nr.times.back() + tol) {
        nr.times.push_back(nr.jumps.times[je]);
        nr.jump_mark.push_back(static_cast<int>(nr.jumps.marks[je]));
      } else if (!nr.jump_mark.empty()) {
        // jump collides with an existing boundary: attach it there
        nr.jump_mark.back() = static_cast<int>(nr.jumps.marks[je]);
      }
      ++je;
    }
    nr.times.push_back(tn);
    nr.jump_mark.push_back(-1);
  }

  nr.dw.assign(nr.times.size() - 1, 0.0);
  if (eps > 0.0) {
    Rng rng(derive_seed(seed, 0xb201));
    for (std::size_t i = 0; i + 1 < nr.times.size(); ++i)
      nr.dw[i] = std::sqrt(nr.times[i + 1] - nr.times[i]) * rng.normal();
  }
  return nr;
}

namespace {
detail::IntegrateSpec make_spec(const SpectralField& X0, double eps,
                                const ScalarControl* shift, const IntensityControl* tilt,
                                const CoefficientSet& c, const FluidParams& p,
                                const SpdeOptions& opt) {
  detail::IntegrateSpec spec;
  spec.x0 = &X0;
  spec.eps = eps;
  spec.shift = shift;
  spec.tilt = tilt;
  spec.coeffs = &c;
  spec.params = &p;
  spec.dt = opt.dt;
  spec.horizon = opt.horizon;
  spec.store_fields = opt.store_fields;
  spec.nonlinearity = opt.nonlinearity;
  spec.cutoff = opt.cutoff;
  spec.cutoff_level = opt.cutoff_level;
  spec.blowup_w = opt.blowup_w;
  spec.track_convolution = opt.track_convolution;
  return spec;
}
}  // namespace

SpdePath solve_spde(const SpectralField& X0, double eps, const ScalarControl* shift,
                    const IntensityControl* tilt, const CoefficientSet& c,
                    const FluidParams& p, const SpdeOptions& opt) {
  if (eps < 0.0) throw std::invalid_argument("solve_spde: eps must be >= 0");
  NoiseRealization noise = sample_noise(eps, tilt, c.marks(), opt.horizon, opt.dt, opt.seed);
  return solve_spde(X0, eps, shift, tilt, c, p, opt, std::move(noise));
}

SpdePath solve_spde(const SpectralField& X0, double eps, const ScalarControl* shift,
                    const IntensityControl* tilt, const CoefficientSet& c,
                    const FluidParams& p, const SpdeOptions& opt, NoiseRealization noise) {
  detail::IntegrateSpec spec = make_spec(X0, eps, shift, tilt, c, p, opt);
  spec.noise = &noise;
  detail::IntegrateResult r = detail::integrate(spec);
  SpdePath path;
  path.trajectory = std::move(r.trajectory);
  path.convolution = std::move(r.convolution);
  for (const auto& row : r.jump_log)
    path.events.push_back({row.t, row.mark, row.w_before, row.w_after});
  path.noise = std::move(noise);
  path.eps = eps;
  return path;
}

Trajectory solve_stochastic_convolution(const SpectralField& X0, double eps,
                                        const ScalarControl* shift,
                                        const IntensityControl* tilt,
                                        const CoefficientSet& c, const FluidParams& p,
                                        SpdeOptions opt, const SpdePath& paired) {
  if (paired.eps != eps || std::abs(paired.noise.dt - opt.dt) > 1e-15 ||
      std::abs(paired.noise.horizon - opt.horizon) > 1e-12)
    throw std::invalid_argument(
        "solve_stochastic_convolution: noise realization does not match the request");
  opt.track_convolution = true;
  SpdePath replay = solve_spde(X0, eps, shift, tilt, c, p, opt, paired.noise);
  SpectralField diff = replay.trajectory.final_state - paired.trajectory.final_state;
  double scale = 1.0 + norm_v(paired.trajectory.final_state, p);
  if (norm_v(diff, p) > 1e-9 * scale)
    throw std::invalid_argument(
        "solve_stochastic_convolution: replayed path diverges from the paired path");
  return std::move(replay.convolution);
}

double girsanov_log_brownian(const ScalarControl& shift, const NoiseRealization& noise) {
  if (!(noise.eps > 0.0))
    throw std::invalid_argument("girsanov weight requires a noisy realization (eps > 0)");
  shift.validate();
  double stoch = 0.0;
  for (std::size_t i = 0; i + 1 < noise.times.size(); ++i)
    stoch += shift.at(noise.times[i]) * noise.dw[i];
  double quad = 0.0;
  for (std::size_t i = 0; i < shift.intervals(); ++i)
    quad += shift.values[i] * shift.values[i] * (shift.times[i + 1] - shift.times[i]);
  return stoch / std::sqrt(noise.eps) - 0.5 * quad / noise.eps;
}

double girsanov_log_jump(const IntensityControl& tilt, const MarkSpace& marks,
                         const NoiseRealization& noise) {
  if (!(noise.eps > 0.0))
    throw std::invalid_argument("girsanov weight requires a noisy realization (eps > 0)");
  tilt.validate();
  if (tilt.marks != marks.size())
    throw std::invalid_argument("girsanov_log_jump: mark count mismatch");
  if (!(tilt.min_value() > 0.0))
    throw std::invalid_argument("girsanov_log_jump: tilt must be strictly positive");
  double acc = 0.0;
  for (std::size_t e = 0; e < noise.jumps.count(); ++e)
    acc += std::log(1.0 / tilt.at(noise.jumps.times[e], noise.jumps.marks[e]));
  // compensating integral of (1 - 1/tilt) against the simulated intensity
  // tilt * nu / eps: the integrand collapses to (tilt - 1) * nu / eps.
  for (std::size_t i = 0; i < tilt.intervals(); ++i) {
    double dt = tilt.times[i + 1] - tilt.times[i];
    for (std::size_t j = 0; j < tilt.marks; ++j)
      acc += (tilt.values[i * tilt.marks + j] - 1.0) * marks.weights[j] * dt / noise.eps;
  }
  return acc;
}

double girsanov_weight(const ScalarControl* shift, const IntensityControl* tilt,
                       const MarkSpace& marks, const NoiseRealization& noise) {
  double log_w = 0.0;
  if (shift) log_w += girsanov_log_brownian(*shift, noise);
  if (tilt) log_w += girsanov_log_jump(*tilt, marks, noise);
  return std::exp(log_w);
}

std::vector<MomentScanRow> w_moment_scan(std::span<const double> eps_list, int m, int trials,
                                         const SpectralField& X0, const CoefficientSet& c,
                                         const FluidParams& p, const SpdeOptions& opt,
                                         uint64_t seed) {
  if (eps_list.empty() || trials < 1 || m < 1)
    throw std::invalid_argument("w_moment_scan: bad sizes");
  // Shared control sequence across the eps list so rows are paired.
  std::vector<ControlPair> controls;
  for (int t = 0; t < trials; ++t) {
    Rng ratio_rng(derive_seed(seed, 0x5ca1e, uint64_t(t)));
    double q1 = m * ratio_rng.uniform();
    double q2 = m * ratio_rng.uniform();
    controls.push_back(
        random_control_pair(opt.horizon, c.marks(), q1, q2, 10, derive_seed(seed, 7, t)));
  }

  std::vector<MomentScanRow> table;
  for (std::size_t ei = 0; ei < eps_list.size(); ++ei) {
    double eps = eps_list[ei];
    std::vector<double> sup2(trials, 0.0);
    std::vector<int> blowup(trials, 0);
    SpdeOptions o = opt;
    o.store_fields = false;
    parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
      SpdeOptions ot = o;
      ot.seed = derive_seed(seed, 0xe5, (ei << 20) ^ t);
      try {
        SpdePath path =
            solve_spde(X0, eps, &controls[t].f, &controls[t].g, c, p, ot);
        double s = path.trajectory.sup_norm_w();
        sup2[t] = s * s;
      } catch (const BlowupError&) {
        blowup[t] = 1;
      }
    });
    MomentScanRow row;
    row.eps = eps;
    int ok = 0;
    for (int t = 0; t < trials; ++t) {
      if (blowup[t]) {
        row.blowups++;
        continue;
      }
      row.mean_sup_w2 += sup2[t];
      ok++;
    }
    if (ok > 0) row.mean_sup_w2 /= ok;
    double var = 0.0;
    for (int t = 0; t < trials; ++t)
      if (!blowup[t]) var += (sup2[t] - row.mean_sup_w2) * (sup2[t] - row.mean_sup_w2);
    if (ok > 1) row.stderr_ = std::sqrt(var / (ok - 1) / ok);
    table.push_back(row);
  }
  return table;
}

}  // namespace g2ldp
