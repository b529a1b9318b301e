#include "g2ldp/ldp.hpp"

#include <algorithm>
#include <cmath>

namespace g2ldp {

std::pair<double, Trajectory> rate_forward(const ControlPair& q, const SpectralField& X0,
                                           const CoefficientSet& c, const FluidParams& p,
                                           const SkeletonOptions& opt) {
  double cost = energy_cost(q.f) + entropy_cost(q.g, c.marks());
  return {cost, solve_skeleton(X0, q, c, p, opt)};
}

namespace {

struct EndpointProblem {
  const SpectralField* target;
  const SpectralField* x0;
  const CoefficientSet* coeffs;
  const FluidParams* params;
  const EndpointOptions* opt;
  std::size_t nf;
  std::size_t ng;  // g_intervals * marks

  ControlPair unpack(std::span<const double> x) const {
    ControlPair q;
    q.f = ScalarControl::constant(0.0, opt->horizon, opt->f_intervals);
    for (std::size_t i = 0; i < nf; ++i) q.f.values[i] = x[i];
    q.g = IntensityControl::constant(1.0, opt->horizon, coeffs->marks().size(),
                                     opt->g_intervals);
    for (std::size_t i = 0; i < ng; ++i) q.g.values[i] = std::exp(x[nf + i]);
    return q;
  }

  // returns {objective, cost, residual}
  std::array<double, 3> eval(std::span<const double> x, double weight) const {
    ControlPair q = unpack(x);
    double cost = energy_cost(q.f) + entropy_cost(q.g, coeffs->marks());
    SkeletonOptions so;
    so.dt = opt->dt;
    so.store_fields = false;
    so.nonlinearity = opt->nonlinearity;
    Trajectory traj = solve_skeleton(*x0, q, *coeffs, *params, so);
    double dist = norm_v(traj.final_state - *target, *params);
    double residual = opt->ball_radius > 0.0 ? std::max(0.0, dist - opt->ball_radius) : dist;
    return {cost + weight * residual * residual, cost, residual};
  }
};

}  // namespace

RateResult rate_endpoint(const SpectralField& target, const SpectralField& X0,
                         const CoefficientSet& c, const FluidParams& p,
                         const EndpointOptions& opt) {
  if (opt.f_intervals < 1 || opt.g_intervals < 1)
    throw std::invalid_argument("rate_endpoint: control grids need at least one cell");
  if (opt.penalty_schedule.empty())
    throw std::invalid_argument("rate_endpoint: empty penalty schedule");
  for (std::size_t i = 1; i < opt.penalty_schedule.size(); ++i)
    if (!(opt.penalty_schedule[i] > opt.penalty_schedule[i - 1]))
      throw std::invalid_argument("rate_endpoint: penalty weights must increase");

  EndpointProblem prob{&target, &X0, &c, &p, &opt, static_cast<std::size_t>(opt.f_intervals),
                       static_cast<std::size_t>(opt.g_intervals) * c.marks().size()};
  std::size_t dim = prob.nf + prob.ng;
  std::vector<double> x(dim, 0.0);  // f = 0, g = 1: the zero-cost starting point

  RateResult result;
  bool converged = false;
  double step = 1.0;
  for (std::size_t stage = 0; stage < opt.penalty_schedule.size(); ++stage) {
    double w = opt.penalty_schedule[stage];
    auto cur = prob.eval(x, w);
    converged = false;
    for (int iter = 0; iter < opt.max_iters_per_stage; ++iter) {
      result.trace.push_back({static_cast<int>(stage), iter, w, cur[0], cur[1], cur[2]});

      // central finite differences, probes fanned out in parallel
      std::vector<double> grad(dim, 0.0);
      std::vector<double> probes(2 * dim, 0.0);
      parallel_for(2 * dim, [&](std::size_t k) {
        std::size_t i = k / 2;
        double sign = (k % 2 == 0) ? 1.0 : -1.0;
        std::vector<double> xp(x);
        double h = opt.grad_step * std::max(1.0, std::abs(x[i]));
        xp[i] += sign * h;
        probes[k] = prob.eval(xp, w)[0];
      });
      double gnorm = 0.0;
      for (std::size_t i = 0; i < dim; ++i) {
        double h = opt.grad_step * std::max(1.0, std::abs(x[i]));
        grad[i] = (probes[2 * i] - probes[2 * i + 1]) / (2.0 * h);
        gnorm = std::max(gnorm, std::abs(grad[i]));
      }
      if (gnorm <= opt.grad_tol * (1.0 + std::abs(cur[0]))) {
        converged = true;
        break;
      }

      // backtracking line search along -grad
      bool improved = false;
      double trial_step = step * 2.0;
      for (int bt = 0; bt < 40; ++bt) {
        std::vector<double> xt(dim);
        for (std::size_t i = 0; i < dim; ++i) xt[i] = x[i] - trial_step * grad[i];
        auto val = prob.eval(xt, w);
        double decrease = 0.0;
        for (std::size_t i = 0; i < dim; ++i) decrease += grad[i] * grad[i];
        if (val[0] <= cur[0] - 1e-4 * trial_step * decrease) {
          x.swap(xt);
          cur = val;
          step = trial_step;
          improved = true;
          break;
        }
        trial_step *= 0.5;
      }
      if (!improved) {
        converged = gnorm <= 1e-3 * (1.0 + std::abs(cur[0]));
        break;
      }
    }
  }

  result.control = prob.unpack(x);
  result.value = energy_cost(result.control.f) + entropy_cost(result.control.g, c.marks());
  SkeletonOptions so;
  so.dt = opt.dt;
  so.store_fields = true;
  so.nonlinearity = opt.nonlinearity;
  result.trajectory = solve_skeleton(X0, result.control, c, p, so);
  double dist = norm_v(result.trajectory.final_state - target, p);
  result.terminal_residual =
      opt.ball_radius > 0.0 ? std::max(0.0, dist - opt.ball_radius) : dist;
  result.converged = converged;
  return result;
}

std::vector<double> skeleton_stability_errors(const ControlPair& q, std::span<const int> n_list,
                                              const SpectralField& X0, const CoefficientSet& c,
                                              const FluidParams& p, const SkeletonOptions& opt,
                                              double delta) {
  SkeletonOptions so = opt;
  so.store_fields = true;
  Trajectory ref = solve_skeleton(X0, q, c, p, so);
  std::vector<double> errors(n_list.size(), 0.0);
  std::vector<ControlPair> perturbed(n_list.size());
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    perturbed[i].f = oscillatory_perturbation(q.f, n_list[i]);
    perturbed[i].g = oscillatory_intensity(q.g, n_list[i], delta);
  }
  parallel_for(n_list.size(), [&](std::size_t i) {
    Trajectory t = solve_skeleton(X0, perturbed[i], c, p, so);
    errors[i] = sup_distance_v(t, ref, p);
  });
  return errors;
}

std::vector<SmallNoiseRow> small_noise_convergence(const ScalarControl* shift,
                                                   const IntensityControl* tilt,
                                                   std::span<const double> eps_list, int paths,
                                                   const SpectralField& X0,
                                                   const CoefficientSet& c,
                                                   const FluidParams& p, const SpdeOptions& opt,
                                                   uint64_t seed) {
  if (paths < 2) throw std::invalid_argument("small_noise_convergence: need >= 2 paths");
  ControlPair q;
  q.f = shift ? *shift : ScalarControl::zero(opt.horizon);
  q.g = tilt ? *tilt : IntensityControl::one(opt.horizon, c.marks().size());
  SkeletonOptions so;
  so.dt = opt.dt;
  so.store_fields = true;
  so.nonlinearity = opt.nonlinearity;
  so.cutoff = opt.cutoff;
  so.cutoff_level = opt.cutoff_level;
  Trajectory ref = solve_skeleton(X0, q, c, p, so);

  std::vector<SmallNoiseRow> table;
  for (std::size_t ei = 0; ei < eps_list.size(); ++ei) {
    double eps = eps_list[ei];
    std::vector<double> dist(paths, 0.0);
    parallel_for(static_cast<std::size_t>(paths), [&](std::size_t k) {
      SpdeOptions po = opt;
      po.store_fields = true;
      po.seed = derive_seed(seed, 0xc2, (ei << 24) ^ k);
      SpdePath path = solve_spde(X0, eps, shift, tilt, c, p, po);
      dist[k] = std::min(1.0, sup_distance_v(path.trajectory, ref, p));
    });
    SmallNoiseRow row;
    row.eps = eps;
    for (double d : dist) row.mean_bounded_dist += d;
    row.mean_bounded_dist /= paths;
    double var = 0.0;
    for (double d : dist) var += (d - row.mean_bounded_dist) * (d - row.mean_bounded_dist);
    row.stderr_ = std::sqrt(var / (paths - 1) / paths);
    table.push_back(row);
  }
  return table;
}

RareEventStudy rare_event_study(double radius, std::span<const double> eps_list, int paths,
                                const SpectralField& X0, const CoefficientSet& c,
                                const FluidParams& p, const SpdeOptions& opt,
                                std::span<const SpectralField> ray_directions,
                                const EndpointOptions& ropt, uint64_t seed) {
  if (!(radius >= 0.0)) throw std::invalid_argument("rare_event_study: radius must be >= 0");
  if (paths < 2) throw std::invalid_argument("rare_event_study: need >= 2 paths");

  ControlPair q0 = ControlPair::uncontrolled(opt.horizon, c.marks().size());
  SkeletonOptions so;
  so.dt = opt.dt;
  so.store_fields = false;
  so.nonlinearity = opt.nonlinearity;
  Trajectory base = solve_skeleton(X0, q0, c, p, so);
  const SpectralField center = base.final_state;

  RareEventStudy study;
  for (std::size_t ei = 0; ei < eps_list.size(); ++ei) {
    double eps = eps_list[ei];
    std::vector<int> hit(paths, 0);
    parallel_for(static_cast<std::size_t>(paths), [&](std::size_t k) {
      SpdeOptions po = opt;
      po.store_fields = false;
      po.seed = derive_seed(seed, 0xaa, (ei << 24) ^ k);
      SpdePath path = solve_spde(X0, eps, nullptr, nullptr, c, p, po);
      hit[k] = norm_v(path.trajectory.final_state - center, p) >= radius ? 1 : 0;
    });
    RareEventRow row;
    row.eps = eps;
    row.paths = paths;
    for (int h : hit) row.hits += h;
    row.p_hat = double(row.hits) / paths;
    row.stderr_ = std::sqrt(std::max(0.0, row.p_hat * (1.0 - row.p_hat)) / paths);
    row.flagged = row.hits < 10;
    row.neg_eps_log_p = row.hits > 0 ? -eps * std::log(row.p_hat) : 0.0;
    study.rows.push_back(row);
  }

  // Rate upper bound over the ray family of boundary targets.
  bool first = true;
  for (const SpectralField& dir : ray_directions) {
    double dn = norm_v(dir, p);
    if (!(dn > 0.0)) continue;
    SpectralField target = center;
    target.axpy(radius / dn, dir);
    RateResult rr = rate_endpoint(target, X0, c, p, ropt);
    if (first || rr.value < study.rate_bound) {
      study.rate_bound = rr.value;
      study.boundary_rate = std::move(rr);
      first = false;
    }
  }
  if (first) throw std::invalid_argument("rare_event_study: no usable ray direction");
  study.importance_p_hat = 0.0;

  // Girsanov-weighted rerun at the smallest eps with a usable plain estimate,
  // falling back to the largest eps.
  double eps_is = eps_list.front();
  for (const auto& row : study.rows)
    if (!row.flagged) eps_is = row.eps;
  study.importance_eps = eps_is;

  const ControlPair& qstar = study.boundary_rate.control;
  std::vector<double> west(paths, 0.0);
  parallel_for(static_cast<std::size_t>(paths), [&](std::size_t k) {
    SpdeOptions po = opt;
    po.store_fields = false;
    po.seed = derive_seed(seed, 0x15, k);
    SpdePath path = solve_spde(X0, eps_is, &qstar.f, &qstar.g, c, p, po);
    if (norm_v(path.trajectory.final_state - center, p) >= radius)
      west[k] = girsanov_weight(&qstar.f, &qstar.g, c.marks(), path.noise);
  });
  double mean_is = 0.0;
  for (double w : west) mean_is += w;
  mean_is /= paths;
  double var_is = 0.0;
  for (double w : west) var_is += (w - mean_is) * (w - mean_is);
  var_is /= (paths - 1);
  study.importance_p_hat = mean_is;

  double p_plain = 0.0;
  for (const auto& row : study.rows)
    if (row.eps == eps_is) p_plain = row.p_hat;
  double var_plain = p_plain * (1.0 - p_plain);
  study.importance_variance_ratio = var_is > 0.0 ? var_plain / var_is : 0.0;
  return study;
}

}  // namespace g2ldp
