#pragma once

#include <cstdint>
#include <span>
#include <utility>

#include "g2ldp/skeleton.hpp"
#include "g2ldp/stochastic.hpp"

namespace g2ldp {

/// Cost of one control candidate plus the deterministic path it produces.
std::pair<double, Trajectory> rate_forward(const ControlPair& q, const SpectralField& X0,
                                           const CoefficientSet& c, const FluidParams& p,
                                           const SkeletonOptions& opt);

struct OptimizerTraceRow {
  int stage = 0;
  int iter = 0;
  double penalty_weight = 0.0;
  double objective = 0.0;
  double cost = 0.0;
  double residual = 0.0;
};

struct RateResult {
  double value = 0.0;              ///< energy + entropy cost at the returned control
  ControlPair control;
  double terminal_residual = 0.0;  ///< |X(T) - target|_V (hinge distance in ball mode)
  Trajectory trajectory;
  std::vector<OptimizerTraceRow> trace;
  bool converged = false;
};

struct EndpointOptions {
  double horizon = 1.0;
  double dt = 1e-3;
  int f_intervals = 8;             ///< scalar control grid cells
  int g_intervals = 1;             ///< intensity control grid cells
  double ball_radius = 0.0;        ///< 0 = exact endpoint penalty, else hinge outside the ball
  std::vector<double> penalty_schedule = {10.0, 100.0, 1000.0};
  int max_iters_per_stage = 80;
  double grad_step = 1e-4;
  double grad_tol = 1e-7;
  bool nonlinearity = true;
};

/// Minimizes energy_cost(f) + entropy_cost(exp(theta)) + w |X(T)-target|_V^2
/// over piecewise-constant controls by finite-difference gradient descent with
/// backtracking, continuing over the penalty schedule.  The result is a
/// certified upper bound on the rate restricted to the grid class, not a
/// global optimum; non-convergence is reported through the trace.
RateResult rate_endpoint(const SpectralField& target, const SpectralField& X0,
                         const CoefficientSet& c, const FluidParams& p,
                         const EndpointOptions& opt);

/// Continuity of the control-to-solution map: perturbs q with oscillations of
/// frequency n and returns sup_t |X^{q_n}(t) - X^q(t)|_V per n.  dt must
/// divide all oscillation grids (1/(8 n_max) and 1/(2 n_max) cells).
std::vector<double> skeleton_stability_errors(const ControlPair& q, std::span<const int> n_list,
                                              const SpectralField& X0, const CoefficientSet& c,
                                              const FluidParams& p, const SkeletonOptions& opt,
                                              double delta = 0.5);

struct SmallNoiseRow {
  double eps = 0.0;
  double mean_bounded_dist = 0.0;  ///< E min(1, sup_t |X^eps - X^q|_V)
  double stderr_ = 0.0;
};

/// Distance, in the bounded sup-V proxy metric, between the noisy paths under
/// deterministic controls (shift, tilt) and their deterministic limit.
std::vector<SmallNoiseRow> small_noise_convergence(const ScalarControl* shift,
                                                   const IntensityControl* tilt,
                                                   std::span<const double> eps_list, int paths,
                                                   const SpectralField& X0,
                                                   const CoefficientSet& c,
                                                   const FluidParams& p, const SpdeOptions& opt,
                                                   uint64_t seed);

struct RareEventRow {
  double eps = 0.0;
  int hits = 0;
  int paths = 0;
  double p_hat = 0.0;
  double stderr_ = 0.0;
  double neg_eps_log_p = 0.0;
  bool flagged = false;  ///< too few hits; excluded from rate comparisons
};

struct RareEventStudy {
  std::vector<RareEventRow> rows;
  double rate_bound = 0.0;               ///< cheapest ray target endpoint cost
  double importance_variance_ratio = 0.0;  ///< plain MC variance / weighted variance
  double importance_p_hat = 0.0;
  double importance_eps = 0.0;
  RateResult boundary_rate;
};

/// Tail probabilities of {|X^eps(T) - X^0(T)|_V >= radius} under the
/// uncontrolled dynamics, the endpoint rate minimized over a ray family of
/// boundary targets, and a Girsanov-weighted importance-sampling rerun using
/// the minimizing control.
RareEventStudy rare_event_study(double radius, std::span<const double> eps_list, int paths,
                                const SpectralField& X0, const CoefficientSet& c,
                                const FluidParams& p, const SpdeOptions& opt,
                                std::span<const SpectralField> ray_directions,
                                const EndpointOptions& ropt, uint64_t seed);

}  // namespace g2ldp
