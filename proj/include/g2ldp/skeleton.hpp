#pragma once

#include <cstdint>
#include <span>

#include "g2ldp/coefficients.hpp"
#include "g2ldp/controls.hpp"
#include "g2ldp/trajectory.hpp"

namespace g2ldp {

struct SkeletonOptions {
  double dt = 1e-3;
  bool store_fields = true;
  bool nonlinearity = true;    ///< diagnostics may switch the quadratic term off
  bool cutoff = false;         ///< enable the V-norm cutoff on the quadratic term
  double cutoff_level = 4.0;   ///< cutoff parameter n: factor is 1 below n, 0 above n+1
  double blowup_w = 1e6;       ///< abort threshold on the W-norm
};

/// Integrates the deterministic controlled equation
///   dX = [-kappa*filtered_stokes(X) - nonlinear(X,X) + drift_hat(X,t)
///         + gain_hat(X,t) f(t) + sum_j jump_hat(t,X,z_j)(g(t,z_j)-1) nu_j] dt
/// with the linear term integrated exactly per mode and the rest by explicit
/// midpoint.  dt must divide every control interval.
Trajectory solve_skeleton(const SpectralField& X0, const ControlPair& q,
                          const CoefficientSet& c, const FluidParams& p,
                          const SkeletonOptions& opt);

/// Recomputes |X(t)|_W^2 from the time-integrated energy balance (with the
/// quadratic term dropped, which pairs to zero in the W-inner product) and
/// returns |lhs - rhs| per node.  Also stores the series in the trajectory.
std::vector<double> energy_report(Trajectory& traj, const ControlPair& q,
                                  const CoefficientSet& c, const FluidParams& p);

/// Random piecewise-constant control with prescribed energy cost (exact scale).
ScalarControl random_scalar_control(double horizon, double q1_target, int grid_steps,
                                    uint64_t seed);
/// Random positive intensity control g = exp(s*theta) with entropy cost hit by
/// bisection on s.
IntensityControl random_intensity_control(double horizon, const MarkSpace& marks,
                                          double q2_target, int grid_steps, uint64_t seed);
ControlPair random_control_pair(double horizon, const MarkSpace& marks, double q1_target,
                                double q2_target, int grid_steps, uint64_t seed);

struct WBoundScan {
  std::vector<double> sup_w2;      ///< per trial
  std::vector<double> cost_q1;     ///< energy cost per trial
  std::vector<double> cost_q2;     ///< entropy cost per trial
  double max_sup_w2 = 0.0;
  int blowups = 0;
};

/// Empirical bound on sup_t |X(t)|_W^2 over random controls with costs drawn
/// at all budget levels 1..m; the trial set at budget m contains the trial
/// set at every smaller budget, so the scan is monotone in m by construction.
WBoundScan w_bound_scan(int m, int trials_per_level, const SpectralField& X0,
                        const CoefficientSet& c, const FluidParams& p,
                        const SkeletonOptions& opt, double horizon, std::size_t mark_count,
                        uint64_t seed);

struct UniquenessGap {
  double gap_v = 0.0;           ///< sup_t |X_dt1(t) - X_dt2(t)|_V over common nodes
  double gronwall_budget = 0.0; ///< exp( integral of the stability rate phi )
};

/// Compares two time resolutions of the same problem and reports the sup-V
/// gap together with the Gronwall budget exp(int phi) along the trajectory,
///   phi = c_b |X|_W + 2 C_F + 2 C_G (1+f^2) + 2 int env1 |g-1| nu(dz).
UniquenessGap uniqueness_gap(const SpectralField& X0, const ControlPair& q,
                             const CoefficientSet& c, const FluidParams& p, double dt1,
                             double dt2, double c_b, const SkeletonOptions& base);

}  // namespace g2ldp
