#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "g2ldp/coefficients.hpp"
#include "g2ldp/controls.hpp"
#include "g2ldp/trajectory.hpp"

namespace g2ldp {

/// Ordered realization of a (possibly tilted) marked Poisson process.
struct MarkedPointStream {
  std::vector<double> times;        ///< strictly increasing in (0, horizon)
  std::vector<std::size_t> marks;   ///< parallel to times
  std::size_t count() const { return times.size(); }
};

/// Full noise realization for one path: jump stream plus Brownian increments
/// on the substep partition (base dt grid merged with jump times).
struct NoiseRealization {
  double eps = 0.0;
  double horizon = 0.0;
  double dt = 0.0;
  uint64_t seed = 0;
  MarkedPointStream jumps;
  std::vector<double> times;      ///< substep boundaries, times.front()=0, back()=horizon
  std::vector<double> dw;         ///< increment over [times[i], times[i+1])
  std::vector<int> jump_mark;     ///< mark hitting at times[i+1], or -1
};

/// Thinning sampler: per mark j an exponential-gap stream at the bound rate
/// (max tilt)* nu_j / eps, accepted with probability tilt(t,j)/max tilt.
/// Null tilt means the untilted unit intensity.
MarkedPointStream sample_marked_poisson(double eps, const IntensityControl* tilt,
                                        const MarkSpace& marks, double horizon,
                                        uint64_t seed);

/// Jump stream plus Brownian increments; eps == 0 yields the silent realization.
NoiseRealization sample_noise(double eps, const IntensityControl* tilt, const MarkSpace& marks,
                              double horizon, double dt, uint64_t seed);

struct SpdeOptions {
  double dt = 1e-3;
  double horizon = 1.0;
  uint64_t seed = 1;
  bool store_fields = true;
  bool nonlinearity = true;
  bool cutoff = false;
  double cutoff_level = 4.0;
  double blowup_w = 1e6;
  bool track_convolution = false;  ///< also integrate the noise-convolution component
};

struct JumpEvent {
  double t = 0.0;
  std::size_t mark = 0;
  double w_before = 0.0;
  double w_after = 0.0;
};

struct SpdePath {
  Trajectory trajectory;
  Trajectory convolution;  ///< empty unless tracked
  NoiseRealization noise;
  std::vector<JumpEvent> events;
  double eps = 0.0;
};

/// Integrates the controlled stochastic evolution: between jumps an exact
/// linear step with explicit-midpoint drift
///   -nonlinear(X,X) + drift_hat + gain_hat*shift + sum_j jump_hat*(tilt-1)*nu_j
///   - sum_j jump_hat*tilt*nu_j          (compensator of the jump martingale)
/// plus Euler-Maruyama diffusion sqrt(eps)*gain_hat(X,t) dW; at each jump the
/// increment eps*jump_hat(t, X(t-), z).  Null shift/tilt mean 0 and 1.  With
/// eps == 0 the path coincides with the deterministic solve exactly.
SpdePath solve_spde(const SpectralField& X0, double eps, const ScalarControl* shift,
                    const IntensityControl* tilt, const CoefficientSet& c,
                    const FluidParams& p, const SpdeOptions& opt);

/// Same, replaying a given noise realization.
SpdePath solve_spde(const SpectralField& X0, double eps, const ScalarControl* shift,
                    const IntensityControl* tilt, const CoefficientSet& c,
                    const FluidParams& p, const SpdeOptions& opt, NoiseRealization noise);

/// The linear noise-accumulation component driven by the state path:
///   dY = -kappa*filtered_stokes(Y) dt + sqrt(eps)*gain_hat(X,t) dW
///        + eps * jump_hat(t, X(t-), z) dN - jump_hat*tilt*nu dt,  Y(0)=0.
/// Replays the paired path's noise; rejects mismatched realizations.
Trajectory solve_stochastic_convolution(const SpectralField& X0, double eps,
                                        const ScalarControl* shift,
                                        const IntensityControl* tilt,
                                        const CoefficientSet& c, const FluidParams& p,
                                        SpdeOptions opt, const SpdePath& paired);

/// Log likelihood ratio of the reference noise against the simulated
/// (shifted, tilted) noise along one realization:
///   -eps^{-1/2} * [shift part]:  (1/sqrt(eps)) int shift dW - (1/(2 eps)) int shift^2
///   [jump part]: sum_events log(1/tilt) + (1/eps) int (tilt - 1) nu dt.
double girsanov_log_brownian(const ScalarControl& shift, const NoiseRealization& noise);
double girsanov_log_jump(const IntensityControl& tilt, const MarkSpace& marks,
                         const NoiseRealization& noise);
/// exp of the sum of the two parts (absent controls contribute 0).
double girsanov_weight(const ScalarControl* shift, const IntensityControl* tilt,
                       const MarkSpace& marks, const NoiseRealization& noise);

struct MomentScanRow {
  double eps = 0.0;
  double mean_sup_w2 = 0.0;
  double stderr_ = 0.0;
  int blowups = 0;
};

/// E sup_t |X^eps(t)|_W^2 over random bounded controls, per eps. The same
/// control sequence is reused across the eps list so rows are paired.
std::vector<MomentScanRow> w_moment_scan(std::span<const double> eps_list, int m, int trials,
                                         const SpectralField& X0, const CoefficientSet& c,
                                         const FluidParams& p, const SpdeOptions& opt,
                                         uint64_t seed);

}  // namespace g2ldp
