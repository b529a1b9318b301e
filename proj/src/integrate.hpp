#pragma once

// Shared integrator core for the deterministic and stochastic solvers.  One
// code path guarantees the eps == 0 stochastic solve is bit-identical to the
// deterministic solve with the same controls.

#include "g2ldp/coefficients.hpp"
#include "g2ldp/controls.hpp"
#include "g2ldp/stochastic.hpp"
#include "g2ldp/trajectory.hpp"

namespace g2ldp::detail {

struct IntegrateSpec {
  const SpectralField* x0 = nullptr;
  double eps = 0.0;
  const ScalarControl* shift = nullptr;      // f (deterministic) or psi (noise shift)
  const IntensityControl* tilt = nullptr;    // g or phi; null means identically 1
  const CoefficientSet* coeffs = nullptr;
  const FluidParams* params = nullptr;
  double dt = 1e-3;
  double horizon = 1.0;
  bool store_fields = true;
  bool nonlinearity = true;
  bool cutoff = false;
  double cutoff_level = 4.0;
  double blowup_w = 1e6;
  bool track_convolution = false;
  const NoiseRealization* noise = nullptr;   // null for deterministic solves
};

struct JumpLogRow {
  double t = 0.0;
  std::size_t mark = 0;
  double w_before = 0.0;
  double w_after = 0.0;
};

struct IntegrateResult {
  Trajectory trajectory;
  Trajectory convolution;
  std::vector<JumpLogRow> jump_log;
};

IntegrateResult integrate(const IntegrateSpec& spec);

/// Number of base steps; throws unless dt divides the horizon.
std::size_t step_count(double dt, double horizon);

/// Throws unless every knot lies on the dt grid.
void validate_alignment(const std::vector<double>& knots, double dt, double horizon,
                        const char* what);

/// C1 bump: 1 on [0,n], cubic blend on [n, n+1], 0 beyond.
double cutoff_factor(double r, double n);

}  // namespace g2ldp::detail
