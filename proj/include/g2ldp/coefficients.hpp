#pragma once

#include <functional>
#include <span>
#include <string>

#include "g2ldp/controls.hpp"
#include "g2ldp/field.hpp"

namespace g2ldp {

/// Shape parameters of the built-in saturating/affine coefficient family.
struct DefaultFamilyShape {
  double drift_scale = 0.4;            ///< saturated drift strength
  double gain_scale = 0.5;             ///< linear Brownian gain strength
  std::vector<double> jump_scales;     ///< beta_j, defaulted if empty
  std::vector<double> jump_couplings;  ///< gamma_j, defaulted if empty
};

/// The coefficient maps of the evolution equation: state drift F(u,t),
/// Brownian gain G(u,t) and jump amplitude sigma(t,u,z_j), together with the
/// mark space, declared Lipschitz constants (squared form) and declared
/// envelopes s_i(t,z_j) dominating the per-mark sigma norms.
///
/// Immutable after construction; all evaluations are pure.
class CoefficientSet {
 public:
  using StateMap = std::function<SpectralField(const SpectralField&, double)>;
  using JumpMap = std::function<SpectralField(double, const SpectralField&, std::size_t)>;
  using Envelope = std::function<double(double, std::size_t)>;

  CoefficientSet() = default;
  /// The has_* flags let solvers skip evaluations of identically-zero maps;
  /// flag a component false only when its map vanishes everywhere.
  CoefficientSet(std::string name, MarkSpace marks, StateMap drift, StateMap gain,
                 JumpMap jump, double lip_drift, double lip_gain, double lip_jump,
                 Envelope env0, Envelope env1, bool has_drift = true, bool has_gain = true,
                 bool has_jump = true);

  const std::string& name() const { return name_; }
  const MarkSpace& marks() const { return marks_; }

  SpectralField drift(const SpectralField& u, double t) const { return drift_(u, t); }
  SpectralField gain(const SpectralField& u, double t) const { return gain_(u, t); }
  SpectralField jump(double t, const SpectralField& u, std::size_t mark) const {
    return jump_(t, u, mark);
  }

  /// Smoothed versions: (I + alpha A)^{-1} applied to each map.
  SpectralField smoothed_drift(const SpectralField& u, double t, const FluidParams& p) const;
  SpectralField smoothed_gain(const SpectralField& u, double t, const FluidParams& p) const;
  SpectralField smoothed_jump(double t, const SpectralField& u, std::size_t mark,
                              const FluidParams& p) const;

  /// Declared Lipschitz constants, squared form:
  /// |F(u1,t)-F(u2,t)|_V^2 <= lip_drift * |u1-u2|_V^2, and the nu-integrated
  /// analogue for the jump map.
  double lip_drift() const { return lip_drift_; }
  double lip_gain() const { return lip_gain_; }
  double lip_jump() const { return lip_jump_; }

  /// Declared envelopes: env0 >= |sigma(t,.,z_j)|_V / (1+|u|_V),
  /// env1 >= the Lipschitz ratio of sigma in u, per (t, mark).
  double env0(double t, std::size_t mark) const { return env0_ ? env0_(t, mark) : 0.0; }
  double env1(double t, std::size_t mark) const { return env1_ ? env1_(t, mark) : 0.0; }

  bool has_drift() const { return has_drift_; }
  bool has_gain() const { return has_gain_; }
  bool has_jump() const { return has_jump_; }

  // --- Built-in families -----------------------------------------------------

  /// All maps vanish.
  static CoefficientSet zero(const FluidParams& p, MarkSpace marks);

  /// Saturating drift a*tanh(|u|_V)/|u|_V * u, linear gain b*u and affine
  /// jump maps beta_j (w_j + gamma_j u) with smooth fixed profiles w_j.
  /// All declared constants and envelopes are exact for this family.
  static CoefficientSet default_family(const FluidParams& p, MarkSpace marks,
                                       DefaultFamilyShape shape = DefaultFamilyShape());

  /// Diagnostic: constant Brownian gain field, no drift, no jumps.
  static CoefficientSet brownian_diagnostic(const FluidParams& p, MarkSpace marks,
                                            SpectralField gain_field);

  /// Diagnostic: constant per-mark jump fields beta_j * v, no drift, no gain.
  static CoefficientSet jump_diagnostic(const FluidParams& p, MarkSpace marks,
                                        SpectralField jump_field,
                                        std::vector<double> jump_scales = {});

 private:
  std::string name_;
  MarkSpace marks_;
  StateMap drift_;
  StateMap gain_;
  JumpMap jump_;
  double lip_drift_ = 0.0;
  double lip_gain_ = 0.0;
  double lip_jump_ = 0.0;
  Envelope env0_;
  Envelope env1_;
  bool has_drift_ = true;
  bool has_gain_ = true;
  bool has_jump_ = true;
};

// --- Sampling-based condition checkers ---------------------------------------

struct LipschitzReport {
  double ratio_drift = 0.0;  ///< max |F(u1,t)-F(u2,t)|_V^2 / |u1-u2|_V^2
  double ratio_gain = 0.0;
  double ratio_jump = 0.0;   ///< nu-integrated sigma ratio
  bool drift_zero_at_origin = true;
  bool gain_zero_at_origin = true;
  double env0_excess = 0.0;  ///< max over samples of |sigma|_V/(1+|u|_V) - env0
  double env1_excess = 0.0;
  bool within_declared(const CoefficientSet& c, double tol = 1e-9) const;
};

LipschitzReport check_lipschitz(const CoefficientSet& c, const FluidParams& p, int samples,
                                uint64_t seed, double horizon = 1.0);

struct GrowthReport {
  double ratio_q1 = 0.0;  ///< max of integral |sigma|_V^2 nu(dz) / (1+|u|_V^2)
  double ratio_q2 = 0.0;  ///< same with fourth powers
};

GrowthReport check_growth(const CoefficientSet& c, const FluidParams& p, int samples,
                          uint64_t seed, double horizon = 1.0);

struct ExponentialIntegrabilityReport {
  double value0 = 0.0;  ///< integral of exp(delta * env0^2) over [0,T] x marks
  double value1 = 0.0;
};

ExponentialIntegrabilityReport check_exponential_integrability(const CoefficientSet& c,
                                                               double delta, double horizon,
                                                               int time_cells = 64);

/// Empirical lower bounds for the entropy-budget suprema over controls with
/// entropy cost <= m: max over the trial controls of
///   c_i2 = integral env_i^2 (g+1),  c_i1 = integral env_i |g-1|.
struct EntropyBudgetConstants {
  double c02 = 0.0;
  double c01 = 0.0;
  double c12 = 0.0;
  double c11 = 0.0;
};

EntropyBudgetConstants entropy_budget_constants(const CoefficientSet& c, double m,
                                                std::span<const IntensityControl> trials);

}  // namespace g2ldp
