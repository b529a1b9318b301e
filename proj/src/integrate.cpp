#include "integrate.hpp"

#include <cmath>
#include <limits>

namespace g2ldp::detail {

std::size_t step_count(double dt, double horizon) {
  if (!(dt > 0.0) || !(horizon > 0.0))
    throw std::invalid_argument("integrator: dt and horizon must be positive");
  double r = horizon / dt;
  auto n = static_cast<long long>(std::llround(r));
  if (n < 1 || std::abs(double(n) * dt - horizon) > 1e-9 * std::max(1.0, horizon))
    throw std::invalid_argument("integrator: dt does not divide the horizon");
  return static_cast<std::size_t>(n);
}

void validate_alignment(const std::vector<double>& knots, double dt, double horizon,
                        const char* what) {
  double tol = 1e-9 * std::max(1.0, horizon);
  for (double t : knots) {
    double r = t / dt;
    if (std::abs(r - std::round(r)) * dt > tol)
      throw std::invalid_argument(std::string(what) +
                                  ": control grid is not aligned with the time step");
  }
}

double cutoff_factor(double r, double n) {
  if (r <= n) return 1.0;
  if (r >= n + 1.0) return 0.0;
  double s = r - n;
  return 1.0 - s * s * (3.0 - 2.0 * s);
}

namespace {

class DriftEvaluator {
 public:
  DriftEvaluator(const IntegrateSpec& spec)
      : spec_(spec),
        p_(*spec.params),
        nl_(spec.nonlinearity
                ? std::make_unique<NonlinearWorkspace>(p_.mode_cutoff, p_.domain_side)
                : nullptr),
        scratch_(p_.mode_cutoff, p_.domain_side) {
    subtract_compensator_ = spec.eps > 0.0;
  }

  /// True when every drift contribution is identically zero, so the step
  /// collapses to the exact linear flow.
  bool trivial() const {
    const CoefficientSet& c = *spec_.coeffs;
    bool jump_active = c.has_jump() && (spec_.tilt != nullptr || subtract_compensator_);
    bool gain_active = c.has_gain() && spec_.shift != nullptr;
    return !spec_.nonlinearity && !c.has_drift() && !gain_active && !jump_active;
  }

  void operator()(const SpectralField& x, double t, SpectralField& out) {
    out.set_zero();
    const CoefficientSet& c = *spec_.coeffs;
    if (spec_.nonlinearity) {
      double chi = spec_.cutoff ? cutoff_factor(norm_v(x, p_), spec_.cutoff_level) : 1.0;
      if (chi != 0.0) {
        nl_->eval(x, x, p_, scratch_);
        out.axpy(-chi, scratch_);
      }
    }
    if (c.has_drift()) out += c.smoothed_drift(x, t, p_);
    if (spec_.shift && c.has_gain()) {
      double f = spec_.shift->at(t);
      if (f != 0.0) out.axpy(f, c.smoothed_gain(x, t, p_));
    }
    if (c.has_jump()) {
      const auto& nu = c.marks().weights;
      for (std::size_t j = 0; j < nu.size(); ++j) {
        double g = spec_.tilt ? spec_.tilt->at(t, j) : 1.0;
        double weight = (g - 1.0) - (subtract_compensator_ ? g : 0.0);
        if (weight != 0.0) out.axpy(weight * nu[j], c.smoothed_jump(t, x, j, p_));
      }
    }
  }

 private:
  const IntegrateSpec& spec_;
  const FluidParams& p_;
  std::unique_ptr<NonlinearWorkspace> nl_;
  SpectralField scratch_;
  bool subtract_compensator_ = false;
};

}  // namespace

IntegrateResult integrate(const IntegrateSpec& spec) {
  const FluidParams& p = *spec.params;
  p.validate();
  const SpectralField& x0 = *spec.x0;
  if (x0.cutoff() != p.mode_cutoff || x0.side() != p.domain_side)
    throw std::invalid_argument("integrator: initial state layout mismatch");
  if (spec.coeffs->marks().size() == 0) throw std::invalid_argument("integrator: empty mark space");
  if (spec.tilt && spec.tilt->marks != spec.coeffs->marks().size())
    throw std::invalid_argument("integrator: tilt mark count mismatch");

  const std::size_t nsteps = step_count(spec.dt, spec.horizon);
  double htol = 1e-9 * std::max(1.0, spec.horizon);
  if (spec.shift) {
    spec.shift->validate();
    if (std::abs(spec.shift->horizon() - spec.horizon) > htol)
      throw std::invalid_argument("integrator: scalar control horizon mismatch");
    validate_alignment(spec.shift->times, spec.dt, spec.horizon, "scalar control");
  }
  if (spec.tilt) {
    spec.tilt->validate();
    if (std::abs(spec.tilt->horizon() - spec.horizon) > htol)
      throw std::invalid_argument("integrator: intensity control horizon mismatch");
    validate_alignment(spec.tilt->times, spec.dt, spec.horizon, "intensity control");
  }

  // Substep partition: base grid, or the noise realization's merged grid.
  std::vector<double> bounds;
  const std::vector<double>* dw = nullptr;
  const std::vector<int>* jump_mark = nullptr;
  if (spec.noise) {
    const NoiseRealization& nr = *spec.noise;
    if (std::abs(nr.dt - spec.dt) > 1e-15 || std::abs(nr.horizon - spec.horizon) > htol ||
        nr.eps != spec.eps)
      throw std::invalid_argument("integrator: noise realization does not match the solve");
    bounds = nr.times;
    dw = &nr.dw;
    jump_mark = &nr.jump_mark;
  } else {
    bounds.resize(nsteps + 1);
    for (std::size_t i = 0; i <= nsteps; ++i) bounds[i] = double(i) * spec.dt;
    bounds.back() = spec.horizon;
  }

  // Mode-wise decay rates of the exact linear step.
  std::vector<double> rates(x0.size());
  x0.for_each_mode([&](int k1, int k2, std::size_t idx) {
    rates[idx] = filtered_stokes_rate(p, k1, k2);
  });
  const std::size_t nm = x0.size();
  std::vector<double> half(nm), full(nm);
  double cached_delta = -1.0;

  DriftEvaluator drift(spec);
  const bool drift_trivial = drift.trivial();
  SpectralField x = x0;
  SpectralField x_pre = x0;
  SpectralField k1(p.mode_cutoff, p.domain_side);
  SpectralField k2(p.mode_cutoff, p.domain_side);
  SpectralField xmid(p.mode_cutoff, p.domain_side);
  SpectralField jump_field(p.mode_cutoff, p.domain_side);
  SpectralField gain_field(p.mode_cutoff, p.domain_side);
  SpectralField y(p.mode_cutoff, p.domain_side);
  SpectralField ydrift(p.mode_cutoff, p.domain_side);

  const bool jumps_active = spec.eps > 0.0;
  const double sqrt_eps = jumps_active ? std::sqrt(spec.eps) : 0.0;
  const auto& nuw = spec.coeffs->marks().weights;

  IntegrateResult result;
  Trajectory& traj = result.trajectory;
  auto record = [&](Trajectory& tr, const SpectralField& s, double t) {
    tr.times.push_back(t);
    tr.norm_v.push_back(norm_v(s, p));
    tr.norm_w.push_back(norm_w(s, p));
    if (spec.store_fields) tr.states.push_back(s);
  };
  record(traj, x, 0.0);
  if (spec.track_convolution) record(result.convolution, y, 0.0);

  std::size_t next_node = 1;
  double node_tol = 1e-9 * std::max(1.0, spec.horizon);

  for (std::size_t s = 0; s + 1 < bounds.size(); ++s) {
    const double a = bounds[s];
    const double b = bounds[s + 1];
    const double delta = b - a;
    if (!(delta > 0.0)) continue;

    if (delta != cached_delta) {
      for (std::size_t i = 0; i < nm; ++i) {
        half[i] = std::exp(-rates[i] * 0.5 * delta);
        full[i] = half[i] * half[i];
      }
      cached_delta = delta;
    }

    x_pre = x;
    const bool need_gain = jumps_active && spec.coeffs->has_gain();
    if (need_gain) gain_field = spec.coeffs->smoothed_gain(x_pre, a, p);

    // Exact linear flow with explicit-midpoint drift.
    const double tmid = a + 0.5 * delta;
    if (drift_trivial) {
      for (std::size_t i = 0; i < nm; ++i) {
        x[i] *= full[i];
        xmid[i] = half[i] * x_pre[i];
      }
    } else {
      drift(x, a, k1);
      xmid = x;
      xmid.axpy(0.5 * delta, k1);
      for (std::size_t i = 0; i < nm; ++i) xmid[i] *= half[i];
      drift(xmid, tmid, k2);
      for (std::size_t i = 0; i < nm; ++i) x[i] = full[i] * x[i] + delta * half[i] * k2[i];
    }

    if (spec.track_convolution && jumps_active && spec.coeffs->has_jump()) {
      // Y drift: the compensator of the scaled jump martingale, evaluated at
      // the state midpoint.
      ydrift.set_zero();
      for (std::size_t j = 0; j < nuw.size(); ++j) {
        double g = spec.tilt ? spec.tilt->at(tmid, j) : 1.0;
        ydrift.axpy(-g * nuw[j], spec.coeffs->smoothed_jump(tmid, xmid, j, p));
      }
      for (std::size_t i = 0; i < nm; ++i)
        y[i] = full[i] * y[i] + delta * half[i] * ydrift[i];
    } else if (spec.track_convolution) {
      for (std::size_t i = 0; i < nm; ++i) y[i] *= full[i];
    }

    if (jumps_active) {
      double w = sqrt_eps * (*dw)[s];
      if (w != 0.0 && need_gain) {
        x.axpy(w, gain_field);
        if (spec.track_convolution) y.axpy(w, gain_field);
      }
      int jm = (*jump_mark)[s];
      if (jm >= 0) {
        double w_before = norm_w(x, p);
        if (spec.coeffs->has_jump()) {
          jump_field = spec.coeffs->smoothed_jump(b, x, static_cast<std::size_t>(jm), p);
          x.axpy(spec.eps, jump_field);
          if (spec.track_convolution) y.axpy(spec.eps, jump_field);
        }
        result.jump_log.push_back({b, static_cast<std::size_t>(jm), w_before, norm_w(x, p)});
      }
    }

    if (!x.all_finite())
      throw BlowupError(b, std::numeric_limits<double>::infinity(),
                        "integrator: non-finite state at t=" + std::to_string(b));
    double wn = norm_w(x, p);
    if (wn > spec.blowup_w)
      throw BlowupError(b, wn, "integrator: W-norm blow-up at t=" + std::to_string(b));

    while (next_node <= nsteps && double(next_node) * spec.dt <= b + node_tol) {
      double tn = next_node == nsteps ? spec.horizon : double(next_node) * spec.dt;
      record(traj, x, tn);
      if (spec.track_convolution) record(result.convolution, y, tn);
      ++next_node;
    }
  }

  traj.final_state = x;
  if (spec.track_convolution) result.convolution.final_state = y;
  return result;
}

}  // namespace g2ldp::detail
