#include "g2ldp/trajectory.hpp"

#include <cmath>

namespace g2ldp {

double Trajectory::sup_norm_v() const {
  double m = 0.0;
  for (double v : norm_v) m = std::max(m, v);
  return m;
}

double Trajectory::sup_norm_w() const {
  double m = 0.0;
  for (double v : norm_w) m = std::max(m, v);
  return m;
}

double sup_distance_v(const Trajectory& a, const Trajectory& b, const FluidParams& p) {
  if (!a.has_states() || !b.has_states())
    throw std::invalid_argument("sup_distance_v: both trajectories must store states");
  const Trajectory& coarse = a.nodes() <= b.nodes() ? a : b;
  const Trajectory& fine = a.nodes() <= b.nodes() ? b : a;
  double tol = 1e-9 * std::max(1.0, coarse.times.back());
  double sup = 0.0;
  std::size_t jf = 0;
  for (std::size_t i = 0; i < coarse.nodes(); ++i) {
    double t = coarse.times[i];
    while (jf < fine.nodes() && fine.times[jf] < t - tol) ++jf;
    if (jf >= fine.nodes() || std::abs(fine.times[jf] - t) > tol)
      throw std::invalid_argument("sup_distance_v: grids do not nest");
    SpectralField d = coarse.state_at(i) - fine.state_at(jf);
    sup = std::max(sup, norm_v(d, p));
  }
  return sup;
}

double fractional_seminorm(const Trajectory& traj, double beta, double pexp,
                           TrajectoryNorm which, const FluidParams& p) {
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("beta must lie in (0,1)");
  if (!(pexp > 1.0)) throw std::invalid_argument("p must exceed 1");
  if (!traj.has_states()) throw std::invalid_argument("fractional_seminorm: states required");
  std::size_t n = traj.nodes();
  if (n < 2) return 0.0;

  const SpectralField& u0 = traj.state_at(0);
  std::vector<double> weight(u0.size());
  double qs = u0.qscale();
  double cell = u0.side() * u0.side();
  u0.for_each_mode([&](int k1, int k2, std::size_t idx) {
    double q2 = qs * qs * (double(k1) * k1 + double(k2) * k2);
    weight[idx] =
        (which == TrajectoryNorm::V ? (1.0 + p.alpha * q2) : 1.0 / q2) * cell;
  });

  // trapezoid node weights in time
  std::vector<double> wt(n);
  for (std::size_t i = 0; i < n; ++i) {
    double lo = i == 0 ? traj.times[0] : traj.times[i - 1];
    double hi = i + 1 == n ? traj.times[n - 1] : traj.times[i + 1];
    wt[i] = 0.5 * (hi - lo);
  }

  double acc = 0.0;
  double power = 1.0 + beta * pexp;
  for (std::size_t i = 0; i < n; ++i) {
    const Complex* ai = traj.state_at(i).data();
    for (std::size_t j = i + 1; j < n; ++j) {
      const Complex* aj = traj.state_at(j).data();
      double d2 = 0.0;
      for (std::size_t m = 0; m < weight.size(); ++m) d2 += weight[m] * std::norm(ai[m] - aj[m]);
      double dt = traj.times[j] - traj.times[i];
      acc += 2.0 * std::pow(std::sqrt(d2), pexp) / std::pow(dt, power) * wt[i] * wt[j];
    }
  }
  return std::pow(acc, 1.0 / pexp);
}

}  // namespace g2ldp
