#pragma once

#include <vector>

#include "g2ldp/field.hpp"

namespace g2ldp {

/// Time-discrete solution record: norms at every node, optionally the full
/// states, and the energy-balance residual once computed.
struct Trajectory {
  std::vector<double> times;
  std::vector<double> norm_v;
  std::vector<double> norm_w;
  std::vector<double> energy_residual;  ///< filled by energy_report
  std::vector<SpectralField> states;    ///< empty unless fields were stored
  SpectralField final_state;

  std::size_t nodes() const { return times.size(); }
  bool has_states() const { return !states.empty(); }

  const SpectralField& state_at(std::size_t i) const {
    if (!has_states()) throw std::logic_error("Trajectory: states were not stored");
    return states.at(i);
  }

  double sup_norm_v() const;
  double sup_norm_w() const;
};

/// sup over common nodes of |a(t) - b(t)|_V; both must store states and the
/// coarser grid's nodes must appear in the finer one.
double sup_distance_v(const Trajectory& a, const Trajectory& b, const FluidParams& p);

enum class TrajectoryNorm { V, WDual };

/// Discrete double-sum fractional Sobolev seminorm
///   ( sum_{i != j} |u(t_i)-u(t_j)|^p / |t_i-t_j|^{1+beta p} dt_i dt_j )^{1/p}.
/// Diagnostic only; requires stored states.
double fractional_seminorm(const Trajectory& traj, double beta, double pexp,
                           TrajectoryNorm which, const FluidParams& p);

}  // namespace g2ldp
