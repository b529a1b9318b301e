#pragma once

#include <span>
#include <string>
#include <vector>

#include "g2ldp/common.hpp"

namespace g2ldp {

/// Piecewise-constant scalar control f: value f_j on [t_j, t_{j+1}).
struct ScalarControl {
  std::vector<double> times;   ///< strictly increasing, times.front() == 0
  std::vector<double> values;  ///< size times.size() - 1

  static ScalarControl constant(double value, double horizon, int steps = 1);
  static ScalarControl zero(double horizon) { return constant(0.0, horizon); }

  double horizon() const { return times.empty() ? 0.0 : times.back(); }
  std::size_t intervals() const { return values.size(); }
  /// Left-constant lookup; t == horizon returns the last value.
  double at(double t) const;
  void validate() const;
};

/// Finite mark space with weights nu_j > 0.
struct MarkSpace {
  std::vector<std::string> labels;
  std::vector<double> weights;

  static MarkSpace uniform(std::size_t count, double weight = 1.0);
  std::size_t size() const { return weights.size(); }
  double total_mass() const;
  void validate() const;
};

/// Piecewise-constant jump-intensity control g(t, z_j) >= 0 on a time grid
/// times and mark index j; row-major values[interval * marks + j].
struct IntensityControl {
  std::vector<double> times;
  std::size_t marks = 0;
  std::vector<double> values;

  static IntensityControl constant(double value, double horizon, std::size_t marks,
                                   int steps = 1);
  static IntensityControl one(double horizon, std::size_t marks) {
    return constant(1.0, horizon, marks);
  }

  double horizon() const { return times.empty() ? 0.0 : times.back(); }
  std::size_t intervals() const { return times.empty() ? 0 : times.size() - 1; }
  double at(double t, std::size_t mark) const;
  double max_value() const;
  double min_value() const;
  void validate() const;
};

/// A deterministic control q = (f, g).
struct ControlPair {
  ScalarControl f;
  IntensityControl g;

  static ControlPair uncontrolled(double horizon, std::size_t marks) {
    return {ScalarControl::zero(horizon), IntensityControl::one(horizon, marks)};
  }
  double horizon() const { return f.horizon(); }
  void validate() const;
};

/// Energy cost of the Brownian direction: (1/2) integral of f^2.
double energy_cost(const ScalarControl& f);

/// x log x - x + 1, continuously extended to poisson_entropy(0) = 1.
double poisson_entropy(double x);

/// Relative-entropy cost of the intensity shift: integral of
/// poisson_entropy(g) against dt x nu over [0, horizon] x marks.
double entropy_cost(const IntensityControl& g, const MarkSpace& marks);

/// True iff energy_cost(f) <= m and entropy_cost(g) <= m.
bool within_budget(const ControlPair& q, const MarkSpace& marks, double m);

/// Grid-aligned time-mark rectangle [t0, t1] x {mark}.
struct TimeMarkRect {
  double t0;
  double t1;
  std::size_t mark;
};

/// The measure induced by g: integral of g over the rectangles against
/// dt x nu.  Rectangle endpoints must lie on the control grid.
double control_measure(const IntensityControl& g, const MarkSpace& marks,
                       std::span<const TimeMarkRect> rects);

/// f plus a unit-amplitude oscillation sin(2 pi n t / T), sampled at interval
/// midpoints on a grid refined to resolve the oscillation.  The sequence
/// converges weakly to f as n grows while its energy cost stays bounded.
ScalarControl oscillatory_perturbation(const ScalarControl& f, int n);

/// g modulated by a mean-one square wave alternating 1 +/- delta on cells of
/// width T/(2n); the induced measures converge to that of g as n grows.
IntensityControl oscillatory_intensity(const IntensityControl& g, int n, double delta = 0.5);

}  // namespace g2ldp
