#include "g2ldp/controls.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace g2ldp {

namespace {
std::size_t interval_of(const std::vector<double>& times, double t) {
  if (times.size() < 2 || t < times.front() || t > times.back())
    throw std::invalid_argument("control lookup outside the time grid");
  auto it = std::upper_bound(times.begin(), times.end(), t);
  std::size_t i = static_cast<std::size_t>(it - times.begin());
  if (i >= times.size()) i = times.size() - 1;  // t == horizon
  return i - 1;
}

void check_grid(const std::vector<double>& times) {
  if (times.size() < 2) throw std::invalid_argument("control grid needs at least one interval");
  if (times.front() != 0.0) throw std::invalid_argument("control grid must start at 0");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      throw std::invalid_argument("control grid must be strictly increasing");
}
}  // namespace

ScalarControl ScalarControl::constant(double value, double horizon, int steps) {
  if (steps < 1 || !(horizon > 0.0)) throw std::invalid_argument("bad control shape");
  ScalarControl f;
  f.times.resize(steps + 1);
  for (int i = 0; i <= steps; ++i) f.times[i] = horizon * double(i) / double(steps);
  f.values.assign(steps, value);
  return f;
}

double ScalarControl::at(double t) const { return values[interval_of(times, t)]; }

void ScalarControl::validate() const {
  check_grid(times);
  if (values.size() + 1 != times.size())
    throw std::invalid_argument("scalar control: values/grid size mismatch");
  for (double v : values)
    if (!std::isfinite(v)) throw std::invalid_argument("scalar control: non-finite value");
}

MarkSpace MarkSpace::uniform(std::size_t count, double weight) {
  MarkSpace z;
  for (std::size_t j = 0; j < count; ++j) {
    z.labels.push_back("z" + std::to_string(j + 1));
    z.weights.push_back(weight);
  }
  return z;
}

double MarkSpace::total_mass() const {
  double m = 0.0;
  for (double w : weights) m += w;
  return m;
}

void MarkSpace::validate() const {
  if (weights.empty()) throw std::invalid_argument("mark space must have at least one mark");
  if (!labels.empty() && labels.size() != weights.size())
    throw std::invalid_argument("mark space: label/weight size mismatch");
  for (double w : weights)
    if (!(w > 0.0) || !std::isfinite(w))
      throw std::invalid_argument("mark space weights must be positive and finite");
}

IntensityControl IntensityControl::constant(double value, double horizon, std::size_t marks,
                                            int steps) {
  if (steps < 1 || marks == 0 || !(horizon > 0.0))
    throw std::invalid_argument("bad intensity control shape");
  IntensityControl g;
  g.times.resize(steps + 1);
  for (int i = 0; i <= steps; ++i) g.times[i] = horizon * double(i) / double(steps);
  g.marks = marks;
  g.values.assign(static_cast<std::size_t>(steps) * marks, value);
  return g;
}

double IntensityControl::at(double t, std::size_t mark) const {
  if (mark >= marks) throw std::invalid_argument("intensity control: mark out of range");
  return values[interval_of(times, t) * marks + mark];
}

double IntensityControl::max_value() const {
  return *std::max_element(values.begin(), values.end());
}

double IntensityControl::min_value() const {
  return *std::min_element(values.begin(), values.end());
}

void IntensityControl::validate() const {
  check_grid(times);
  if (marks == 0) throw std::invalid_argument("intensity control: no marks");
  if (values.size() != intervals() * marks)
    throw std::invalid_argument("intensity control: values/grid size mismatch");
  for (double v : values)
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument("intensity control must be nonnegative and finite");
}

void ControlPair::validate() const {
  f.validate();
  g.validate();
  if (std::abs(f.horizon() - g.horizon()) > 1e-12 * std::max(1.0, f.horizon()))
    throw std::invalid_argument("control pair: mismatched horizons");
}

double energy_cost(const ScalarControl& f) {
  double acc = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i)
    acc += f.values[i] * f.values[i] * (f.times[i + 1] - f.times[i]);
  return 0.5 * acc;
}

double poisson_entropy(double x) {
  if (x < 0.0) throw std::invalid_argument("poisson_entropy: negative argument");
  if (x == 0.0) return 1.0;
  return x * std::log(x) - x + 1.0;
}

double entropy_cost(const IntensityControl& g, const MarkSpace& marks) {
  if (g.marks != marks.size())
    throw std::invalid_argument("entropy_cost: mark count mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < g.intervals(); ++i) {
    double dt = g.times[i + 1] - g.times[i];
    for (std::size_t j = 0; j < g.marks; ++j)
      acc += poisson_entropy(g.values[i * g.marks + j]) * dt * marks.weights[j];
  }
  return acc;
}

bool within_budget(const ControlPair& q, const MarkSpace& marks, double m) {
  return energy_cost(q.f) <= m && entropy_cost(q.g, marks) <= m;
}

double control_measure(const IntensityControl& g, const MarkSpace& marks,
                       std::span<const TimeMarkRect> rects) {
  if (g.marks != marks.size())
    throw std::invalid_argument("control_measure: mark count mismatch");
  auto on_grid = [&](double t) {
    for (double s : g.times)
      if (std::abs(s - t) <= 1e-12 * std::max(1.0, g.horizon())) return true;
    return false;
  };
  double acc = 0.0;
  for (const auto& r : rects) {
    if (r.mark >= g.marks) throw std::invalid_argument("control_measure: mark out of range");
    if (!on_grid(r.t0) || !on_grid(r.t1))
      throw std::invalid_argument("control_measure: rectangle not grid-aligned");
    if (!(r.t1 > r.t0)) continue;
    for (std::size_t i = 0; i < g.intervals(); ++i) {
      double lo = std::max(g.times[i], r.t0);
      double hi = std::min(g.times[i + 1], r.t1);
      if (hi > lo) acc += g.values[i * g.marks + r.mark] * (hi - lo) * marks.weights[r.mark];
    }
  }
  return acc;
}

ScalarControl oscillatory_perturbation(const ScalarControl& f, int n) {
  if (n < 1) throw std::invalid_argument("oscillatory_perturbation: n must be >= 1");
  f.validate();
  double T = f.horizon();
  // Merge the base breakpoints with a uniform grid fine enough that midpoint
  // sampling of sin^2 integrates exactly (discrete orthogonality needs more
  // than 2n uniform cells).
  int m = std::max(64, 8 * n);
  std::set<double> knots(f.times.begin(), f.times.end());
  for (int i = 0; i <= m; ++i) knots.insert(T * double(i) / double(m));
  ScalarControl out;
  out.times.assign(knots.begin(), knots.end());
  out.values.resize(out.times.size() - 1);
  for (std::size_t i = 0; i + 1 < out.times.size(); ++i) {
    double mid = 0.5 * (out.times[i] + out.times[i + 1]);
    out.values[i] = f.at(out.times[i]) + std::sin(kTwoPi * double(n) * mid / T);
  }
  return out;
}

IntensityControl oscillatory_intensity(const IntensityControl& g, int n, double delta) {
  if (n < 1) throw std::invalid_argument("oscillatory_intensity: n must be >= 1");
  if (!(delta > -1.0 && delta < 1.0))
    throw std::invalid_argument("oscillatory_intensity: delta must keep g nonnegative");
  g.validate();
  double T = g.horizon();
  int cells = 2 * n;
  std::set<double> knots(g.times.begin(), g.times.end());
  for (int i = 0; i <= cells; ++i) knots.insert(T * double(i) / double(cells));
  IntensityControl out;
  out.times.assign(knots.begin(), knots.end());
  out.marks = g.marks;
  out.values.resize((out.times.size() - 1) * g.marks);
  for (std::size_t i = 0; i + 1 < out.times.size(); ++i) {
    double mid = 0.5 * (out.times[i] + out.times[i + 1]);
    int cell = std::min<int>(cells - 1, static_cast<int>(mid / (T / cells)));
    double factor = (cell % 2 == 0) ? 1.0 + delta : 1.0 - delta;
    for (std::size_t j = 0; j < g.marks; ++j)
      out.values[i * g.marks + j] = g.at(out.times[i], j) * factor;
  }
  return out;
}

}  // namespace g2ldp
