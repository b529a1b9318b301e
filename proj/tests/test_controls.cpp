#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>

#include "g2ldp/controls.hpp"

using namespace g2ldp;

TEST_CASE("energy cost of simple controls") {
  CHECK(energy_cost(ScalarControl::zero(1.0)) == 0.0);
  CHECK(energy_cost(ScalarControl::constant(1.0, 1.0)) == doctest::Approx(0.5));
  CHECK(energy_cost(ScalarControl::constant(2.0, 1.0)) == doctest::Approx(2.0));
}

TEST_CASE("poisson entropy values") {
  CHECK(poisson_entropy(1.0) == 0.0);
  CHECK(poisson_entropy(0.0) == 1.0);
  CHECK(poisson_entropy(std::exp(1.0)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(poisson_entropy(-0.1), std::invalid_argument);
}

TEST_CASE("entropy cost of simple intensities") {
  MarkSpace z = MarkSpace::uniform(1, 1.0);
  CHECK(entropy_cost(IntensityControl::one(1.0, 1), z) == 0.0);
  double c = 2.7;
  CHECK(entropy_cost(IntensityControl::constant(c, 1.0, 1), z) ==
        doctest::Approx(poisson_entropy(c)).epsilon(1e-14));
  CHECK(entropy_cost(IntensityControl::constant(0.0, 1.0, 1), z) == doctest::Approx(1.0));
}

TEST_CASE("entropy convexity on a log-spaced grid") {
  for (int i = 0; i < 1000; ++i) {
    double x = std::pow(10.0, -3.0 + 6.0 * (i % 37) / 36.0);
    double y = std::pow(10.0, -3.0 + 6.0 * ((i * 7) % 41) / 40.0);
    CHECK(poisson_entropy(0.5 * (x + y)) <=
          0.5 * (poisson_entropy(x) + poisson_entropy(y)) + 1e-12);
  }
}

TEST_CASE("cost convexity on random pairs") {
  Rng rng(5);
  MarkSpace z = MarkSpace::uniform(2, 0.7);
  for (int s = 0; s < 50; ++s) {
    ScalarControl f1 = ScalarControl::constant(0.0, 1.0, 4);
    ScalarControl f2 = f1;
    for (auto& v : f1.values) v = rng.normal();
    for (auto& v : f2.values) v = rng.normal();
    ScalarControl mid = f1;
    for (std::size_t i = 0; i < mid.values.size(); ++i)
      mid.values[i] = 0.5 * (f1.values[i] + f2.values[i]);
    CHECK(energy_cost(mid) <= 0.5 * (energy_cost(f1) + energy_cost(f2)) + 1e-12);

    IntensityControl g1 = IntensityControl::constant(1.0, 1.0, 2, 4);
    IntensityControl g2 = g1;
    for (auto& v : g1.values) v = std::exp(0.5 * rng.normal());
    for (auto& v : g2.values) v = std::exp(0.5 * rng.normal());
    IntensityControl gm = g1;
    for (std::size_t i = 0; i < gm.values.size(); ++i)
      gm.values[i] = 0.5 * (g1.values[i] + g2.values[i]);
    CHECK(entropy_cost(gm, z) <= 0.5 * (entropy_cost(g1, z) + entropy_cost(g2, z)) + 1e-12);
  }
}

TEST_CASE("budget membership and nesting") {
  MarkSpace z = MarkSpace::uniform(1, 1.0);
  ControlPair cheap{ScalarControl::zero(1.0), IntensityControl::one(1.0, 1)};
  CHECK(within_budget(cheap, z, 1.0));

  ControlPair costly{ScalarControl::constant(2.0, 1.0), IntensityControl::one(1.0, 1)};
  CHECK_FALSE(within_budget(costly, z, 1.0));
  CHECK(within_budget(costly, z, 2.0));
  // nesting: membership at m implies membership at any larger m
  for (double m = 2.0; m < 10.0; m += 1.0) CHECK(within_budget(costly, z, m));
}

TEST_CASE("induced measure of grid rectangles") {
  MarkSpace z = MarkSpace::uniform(1, 0.8);
  double T = 2.0;
  IntensityControl g = IntensityControl::one(T, 1);
  std::array<TimeMarkRect, 1> full{{{0.0, T, 0}}};
  CHECK(control_measure(g, z, full) == doctest::Approx(T * 0.8).epsilon(1e-14));

  IntensityControl g0 = IntensityControl::constant(0.0, T, 1);
  CHECK(control_measure(g0, z, full) == 0.0);

  // g = 2 on [0, 1/2), 1 after; measure of [0,1/2] x {z1} is nu1
  IntensityControl mixed;
  mixed.times = {0.0, 1.0, 2.0};
  mixed.marks = 1;
  mixed.values = {2.0, 1.0};
  MarkSpace z1 = MarkSpace::uniform(1, 1.0);
  std::array<TimeMarkRect, 1> half{{{0.0, 1.0, 0}}};
  CHECK(control_measure(mixed, z1, half) == doctest::Approx(2.0).epsilon(1e-14));

  std::array<TimeMarkRect, 1> off_grid{{{0.0, 0.7, 0}}};
  CHECK_THROWS_AS(control_measure(mixed, z1, off_grid), std::invalid_argument);
}

TEST_CASE("measure mass equals the exact cell sum") {
  Rng rng(9);
  MarkSpace z = MarkSpace::uniform(3, 0.5);
  IntensityControl g = IntensityControl::constant(1.0, 1.0, 3, 5);
  for (auto& v : g.values) v = std::exp(0.3 * rng.normal());
  std::vector<TimeMarkRect> all;
  for (std::size_t j = 0; j < 3; ++j) all.push_back({0.0, 1.0, j});
  double mass = 0.0;
  for (std::size_t i = 0; i < g.intervals(); ++i)
    for (std::size_t j = 0; j < 3; ++j)
      mass += g.values[i * 3 + j] * (g.times[i + 1] - g.times[i]) * z.weights[j];
  CHECK(control_measure(g, z, all) == doctest::Approx(mass).epsilon(1e-13));
}

TEST_CASE("oscillatory perturbation energy") {
  ScalarControl zero = ScalarControl::zero(1.0);
  // midpoint sampling integrates sin^2 exactly: energy is T/4
  for (int n : {1, 4, 16}) {
    ScalarControl f = oscillatory_perturbation(zero, n);
    CHECK(energy_cost(f) == doctest::Approx(0.25).epsilon(1e-12));
  }
  // triangle bound on the combined energy
  ScalarControl base = ScalarControl::constant(0.7, 1.0, 4);
  double qb = energy_cost(base);
  for (int n : {1, 4, 16}) {
    ScalarControl f = oscillatory_perturbation(base, n);
    double bound = std::sqrt(qb) + std::sqrt(0.25);
    CHECK(energy_cost(f) <= bound * bound + 1e-10);
  }
}

TEST_CASE("oscillations fade against a fixed smooth test function") {
  // Riemann-Lebesgue: the pairing of sin(2 pi n t) with a fixed profile decays
  ScalarControl zero = ScalarControl::zero(1.0);
  double prev = 1e300;
  for (int n : {1, 4, 16, 64}) {
    ScalarControl f = oscillatory_perturbation(zero, n);
    double acc = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
      double mid = 0.5 * (f.times[i] + f.times[i + 1]);
      acc += (1.0 + mid * mid) * f.values[i] * (f.times[i + 1] - f.times[i]);
    }
    CHECK(std::abs(acc) < prev + 1e-12);
    prev = std::abs(acc);
  }
  CHECK(prev <= 1e-2);
}

TEST_CASE("oscillatory intensity keeps the induced mass") {
  MarkSpace z = MarkSpace::uniform(2, 1.0);
  IntensityControl g = IntensityControl::constant(1.3, 1.0, 2, 4);
  for (int n : {1, 4, 16}) {
    IntensityControl gn = oscillatory_intensity(g, n, 0.5);
    CHECK(gn.min_value() >= 0.0);
    std::vector<TimeMarkRect> all = {{0.0, 1.0, 0}, {0.0, 1.0, 1}};
    CHECK(control_measure(gn, z, all) ==
          doctest::Approx(control_measure(g, z, all)).epsilon(1e-12));
  }
}

TEST_CASE("control validation rejects malformed grids") {
  ScalarControl f;
  f.times = {0.0, 1.0, 0.5};
  f.values = {1.0, 2.0};
  CHECK_THROWS_AS(f.validate(), std::invalid_argument);

  IntensityControl g = IntensityControl::one(1.0, 1);
  g.values[0] = -1.0;
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);

  MarkSpace z;
  CHECK_THROWS_AS(z.validate(), std::invalid_argument);
}
