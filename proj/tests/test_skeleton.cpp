#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "g2ldp/skeleton.hpp"

using namespace g2ldp;

namespace {
FluidParams params(int n = 8, double alpha = 1.0, double kappa = 1.0) {
  FluidParams p;
  p.mode_cutoff = n;
  p.alpha = alpha;
  p.kappa = kappa;
  return p;
}

SkeletonOptions options(double dt = 1e-3) {
  SkeletonOptions o;
  o.dt = dt;
  return o;
}
}  // namespace

TEST_CASE("zero is a fixed point of the uncontrolled default dynamics") {
  FluidParams p = params(6);
  MarkSpace z = MarkSpace::uniform(2, 1.0);
  CoefficientSet c = CoefficientSet::default_family(p, z);
  SpectralField x0(p.mode_cutoff, p.domain_side);
  ControlPair q = ControlPair::uncontrolled(1.0, 2);
  Trajectory t = solve_skeleton(x0, q, c, p, options(1e-2));
  for (double v : t.norm_v) CHECK(v == 0.0);
  for (double w : t.norm_w) CHECK(w == 0.0);
}

TEST_CASE("exact mode-wise exponential decay with all coefficients off") {
  FluidParams p = params(8, 0.7, 1.3);
  MarkSpace z = MarkSpace::uniform(1, 1.0);
  CoefficientSet c = CoefficientSet::zero(p, z);
  SkeletonOptions o = options(1e-3);
  o.nonlinearity = false;

  int k1 = 2, k2 = -1;
  Complex amp(0.4, -0.9);
  SpectralField x0(p.mode_cutoff, p.domain_side);
  x0.set(k1, k2, amp);
  x0.set(-k1, -k2, -std::conj(amp));
  ControlPair q = ControlPair::uncontrolled(1.0, 1);
  Trajectory t = solve_skeleton(x0, q, c, p, o);

  double mu = filtered_stokes_rate(p, k1, k2);
  for (std::size_t i = 0; i < t.nodes(); ++i) {
    Complex expect = amp * std::exp(-mu * t.times[i]);
    Complex got = t.state_at(i).at(k1, k2);
    CHECK(std::abs(got - expect) <= 1e-12 * std::abs(expect));
  }
}

TEST_CASE("self-convergence order of the time stepper") {
  FluidParams p = params(8);
  MarkSpace z = MarkSpace::uniform(2, 1.0);
  CoefficientSet c = CoefficientSet::default_family(p, z);
  SpectralField x0 = smooth_profile_field(p.mode_cutoff, p.domain_side, 4, 0.8);
  ControlPair q{ScalarControl::constant(0.5, 1.0), IntensityControl::constant(1.4, 1.0, 2)};

  SkeletonOptions o = options();
  auto solve_at = [&](double dt) {
    SkeletonOptions oo = o;
    oo.dt = dt;
    return solve_skeleton(x0, q, c, p, oo);
  };
  Trajectory t1 = solve_at(4e-3);
  Trajectory t2 = solve_at(2e-3);
  Trajectory t3 = solve_at(1e-3);
  double g12 = sup_distance_v(t1, t2, p);
  double g23 = sup_distance_v(t2, t3, p);
  double ratio = g12 / g23;
  INFO("gaps ", g12, " ", g23, " ratio ", ratio);
  CHECK(ratio >= 3.5);
  CHECK(ratio <= 4.5);
}

TEST_CASE("energy balance residual shrinks with the step") {
  FluidParams p = params(8);
  MarkSpace z = MarkSpace::uniform(2, 1.0);
  CoefficientSet c = CoefficientSet::default_family(p, z);
  SpectralField x0 = smooth_profile_field(p.mode_cutoff, p.domain_side, 4, 0.8);
  ControlPair q{ScalarControl::constant(0.4, 1.0), IntensityControl::constant(1.3, 1.0, 2)};

  auto max_residual = [&](double dt) {
    SkeletonOptions o = options(dt);
    Trajectory t = solve_skeleton(x0, q, c, p, o);
    std::vector<double> r = energy_report(t, q, c, p);
    double m = 0.0;
    for (double v : r) m = std::max(m, v);
    return m;
  };
  double r1 = max_residual(2e-3);
  double r2 = max_residual(1e-3);
  INFO("residuals ", r1, " ", r2);
  CHECK(r1 / r2 >= 1.8);

  // zero data leaves a zero residual
  SpectralField zero(p.mode_cutoff, p.domain_side);
  ControlPair q0 = ControlPair::uncontrolled(1.0, 2);
  Trajectory t0 = solve_skeleton(zero, q0, c, p, options(1e-2));
  for (double v : energy_report(t0, q0, c, p)) CHECK(v == 0.0);
}

TEST_CASE("energy residual of the pure linear decay is first-order small") {
  FluidParams p = params(6);
  MarkSpace z = MarkSpace::uniform(1, 1.0);
  CoefficientSet c = CoefficientSet::zero(p, z);
  SkeletonOptions o = options(1e-3);
  o.nonlinearity = false;
  SpectralField x0 = SpectralField::single_mode(p.mode_cutoff, p.domain_side, 1, 0, 1.0);
  ControlPair q = ControlPair::uncontrolled(1.0, 1);
  Trajectory t = solve_skeleton(x0, q, c, p, o);
  auto r = energy_report(t, q, c, p);
  double worst = 0.0;
  for (double v : r) worst = std::max(worst, v);
  // trapezoid quadrature of a smooth exact solution: residual = O(dt^2)
  CHECK(worst <= 1e-4 * t.norm_w[0] * t.norm_w[0]);
}

TEST_CASE("random controls hit their cost targets") {
  MarkSpace z = MarkSpace::uniform(2, 0.7);
  for (uint64_t seed : {1ull, 2ull, 3ull}) {
    ScalarControl f = random_scalar_control(1.0, 0.8, 8, seed);
    CHECK(energy_cost(f) == doctest::Approx(0.8).epsilon(1e-12));
    IntensityControl g = random_intensity_control(1.0, z, 0.6, 8, seed);
    CHECK(entropy_cost(g, z) == doctest::Approx(0.6).epsilon(1e-6));
    CHECK(g.min_value() > 0.0);
  }
}

TEST_CASE("w-bound scan is monotone in the budget and includes the uncontrolled run") {
  FluidParams p = params(6);
  MarkSpace z = MarkSpace::uniform(2, 1.0);
  CoefficientSet c = CoefficientSet::default_family(p, z);
  SpectralField x0 = smooth_profile_field(p.mode_cutoff, p.domain_side, 4, 0.6);
  SkeletonOptions o = options(2e-3);
  o.store_fields = false;

  WBoundScan s1 = w_bound_scan(1, 5, x0, c, p, o, 1.0, 2, 99);
  WBoundScan s2 = w_bound_scan(2, 5, x0, c, p, o, 1.0, 2, 99);
  CHECK(s1.blowups == 0);
  CHECK(s2.blowups == 0);
  CHECK(s2.max_sup_w2 >= s1.max_sup_w2);

  ControlPair q0 = ControlPair::uncontrolled(1.0, 2);
  Trajectory t0 = solve_skeleton(x0, q0, c, p, o);
  double uncontrolled = t0.sup_norm_w() * t0.sup_norm_w();
  CHECK(s1.max_sup_w2 >= uncontrolled * (1 - 1e-12));
  for (double cost : s1.cost_q1) CHECK(cost <= 1.0 + 1e-9);
  for (double cost : s1.cost_q2) CHECK(cost <= 1.0 + 1e-9);
}

TEST_CASE("uniqueness gap between resolutions") {
  FluidParams p = params(6);
  MarkSpace z = MarkSpace::uniform(1, 1.0);
  CoefficientSet c = CoefficientSet::default_family(p, z);
  SpectralField x0 = smooth_profile_field(p.mode_cutoff, p.domain_side, 4, 0.6);
  ControlPair q{ScalarControl::constant(0.3, 1.0), IntensityControl::constant(1.2, 1.0, 1)};

  UniquenessGap same = uniqueness_gap(x0, q, c, p, 1e-3, 1e-3, 0.1, options());
  CHECK(same.gap_v == 0.0);

  SpectralField zero(p.mode_cutoff, p.domain_side);
  ControlPair q0 = ControlPair::uncontrolled(1.0, 1);
  UniquenessGap trivial = uniqueness_gap(zero, q0, c, p, 2e-3, 1e-3, 0.1, options());
  CHECK(trivial.gap_v == 0.0);

  UniquenessGap g1 = uniqueness_gap(x0, q, c, p, 4e-3, 2e-3, 0.1, options());
  UniquenessGap g2 = uniqueness_gap(x0, q, c, p, 2e-3, 1e-3, 0.1, options());
  CHECK(g1.gap_v / g2.gap_v >= 3.0);  // second-order shrink between halvings
  CHECK(std::isfinite(g1.gronwall_budget));
  CHECK(g1.gronwall_budget >= 1.0);
}

TEST_CASE("fractional time seminorm against the closed form") {
  FluidParams p = params(4);
  SpectralField e = SpectralField::single_mode(p.mode_cutoff, p.domain_side, 1, 0, 1.0);

  // constant trajectory: zero seminorm
  Trajectory flat;
  for (int i = 0; i <= 100; ++i) {
    flat.times.push_back(i / 100.0);
    flat.states.push_back(e);
    flat.norm_v.push_back(norm_v(e, p));
    flat.norm_w.push_back(norm_w(e, p));
  }
  CHECK(fractional_seminorm(flat, 0.25, 2.0, TrajectoryNorm::V, p) == 0.0);

  // u(t) = t e: double integral of c^2 |t-s|^{1/2} has a closed form
  Trajectory lin;
  int nodes = 1000;
  for (int i = 0; i <= nodes; ++i) {
    double t = double(i) / nodes;
    SpectralField u = e;
    u *= t;
    lin.times.push_back(t);
    lin.states.push_back(u);
    lin.norm_v.push_back(norm_v(u, p));
    lin.norm_w.push_back(norm_w(u, p));
  }
  double c2 = inner_v(e, e, p);
  double expected = std::sqrt(c2 * 2.0 / (1.5 * 2.5));
  double got = fractional_seminorm(lin, 0.25, 2.0, TrajectoryNorm::V, p);
  CHECK(got == doctest::Approx(expected).epsilon(0.02));

  double wd = fractional_seminorm(lin, 0.45, 2.0, TrajectoryNorm::WDual, p);
  CHECK(std::isfinite(wd));
  CHECK(wd > 0.0);
}

TEST_CASE("blow-up detection aborts with a diagnostic") {
  FluidParams p = params(4);
  MarkSpace z = MarkSpace::uniform(1, 1.0);
  // strong linear amplification beats the viscous decay
  auto amplify = [&p](const SpectralField& u, double) {
    SpectralField out = u;
    out *= 30.0;
    return out;
  };
  auto zj = [&p](double, const SpectralField&, std::size_t) {
    return SpectralField(p.mode_cutoff, p.domain_side);
  };
  CoefficientSet c("amplifier", z, amplify, amplify, zj, 900.0, 900.0, 0.0, nullptr,
                   nullptr);
  SpectralField x0 = smooth_profile_field(p.mode_cutoff, p.domain_side, 1, 1.0);
  ControlPair q = ControlPair::uncontrolled(1.0, 1);
  SkeletonOptions o = options(1e-2);
  o.blowup_w = 100.0;
  CHECK_THROWS_AS(solve_skeleton(x0, q, c, p, o), BlowupError);
}

TEST_CASE("misaligned control grids are rejected") {
  FluidParams p = params(4);
  MarkSpace z = MarkSpace::uniform(1, 1.0);
  CoefficientSet c = CoefficientSet::zero(p, z);
  SpectralField x0(p.mode_cutoff, p.domain_side);
  ControlPair q{ScalarControl::constant(1.0, 1.0, 3), IntensityControl::one(1.0, 1)};
  CHECK_THROWS_AS(solve_skeleton(x0, q, c, p, options(1e-3)), std::invalid_argument);
}

TEST_CASE("cutoff suppresses the quadratic term above the threshold") {
  FluidParams p = params(6);
  MarkSpace z = MarkSpace::uniform(1, 1.0);
  CoefficientSet c = CoefficientSet::default_family(p, z);
  SpectralField x0 = smooth_profile_field(p.mode_cutoff, p.domain_side, 4, 1.2);
  REQUIRE(norm_v(x0, p) > 1.0);
  ControlPair q = ControlPair::uncontrolled(0.1, 1);

  SkeletonOptions with_cutoff = options(1e-3);
  with_cutoff.cutoff = true;
  with_cutoff.cutoff_level = 0.0;  // factor vanishes once |X|_V >= 1
  Trajectory a = solve_skeleton(x0, q, c, p, with_cutoff);

  SkeletonOptions no_nl = options(1e-3);
  no_nl.nonlinearity = false;
  Trajectory b = solve_skeleton(x0, q, c, p, no_nl);
  CHECK(sup_distance_v(a, b, p) == 0.0);
}
