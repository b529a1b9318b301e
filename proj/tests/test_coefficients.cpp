#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "g2ldp/coefficients.hpp"

using namespace g2ldp;

namespace {
FluidParams params(int n = 6) {
  FluidParams p;
  p.mode_cutoff = n;
  return p;
}
}  // namespace

TEST_CASE("smoothing of coefficient outputs matches the diagonal solve") {
  FluidParams p = params();
  MarkSpace z = MarkSpace::uniform(2, 1.0);
  CoefficientSet c = CoefficientSet::default_family(p, z);
  Rng rng(3);
  SpectralField u = random_real_field(p.mode_cutoff, p.domain_side, rng);
  SpectralField direct = solve_generalized_stokes(c.drift(u, 0.3), p);
  SpectralField via = c.smoothed_drift(u, 0.3, p);
  CHECK(norm_v(direct - via, p) == 0.0);

  // single mode halves at alpha=1, k=(1,0)
  SpectralField e = SpectralField::single_mode(p.mode_cutoff, p.domain_side, 1, 0, 1.0);
  CHECK(solve_generalized_stokes(e, p).at(1, 0).real() == doctest::Approx(0.5));

  // adjoint identity of the smoother against the plain inner product
  for (int s = 0; s < 30; ++s) {
    SpectralField f = random_real_field(p.mode_cutoff, p.domain_side, rng);
    SpectralField g = random_real_field(p.mode_cutoff, p.domain_side, rng);
    CHECK(std::abs(inner_v(solve_generalized_stokes(f, p), g, p) - inner_l2(f, g)) <=
          1e-12 * norm_l2(f) * norm_l2(g));
  }
}

TEST_CASE("lipschitz checker on exact maps") {
  FluidParams p = params();
  MarkSpace z = MarkSpace::uniform(1, 1.0);

  CoefficientSet zero = CoefficientSet::zero(p, z);
  LipschitzReport r0 = check_lipschitz(zero, p, 20, 42);
  CHECK(r0.ratio_drift == 0.0);
  CHECK(r0.ratio_gain == 0.0);
  CHECK(r0.ratio_jump == 0.0);
  CHECK(r0.within_declared(zero));

  // a linear map c*u has squared ratio exactly c^2
  double scale = 0.7;
  auto lin = [scale](const SpectralField& u, double) {
    SpectralField out = u;
    out *= scale;
    return out;
  };
  auto zj = [&p](double, const SpectralField&, std::size_t) {
    return SpectralField(p.mode_cutoff, p.domain_side);
  };
  CoefficientSet linear("linear", z, lin, lin, zj, scale * scale, scale * scale, 0.0,
                        nullptr, nullptr);
  LipschitzReport rl = check_lipschitz(linear, p, 50, 42);
  CHECK(rl.ratio_drift == doctest::Approx(scale * scale).epsilon(1e-12));
  CHECK(rl.ratio_gain == doctest::Approx(scale * scale).epsilon(1e-12));
  CHECK(rl.within_declared(linear));
}

TEST_CASE("default family passes its declared constants") {
  FluidParams p = params();
  MarkSpace z = MarkSpace::uniform(2, 0.8);
  CoefficientSet c = CoefficientSet::default_family(p, z);

  LipschitzReport lip = check_lipschitz(c, p, 200, 7);
  CHECK(lip.drift_zero_at_origin);
  CHECK(lip.gain_zero_at_origin);
  CHECK(lip.within_declared(c));
  CHECK(lip.ratio_drift <= c.lip_drift() * (1 + 1e-9));
  CHECK(lip.ratio_jump <= c.lip_jump() * (1 + 1e-9));

  GrowthReport growth = check_growth(c, p, 200, 7);
  CHECK(growth.ratio_q1 > 0.0);
  CHECK(std::isfinite(growth.ratio_q1));
  CHECK(std::isfinite(growth.ratio_q2));
}

TEST_CASE("growth checker on a homogeneous jump map") {
  FluidParams p = params();
  MarkSpace z = MarkSpace::uniform(2, 1.0);
  // sigma(t,u,z_j) = beta_j u: the q=1 ratio tends to sum nu_j beta_j^2 from below
  std::vector<double> betas = {0.5, 0.25};
  auto zf = [&p](const SpectralField&, double) {
    return SpectralField(p.mode_cutoff, p.domain_side);
  };
  auto jump = [betas](double, const SpectralField& u, std::size_t j) {
    SpectralField out = u;
    out *= betas[j];
    return out;
  };
  double csum = 0.0;
  for (std::size_t j = 0; j < 2; ++j) csum += z.weights[j] * betas[j] * betas[j];
  CoefficientSet c("homogeneous", z, zf, zf, jump, 0.0, 0.0, csum, nullptr, nullptr);
  GrowthReport g = check_growth(c, p, 300, 11);
  CHECK(g.ratio_q1 <= csum * (1 + 1e-12));
  CHECK(g.ratio_q1 >= 0.5 * csum);  // large samples approach the bound

  CoefficientSet zero = CoefficientSet::zero(p, z);
  GrowthReport g0 = check_growth(zero, p, 10, 11);
  CHECK(g0.ratio_q1 == 0.0);
  CHECK(g0.ratio_q2 == 0.0);
}

TEST_CASE("exponential integrability of declared envelopes") {
  FluidParams p = params();
  MarkSpace z = MarkSpace::uniform(1, 1.0);
  CoefficientSet zero = CoefficientSet::zero(p, z);
  auto r = check_exponential_integrability(zero, 1.0, 1.0);
  CHECK(r.value0 == doctest::Approx(1.0).epsilon(1e-12));  // exp(0) over T * nu(Z) = 1

  // constant unit envelope integrates to e
  auto one = [](double, std::size_t) { return 1.0; };
  auto zf = [&p](const SpectralField&, double) {
    return SpectralField(p.mode_cutoff, p.domain_side);
  };
  auto zj = [&p](double, const SpectralField&, std::size_t) {
    return SpectralField(p.mode_cutoff, p.domain_side);
  };
  CoefficientSet unit("unit-envelope", z, zf, zf, zj, 0.0, 0.0, 0.0, one, one);
  auto r1 = check_exponential_integrability(unit, 1.0, 1.0);
  CHECK(r1.value0 == doctest::Approx(std::exp(1.0)).epsilon(1e-12));

  CoefficientSet def = CoefficientSet::default_family(p, z);
  auto rd = check_exponential_integrability(def, 1.0, 1.0);
  CHECK(std::isfinite(rd.value0));
  CHECK(std::isfinite(rd.value1));
}

TEST_CASE("entropy budget constants over trial controls") {
  FluidParams p = params();
  MarkSpace z = MarkSpace::uniform(1, 1.0);
  auto one = [](double, std::size_t) { return 1.0; };
  auto zf = [&p](const SpectralField&, double) {
    return SpectralField(p.mode_cutoff, p.domain_side);
  };
  auto zj = [&p](double, const SpectralField&, std::size_t) {
    return SpectralField(p.mode_cutoff, p.domain_side);
  };
  CoefficientSet c("unit-envelope", z, zf, zf, zj, 0.0, 0.0, 0.0, one, one);

  // g = 1: the |g-1| part vanishes and the (g+1) part doubles the mass
  std::vector<IntensityControl> trials = {IntensityControl::one(1.0, 1)};
  auto k = entropy_budget_constants(c, 1.0, trials);
  CHECK(k.c01 == 0.0);
  CHECK(k.c02 == doctest::Approx(2.0).epsilon(1e-12));

  // constant g = cv within budget: |g-1| integral is |cv-1| * T * nu
  double cv = 2.0;
  double m = poisson_entropy(cv) + 0.1;
  trials.push_back(IntensityControl::constant(cv, 1.0, 1));
  auto k2 = entropy_budget_constants(c, m, trials);
  CHECK(k2.c01 == doctest::Approx(cv - 1.0).epsilon(1e-12));
  CHECK(k2.c02 == doctest::Approx(cv + 1.0).epsilon(1e-12));

  std::vector<IntensityControl> empty;
  CHECK_THROWS_AS(entropy_budget_constants(c, 1.0, empty), std::invalid_argument);

  std::vector<IntensityControl> outside = {IntensityControl::constant(50.0, 1.0, 1)};
  CHECK_THROWS_AS(entropy_budget_constants(c, 1.0, outside), std::invalid_argument);
}

TEST_CASE("envelopes dominate sampled norms for the default family") {
  FluidParams p = params();
  MarkSpace z = MarkSpace::uniform(3, 0.6);
  CoefficientSet c = CoefficientSet::default_family(p, z);
  Rng rng(13);
  for (int s = 0; s < 1000; ++s) {
    double t = rng.uniform();
    SpectralField u = random_real_field(p.mode_cutoff, p.domain_side, rng, 1.5, 0.7);
    std::size_t j = s % 3;
    double ratio = norm_v(c.jump(t, u, j), p) / (1.0 + norm_v(u, p));
    CHECK(ratio <= c.env0(t, j) * (1 + 1e-12));
  }
}
