#include "g2ldp/verify.hpp"

#include <chrono>
#include <cmath>

namespace g2ldp {

namespace {

double grid_quadrature_l2(const SpectralField& u, int grid) {
  auto vals = velocity_on_grid(u, grid);
  double cell = (u.side() / grid) * (u.side() / grid);
  double acc = 0.0;
  for (std::size_t i = 0; i < vals[0].size(); ++i)
    acc += std::norm(vals[0][i]) + std::norm(vals[1][i]);
  return std::sqrt(acc * cell);
}

SpectralField gradient_component(const SpectralField& u, int axis) {
  // d/dx_axis applied mode-wise; stays in the amplitude frame.
  SpectralField out(u.cutoff(), u.side());
  double qs = u.qscale();
  u.for_each_mode([&](int k1, int k2, std::size_t idx) {
    double q = qs * (axis == 0 ? k1 : k2);
    out[idx] = Complex(0.0, q) * u[idx];
  });
  return out;
}

}  // namespace

OperatorSuiteReport verify_operators(double alpha, double side, std::span<const int> cutoffs,
                                     int samples, uint64_t seed) {
  auto t0 = std::chrono::steady_clock::now();
  OperatorSuiteReport rep;
  auto add = [&](const std::string& name, bool pass, double value, double bound,
                 const std::string& detail = "") {
    rep.lines.push_back({name, pass, value, bound, detail});
    rep.all_pass = rep.all_pass && pass;
  };

  FluidParams p;
  p.alpha = alpha;
  p.domain_side = side;
  p.kappa = 1.0;

  std::vector<double> bhat_constants;
  for (int n : cutoffs) {
    p.mode_cutoff = n;
    Rng rng(derive_seed(seed, 0x0b5e55ed, static_cast<uint64_t>(n)));
    std::string sfx = " (N=" + std::to_string(n) + ")";

    double worst_parseval = 0.0;
    double worst_poincare = 0.0;
    double worst_basis = 0.0;
    double worst_gs = 0.0;
    double worst_fs = 0.0;
    double worst_curl = 0.0;
    double worst_b03 = 0.0;
    double worst_b04 = 0.0;
    double c_b = 0.0;
    NonlinearWorkspace nl(n, side);

    for (int s = 0; s < samples; ++s) {
      SpectralField u = random_real_field(n, side, rng, 1.0, 0.6);
      SpectralField v = random_real_field(n, side, rng, 1.0, 0.6);
      SpectralField w = random_real_field(n, side, rng, 1.0, 0.6);

      // Parseval vs collocation quadrature at (4N)^2 points
      double spectral = norm_l2(u);
      double quad = grid_quadrature_l2(u, 4 * n);
      worst_parseval = std::max(worst_parseval, std::abs(spectral - quad) / spectral);
      double q1 = grid_quadrature_l2(gradient_component(u, 0), 4 * n);
      double q2 = grid_quadrature_l2(gradient_component(u, 1), 4 * n);
      double gq = std::sqrt(q1 * q1 + q2 * q2);
      double gs = norm_grad(u);
      worst_parseval = std::max(worst_parseval, std::abs(gs - gq) / gs);

      // Poincare chain with constant L / (2 pi); relative slack
      double pc = side / kTwoPi;
      double nv2 = norm_v(u, p) * norm_v(u, p);
      double ng2 = norm_grad(u) * norm_grad(u);
      worst_poincare = std::max(worst_poincare, (nv2 / (pc * pc + alpha) - ng2) / nv2);
      worst_poincare = std::max(worst_poincare, (ng2 - nv2 / alpha) / nv2);

      // eigen-relation on a random mode, real and imaginary parts
      {
        int k1 = 0, k2 = 0;
        while (k1 == 0 && k2 == 0) {
          k1 = int(rng.uniform() * (2 * n + 1)) - n;
          k2 = int(rng.uniform() * (2 * n + 1)) - n;
        }
        SpectralField e = SpectralField::single_mode(n, side, k1, k2, Complex(1.0, 0.0));
        double lambda = norm_w(e, p) * norm_w(e, p) / (norm_v(e, p) * norm_v(e, p));
        double qs2 = u.qscale() * u.qscale() * (double(k1) * k1 + double(k2) * k2);
        double lambda_formula = (1.0 + alpha * qs2) * qs2;
        worst_basis =
            std::max(worst_basis, std::abs(lambda - lambda_formula) / lambda_formula);
        double scale = norm_w(u, p) * norm_w(e, p) + 1e-300;
        worst_basis = std::max(
            worst_basis, std::abs(inner_w(u, e, p) - lambda * inner_v(u, e, p)) / scale);
        SpectralField ie = e;
        ie *= Complex(0.0, 1.0);
        worst_basis = std::max(
            worst_basis, std::abs(inner_w(u, ie, p) - lambda * inner_v(u, ie, p)) / scale);
      }

      // generalized Stokes: (sol, g)_V = (f, g)
      SpectralField sol = solve_generalized_stokes(u, p);
      worst_gs = std::max(worst_gs, std::abs(inner_v(sol, v, p) - inner_l2(u, v)) /
                                        (norm_l2(u) * norm_l2(v)));

      // filtered Stokes quadratic identity
      double lhs = inner_v(apply_filtered_stokes(u, p), u, p);
      double rhs = norm_grad(u) * norm_grad(u);
      worst_fs = std::max(worst_fs, std::abs(lhs - rhs) / rhs);

      // curl bound, relative slack
      double curl2 = norm_l2(curl_scalar(u));
      curl2 *= curl2;
      worst_curl = std::max(worst_curl, (curl2 - (2.0 / alpha) * nv2) / nv2);

      // rotational nonlinearity pairings
      SpectralField buv(n, side);
      SpectralField buw(n, side);
      nl.eval(u, v, p, buv);
      nl.eval(u, w, p, buw);
      double scale_b03 = norm_w(u, p) * norm_v(v, p) * norm_v(v, p);
      worst_b03 = std::max(worst_b03, std::abs(dual_pairing(buv, v, p)) / scale_b03);
      double pv = dual_pairing(buv, w, p);
      double pw = dual_pairing(buw, v, p);
      worst_b04 = std::max(worst_b04, std::abs(pv + pw) / (std::abs(pv) + std::abs(pw) + 1e-300));

      SpectralField buu(n, side);
      nl.eval(u, u, p, buu);
      c_b = std::max(c_b, norm_wdual(buu, p) / (norm_v(u, p) * norm_v(u, p)));
    }

    add("parseval-grid-quadrature" + sfx, worst_parseval <= 1e-10, worst_parseval, 1e-10);
    add("poincare-chain" + sfx, worst_poincare <= 1e-10, worst_poincare, 0.0,
        "relative slack of the two-sided bound");
    add("basis-eigen-relation" + sfx, worst_basis <= 1e-12, worst_basis, 1e-12);
    add("generalized-stokes-identity" + sfx, worst_gs <= 1e-12, worst_gs, 1e-12);
    add("filtered-stokes-identity" + sfx, worst_fs <= 1e-12, worst_fs, 1e-12);
    add("curl-bound" + sfx, worst_curl <= 1e-10, worst_curl, 0.0,
        "relative slack of (2/alpha)|u|_V^2");
    add("nonlinearity-skew-pairing" + sfx, worst_b03 <= 1e-10, worst_b03, 1e-10);
    add("nonlinearity-antisymmetry" + sfx, worst_b04 <= 1e-10, worst_b04, 1e-10);
    bhat_constants.push_back(c_b);
  }

  for (std::size_t i = 1; i < bhat_constants.size(); ++i) {
    bool ok = bhat_constants[i] <= 2.0 * bhat_constants[i - 1];
    std::string detail = "empirical dual-norm constants:";
    for (double cb : bhat_constants) detail += " " + std::to_string(cb);
    add("nonlinearity-dual-constant-growth", ok, bhat_constants[i],
        2.0 * bhat_constants[i - 1], detail);
  }

  rep.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace g2ldp
