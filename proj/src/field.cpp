#include "g2ldp/field.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <tuple>

namespace g2ldp {

void FluidParams::validate() const {
  if (!(alpha > 0.0)) throw std::invalid_argument("FluidParams: alpha must be > 0");
  if (!(kappa > 0.0)) throw std::invalid_argument("FluidParams: kappa must be > 0");
  if (!(domain_side > 0.0)) throw std::invalid_argument("FluidParams: domain_side must be > 0");
  if (mode_cutoff < 1) throw std::invalid_argument("FluidParams: mode_cutoff must be >= 1");
}

std::size_t SpectralField::checked_index(int k1, int k2) const {
  if (k1 < -n_ || k1 > n_ || k2 < -n_ || k2 > n_ || (k1 == 0 && k2 == 0))
    throw std::out_of_range("SpectralField: wavenumber outside retained set");
  return static_cast<std::size_t>(detail::mode_index(n_, k1, k2));
}

SpectralField SpectralField::single_mode(int cutoff, double side, int k1, int k2, Complex amp) {
  SpectralField u(cutoff, side);
  u.set(k1, k2, amp);
  return u;
}

SpectralField& SpectralField::operator+=(const SpectralField& o) {
  if (!same_layout(o)) throw std::invalid_argument("SpectralField: layout mismatch");
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& o) {
  if (!same_layout(o)) throw std::invalid_argument("SpectralField: layout mismatch");
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double s) {
  for (auto& c : a_) c *= s;
  return *this;
}

SpectralField& SpectralField::operator*=(Complex s) {
  for (auto& c : a_) c *= s;
  return *this;
}

void SpectralField::axpy(double s, const SpectralField& o) {
  if (!same_layout(o)) throw std::invalid_argument("SpectralField: layout mismatch");
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += s * o.a_[i];
}

double SpectralField::reality_defect() const {
  double worst = 0.0;
  for_each_mode([&](int k1, int k2, std::size_t idx) {
    Complex mate = a_[static_cast<std::size_t>(detail::mode_index(n_, -k1, -k2))];
    worst = std::max(worst, std::abs(mate + std::conj(a_[idx])));
  });
  return worst;
}

void SpectralField::symmetrize_real() {
  for_each_mode([&](int k1, int k2, std::size_t idx) {
    if (k1 < 0 || (k1 == 0 && k2 < 0)) return;  // handle each +/- pair once
    std::size_t mate = static_cast<std::size_t>(detail::mode_index(n_, -k1, -k2));
    Complex a = a_[idx];
    Complex b = a_[mate];
    a_[idx] = 0.5 * (a - std::conj(b));
    a_[mate] = 0.5 * (b - std::conj(a));
  });
}

bool SpectralField::all_finite() const {
  for (const auto& c : a_)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  return true;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }

// --- Norms ------------------------------------------------------------------

namespace {
inline double sq(double x) { return x * x; }

template <typename Weight>
double weighted_norm2(const SpectralField& u, Weight w) {
  double acc = 0.0;
  double qs = u.qscale();
  double cell = sq(u.side());  // Parseval factor: each mode carries L^2
  u.for_each_mode([&](int k1, int k2, std::size_t idx) {
    double q2 = sq(qs) * (sq(double(k1)) + sq(double(k2)));
    acc += w(q2) * std::norm(u[idx]) * cell;
  });
  return acc;
}

template <typename Weight>
double weighted_inner(const SpectralField& a, const SpectralField& b, Weight w) {
  if (!a.same_layout(b)) throw std::invalid_argument("inner product: layout mismatch");
  double acc = 0.0;
  double qs = a.qscale();
  double cell = sq(a.side());
  a.for_each_mode([&](int k1, int k2, std::size_t idx) {
    double q2 = sq(qs) * (sq(double(k1)) + sq(double(k2)));
    acc += w(q2) * (a[idx] * std::conj(b[idx])).real() * cell;
  });
  return acc;
}
}  // namespace

double norm_l2(const SpectralField& u) {
  return std::sqrt(weighted_norm2(u, [](double) { return 1.0; }));
}

double norm_grad(const SpectralField& u) {
  return std::sqrt(weighted_norm2(u, [](double q2) { return q2; }));
}

double norm_v(const SpectralField& u, const FluidParams& p) {
  double a = p.alpha;
  return std::sqrt(weighted_norm2(u, [a](double q2) { return 1.0 + a * q2; }));
}

double norm_w(const SpectralField& u, const FluidParams& p) {
  double a = p.alpha;
  return std::sqrt(weighted_norm2(u, [a](double q2) { return sq(1.0 + a * q2) * q2; }));
}

double norm_wdual(const SpectralField& u, const FluidParams& p) {
  (void)p;
  return std::sqrt(weighted_norm2(u, [](double q2) { return 1.0 / q2; }));
}

double norm_l2(const ScalarModeField& c) {
  double acc = 0.0;
  double cell = sq(c.side());
  for (const auto& a : c.coeffs()) acc += std::norm(a) * cell;
  return std::sqrt(acc);
}

double inner_l2(const SpectralField& a, const SpectralField& b) {
  return weighted_inner(a, b, [](double) { return 1.0; });
}

double inner_grad(const SpectralField& a, const SpectralField& b) {
  return weighted_inner(a, b, [](double q2) { return q2; });
}

double inner_v(const SpectralField& a, const SpectralField& b, const FluidParams& p) {
  double al = p.alpha;
  return weighted_inner(a, b, [al](double q2) { return 1.0 + al * q2; });
}

double inner_w(const SpectralField& a, const SpectralField& b, const FluidParams& p) {
  double al = p.alpha;
  return weighted_inner(a, b, [al](double q2) { return sq(1.0 + al * q2) * q2; });
}

double dual_pairing(const SpectralField& f, const SpectralField& w, const FluidParams& p) {
  return inner_v(f, w, p);
}

// --- Diagonal operators -----------------------------------------------------

ScalarModeField curl_scalar(const SpectralField& u) {
  ScalarModeField c(u.cutoff(), u.side());
  double qs = u.qscale();
  u.for_each_mode([&](int k1, int k2, std::size_t idx) {
    double q = qs * std::sqrt(sq(double(k1)) + sq(double(k2)));
    c.set(k1, k2, Complex(0.0, q) * u[idx]);
  });
  return c;
}

namespace {
template <typename Mult>
SpectralField diagonal_map(const SpectralField& u, const FluidParams& p, Mult m) {
  SpectralField out(u.cutoff(), u.side());
  double qs = u.qscale();
  u.for_each_mode([&](int k1, int k2, std::size_t idx) {
    double q2 = sq(qs) * (sq(double(k1)) + sq(double(k2)));
    out[idx] = m(q2, p.alpha) * u[idx];
  });
  return out;
}
}  // namespace

SpectralField solve_generalized_stokes(const SpectralField& f, const FluidParams& p) {
  return diagonal_map(f, p, [](double q2, double a) { return 1.0 / (1.0 + a * q2); });
}

SpectralField apply_filtered_stokes(const SpectralField& u, const FluidParams& p) {
  return diagonal_map(u, p, [](double q2, double a) { return q2 / (1.0 + a * q2); });
}

SpectralField apply_stokes(const SpectralField& u, const FluidParams& p) {
  return diagonal_map(u, p, [](double q2, double) { return q2; });
}

double filtered_stokes_rate(const FluidParams& p, int k1, int k2) {
  double qs = kTwoPi / p.domain_side;
  double q2 = sq(qs) * (sq(double(k1)) + sq(double(k2)));
  return p.kappa * q2 / (1.0 + p.alpha * q2);
}

// --- Dealiased nonlinearity --------------------------------------------------

int dealias_grid(int cutoff) {
  int m = 3 * cutoff + 2;
  return m % 2 == 0 ? m : m + 1;
}

struct NonlinearWorkspace::Impl {
  int n;
  int m;
  double side;
  Eigen::MatrixXcd synth;    // M x K, synth(x, j) = exp(+i 2 pi x (j - n) / M)
  Eigen::MatrixXcd analyze;  // K x M, adjoint of synth / M^2 absorbed at use site
  // scratch
  Eigen::MatrixXcd spec_c, spec_v1, spec_v2;     // K x K
  Eigen::MatrixXcd grid_c, grid_v1, grid_v2;     // M x M
  Eigen::MatrixXcd grid_w1, grid_w2;             // M x M
  Eigen::MatrixXcd tmp_mk, tmp_km;               // M x K, K x M
  Eigen::MatrixXcd hat_w1, hat_w2;               // K x K

  Impl(int cutoff, double side_in, int grid) : n(cutoff), m(grid), side(side_in) {
    int K = 2 * n + 1;
    synth.resize(m, K);
    analyze.resize(K, m);
    for (int x = 0; x < m; ++x)
      for (int j = 0; j < K; ++j) {
        double phase = kTwoPi * double(x) * double(j - n) / double(m);
        synth(x, j) = Complex(std::cos(phase), std::sin(phase));
        analyze(j, x) = std::conj(synth(x, j));
      }
    spec_c.resize(K, K);
    spec_v1.resize(K, K);
    spec_v2.resize(K, K);
    grid_c.resize(m, m);
    grid_v1.resize(m, m);
    grid_v2.resize(m, m);
    grid_w1.resize(m, m);
    grid_w2.resize(m, m);
    tmp_mk.resize(m, K);
    tmp_km.resize(K, m);
    hat_w1.resize(K, K);
    hat_w2.resize(K, K);
  }

  void to_grid(const Eigen::MatrixXcd& spec, Eigen::MatrixXcd& grid) {
    tmp_mk.noalias() = synth * spec;
    grid.noalias() = tmp_mk * synth.transpose();
  }

  void to_spec(const Eigen::MatrixXcd& grid, Eigen::MatrixXcd& spec) {
    tmp_km.noalias() = analyze * grid;
    spec.noalias() = tmp_km * analyze.transpose();
    spec *= 1.0 / (double(m) * double(m));
  }
};

NonlinearWorkspace::NonlinearWorkspace(int cutoff, double side, int grid) {
  if (cutoff < 1) throw std::invalid_argument("NonlinearWorkspace: cutoff must be >= 1");
  if (grid == 0) grid = dealias_grid(cutoff);
  if (grid < 3 * cutoff)
    throw std::invalid_argument(
        "NonlinearWorkspace: collocation grid below the dealiasing requirement (3N)");
  impl_ = std::make_unique<Impl>(cutoff, side, grid);
}

NonlinearWorkspace::~NonlinearWorkspace() = default;
NonlinearWorkspace::NonlinearWorkspace(NonlinearWorkspace&&) noexcept = default;
NonlinearWorkspace& NonlinearWorkspace::operator=(NonlinearWorkspace&&) noexcept = default;

int NonlinearWorkspace::cutoff() const { return impl_->n; }
int NonlinearWorkspace::grid() const { return impl_->m; }

void NonlinearWorkspace::eval(const SpectralField& u, const SpectralField& v,
                              const FluidParams& p, SpectralField& out) {
  Impl& w = *impl_;
  if (u.cutoff() != w.n || v.cutoff() != w.n || u.side() != w.side || v.side() != w.side)
    throw std::invalid_argument("NonlinearWorkspace: field layout mismatch");
  if (!out.same_layout(u)) out = SpectralField(u.cutoff(), u.side());

  const int n = w.n;
  const double qs = u.qscale();
  w.spec_c.setZero();
  w.spec_v1.setZero();
  w.spec_v2.setZero();
  // curl(u - alpha Lap u): amplitude i|q|(1 + alpha |q|^2) u(k); v in the
  // cartesian frame: v(k) * k_perp/|k|.
  u.for_each_mode([&](int k1, int k2, std::size_t idx) {
    double kk = std::sqrt(sq(double(k1)) + sq(double(k2)));
    double q2 = sq(qs) * sq(kk);
    w.spec_c(k1 + n, k2 + n) = Complex(0.0, qs * kk * (1.0 + p.alpha * q2)) * u[idx];
    Complex vv = v[idx] / kk;
    w.spec_v1(k1 + n, k2 + n) = -double(k2) * vv;
    w.spec_v2(k1 + n, k2 + n) = double(k1) * vv;
  });

  w.to_grid(w.spec_c, w.grid_c);
  w.to_grid(w.spec_v1, w.grid_v1);
  w.to_grid(w.spec_v2, w.grid_v2);

  // c x v = c * (-v2, v1) pointwise
  w.grid_w1.array() = -w.grid_c.array() * w.grid_v2.array();
  w.grid_w2.array() = w.grid_c.array() * w.grid_v1.array();

  w.to_spec(w.grid_w1, w.hat_w1);
  w.to_spec(w.grid_w2, w.hat_w2);

  // Leray projection onto the k_perp frame, then the (1 + alpha|q|^2)^{-1} smoother.
  out.for_each_mode([&](int k1, int k2, std::size_t idx) {
    double kk = std::sqrt(sq(double(k1)) + sq(double(k2)));
    double q2 = sq(qs) * sq(kk);
    Complex along = (-double(k2) * w.hat_w1(k1 + n, k2 + n) +
                     double(k1) * w.hat_w2(k1 + n, k2 + n)) /
                    kk;
    out[idx] = along / (1.0 + p.alpha * q2);
  });
}

SpectralField nonlinear_term(const SpectralField& u, const SpectralField& v,
                             const FluidParams& p, int grid) {
  thread_local std::map<std::tuple<int, double, int>, std::unique_ptr<NonlinearWorkspace>> cache;
  int g = grid == 0 ? dealias_grid(u.cutoff()) : grid;
  auto key = std::make_tuple(u.cutoff(), u.side(), g);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, std::make_unique<NonlinearWorkspace>(u.cutoff(), u.side(), g)).first;
  SpectralField out(u.cutoff(), u.side());
  it->second->eval(u, v, p, out);
  return out;
}

std::array<std::vector<Complex>, 2> velocity_on_grid(const SpectralField& u, int grid) {
  if (grid < 2 * u.cutoff() + 1)
    throw std::invalid_argument("velocity_on_grid: grid too small to represent the field");
  int n = u.cutoff();
  int K = 2 * n + 1;
  Eigen::MatrixXcd synth(grid, K);
  for (int x = 0; x < grid; ++x)
    for (int j = 0; j < K; ++j) {
      double phase = kTwoPi * double(x) * double(j - n) / double(grid);
      synth(x, j) = Complex(std::cos(phase), std::sin(phase));
    }
  Eigen::MatrixXcd s1 = Eigen::MatrixXcd::Zero(K, K);
  Eigen::MatrixXcd s2 = Eigen::MatrixXcd::Zero(K, K);
  u.for_each_mode([&](int k1, int k2, std::size_t idx) {
    double kk = std::sqrt(sq(double(k1)) + sq(double(k2)));
    Complex vv = u[idx] / kk;
    s1(k1 + n, k2 + n) = -double(k2) * vv;
    s2(k1 + n, k2 + n) = double(k1) * vv;
  });
  Eigen::MatrixXcd g1 = synth * s1 * synth.transpose();
  Eigen::MatrixXcd g2 = synth * s2 * synth.transpose();
  std::array<std::vector<Complex>, 2> out;
  out[0].assign(g1.data(), g1.data() + g1.size());
  out[1].assign(g2.data(), g2.data() + g2.size());
  return out;
}

// --- Random and deterministic profile fields ---------------------------------

SpectralField random_real_field(int cutoff, double side, Rng& rng, double amplitude,
                                double decay) {
  SpectralField u(cutoff, side);
  u.for_each_mode([&](int k1, int k2, std::size_t idx) {
    if (k1 < 0 || (k1 == 0 && k2 < 0)) return;
    double kk = std::sqrt(sq(double(k1)) + sq(double(k2)));
    double scale = amplitude * std::exp(-decay * kk);
    Complex a(scale * rng.normal(), scale * rng.normal());
    u[idx] = a;
    u.set(-k1, -k2, -std::conj(a));
  });
  return u;
}

SpectralField smooth_profile_field(int cutoff, double side, int tag, double amplitude) {
  SpectralField u(cutoff, side);
  int reach = std::min(cutoff, 2);
  u.for_each_mode([&](int k1, int k2, std::size_t idx) {
    (void)idx;
    if (std::abs(k1) > reach || std::abs(k2) > reach) return;
    if (k1 < 0 || (k1 == 0 && k2 < 0)) return;
    double kk = std::sqrt(sq(double(k1)) + sq(double(k2)));
    Complex a = amplitude * std::exp(-1.5 * kk) *
                Complex(std::cos(0.7 * tag + kk + k1), std::sin(1.3 * tag - k2));
    u.set(k1, k2, a);
    u.set(-k1, -k2, -std::conj(a));
  });
  return u;
}

}  // namespace g2ldp
