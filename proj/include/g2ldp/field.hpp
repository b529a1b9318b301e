#pragma once

#include <algorithm>
#include <array>
#include <complex>
#include <memory>
#include <vector>

#include "g2ldp/common.hpp"

namespace g2ldp {

using Complex = std::complex<double>;

/// Physical and discretization parameters of the periodic second-grade fluid.
struct FluidParams {
  double alpha = 1.0;        ///< elastic parameter (coefficient of -Δ in the state variable)
  double kappa = 1.0;        ///< viscosity
  double domain_side = kTwoPi;  ///< torus period L
  int mode_cutoff = 8;       ///< retain wavenumbers with |k|_inf <= N

  void validate() const;
};

namespace detail {
inline int mode_index(int n, int k1, int k2) {
  int idx = (k1 + n) * (2 * n + 1) + (k2 + n);
  int zero = n * (2 * n + 1) + n;
  return idx < zero ? idx : idx - 1;
}
inline std::size_t mode_count(int n) {
  std::size_t side = static_cast<std::size_t>(2 * n + 1);
  return side * side - 1;
}
}  // namespace detail

/// Divergence-free, mean-zero velocity field on the torus [0,L]^2, stored as
/// complex amplitudes along the unit vector k_perp/|k| for 0<|k|_inf<=N.
/// Divergence-freeness and zero mean hold by construction.  A field is the
/// coefficient set of a real vector field iff u(-k) = -conj(u(k)): the sign
/// comes from k_perp flipping with k, so conjugate symmetry of the underlying
/// vector amplitudes turns into this signed relation in the local frame.
class SpectralField {
 public:
  SpectralField() = default;
  SpectralField(int cutoff, double side)
      : n_(cutoff), side_(side), a_(detail::mode_count(cutoff), Complex(0.0, 0.0)) {
    if (cutoff < 1) throw std::invalid_argument("SpectralField: cutoff must be >= 1");
    if (!(side > 0.0)) throw std::invalid_argument("SpectralField: domain side must be > 0");
  }

  static SpectralField zero(const FluidParams& p) { return SpectralField(p.mode_cutoff, p.domain_side); }
  static SpectralField single_mode(int cutoff, double side, int k1, int k2, Complex amp);

  int cutoff() const { return n_; }
  double side() const { return side_; }
  std::size_t size() const { return a_.size(); }
  bool empty() const { return a_.empty(); }

  /// Wavenumber scale: the physical wavenumber of mode k is (2*pi/L)*k.
  double qscale() const { return kTwoPi / side_; }

  Complex at(int k1, int k2) const { return a_[checked_index(k1, k2)]; }
  void set(int k1, int k2, Complex v) { a_[checked_index(k1, k2)] = v; }

  Complex* data() { return a_.data(); }
  const Complex* data() const { return a_.data(); }
  Complex& operator[](std::size_t i) { return a_[i]; }
  Complex operator[](std::size_t i) const { return a_[i]; }

  SpectralField& operator+=(const SpectralField& o);
  SpectralField& operator-=(const SpectralField& o);
  SpectralField& operator*=(double s);
  SpectralField& operator*=(Complex s);
  /// this += s * o, without temporaries.
  void axpy(double s, const SpectralField& o);

  void set_zero() { std::fill(a_.begin(), a_.end(), Complex(0.0, 0.0)); }

  /// Max |u(-k) + conj(u(k))| over modes: 0 exactly on real vector fields.
  double reality_defect() const;
  /// Projects onto the real subspace (halves the defect direction away).
  void symmetrize_real();

  bool all_finite() const;

  bool same_layout(const SpectralField& o) const { return n_ == o.n_ && side_ == o.side_; }

  /// Calls fn(k1, k2, flat_index) over all retained modes.
  template <typename Fn>
  void for_each_mode(Fn&& fn) const {
    std::size_t idx = 0;
    for (int k1 = -n_; k1 <= n_; ++k1)
      for (int k2 = -n_; k2 <= n_; ++k2) {
        if (k1 == 0 && k2 == 0) continue;
        fn(k1, k2, idx++);
      }
  }

 private:
  std::size_t checked_index(int k1, int k2) const;
  int n_ = 0;
  double side_ = kTwoPi;
  std::vector<Complex> a_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);

/// Scalar spectral function on the torus (the image of the scalar curl).
class ScalarModeField {
 public:
  ScalarModeField() = default;
  ScalarModeField(int cutoff, double side)
      : n_(cutoff), side_(side), a_(detail::mode_count(cutoff), Complex(0.0, 0.0)) {}
  int cutoff() const { return n_; }
  double side() const { return side_; }
  Complex at(int k1, int k2) const { return a_[detail::mode_index(n_, k1, k2)]; }
  void set(int k1, int k2, Complex v) { a_[detail::mode_index(n_, k1, k2)] = v; }
  const std::vector<Complex>& coeffs() const { return a_; }
  std::vector<Complex>& coeffs() { return a_; }

 private:
  int n_ = 0;
  double side_ = kTwoPi;
  std::vector<Complex> a_;
};

// --- Norms and inner products (exact Parseval sums) ------------------------

double norm_l2(const SpectralField& u);
double norm_grad(const SpectralField& u);
double norm_v(const SpectralField& u, const FluidParams& p);
double norm_w(const SpectralField& u, const FluidParams& p);
/// Dual norm of the strong-norm space, restricted to the truncated modes.
double norm_wdual(const SpectralField& u, const FluidParams& p);
double norm_l2(const ScalarModeField& c);

double inner_l2(const SpectralField& a, const SpectralField& b);
double inner_grad(const SpectralField& a, const SpectralField& b);
double inner_v(const SpectralField& a, const SpectralField& b, const FluidParams& p);
double inner_w(const SpectralField& a, const SpectralField& b, const FluidParams& p);

/// Duality pairing between the dual space and the strong space; for fields in
/// the weak space it coincides with the V-inner product.
double dual_pairing(const SpectralField& f, const SpectralField& w, const FluidParams& p);

// --- Linear operators (diagonal on the torus basis) ------------------------

/// 2D scalar curl d1 u2 - d2 u1; mode amplitude i*|q_k|*u(k).
ScalarModeField curl_scalar(const SpectralField& u);

/// Solves v - alpha*Laplacian(v) = f on divergence-free fields:
/// v(k) = f(k) / (1 + alpha |q_k|^2).
SpectralField solve_generalized_stokes(const SpectralField& f, const FluidParams& p);

/// The smoothed Stokes operator (I + alpha A)^{-1} A:
/// multiplier |q_k|^2 / (1 + alpha |q_k|^2).
SpectralField apply_filtered_stokes(const SpectralField& u, const FluidParams& p);

/// The Stokes operator A = -P Laplacian (multiplier |q_k|^2).
SpectralField apply_stokes(const SpectralField& u, const FluidParams& p);

/// Per-mode decay rate of the linear part: kappa |q|^2 / (1 + alpha |q|^2).
double filtered_stokes_rate(const FluidParams& p, int k1, int k2);

// --- Dealiased rotational nonlinearity -------------------------------------

/// Collocation grid size guaranteeing alias-free quadratic products.
int dealias_grid(int cutoff);

/// Pseudo-spectral evaluator for the smoothed rotational nonlinearity
///   (I + alpha A)^{-1} P( curl(u - alpha Laplacian u) x v ),
/// truncated to the retained modes.  Holds the collocation transform tables
/// and scratch buffers; one instance per thread of use.
class NonlinearWorkspace {
 public:
  /// grid == 0 selects the default dealiased size; grids below the dealiasing
  /// requirement (3N) are rejected.
  NonlinearWorkspace(int cutoff, double side, int grid = 0);
  ~NonlinearWorkspace();
  NonlinearWorkspace(NonlinearWorkspace&&) noexcept;
  NonlinearWorkspace& operator=(NonlinearWorkspace&&) noexcept;

  int cutoff() const;
  int grid() const;

  void eval(const SpectralField& u, const SpectralField& v, const FluidParams& p,
            SpectralField& out);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Convenience wrapper around a thread-local workspace cache.
SpectralField nonlinear_term(const SpectralField& u, const SpectralField& v,
                             const FluidParams& p, int grid = 0);

/// Collocation values of the velocity field on an MxM grid (row-major,
/// component-major: result[0] = u1 values, result[1] = u2 values).
std::array<std::vector<Complex>, 2> velocity_on_grid(const SpectralField& u, int grid);

// --- Random fields ----------------------------------------------------------

/// Random real (conjugate-symmetric in the vector sense) field with
/// exponentially decaying spectrum: |u(k)| ~ amplitude * exp(-decay |k|).
SpectralField random_real_field(int cutoff, double side, Rng& rng, double amplitude = 1.0,
                                double decay = 1.0);

/// Smooth deterministic profile used by built-in coefficient families:
/// low modes only, amplitudes fixed by (tag, cutoff).
SpectralField smooth_profile_field(int cutoff, double side, int tag, double amplitude = 1.0);

}  // namespace g2ldp
