#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>

namespace g2ldp {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Thrown when an integrator state leaves the configured stability region
/// (runaway W-norm or non-finite coefficients).
class BlowupError : public std::runtime_error {
 public:
  BlowupError(double t, double w_norm, const std::string& msg)
      : std::runtime_error(msg), time_(t), w_norm_(w_norm) {}
  double time() const { return time_; }
  double w_norm() const { return w_norm_; }

 private:
  double time_;
  double w_norm_;
};

/// Thrown on malformed experiment configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --- Seed derivation ------------------------------------------------------
//
// All randomness flows from one master seed.  Independent streams (per path,
// per mark, per purpose) are derived by hashing (master, a, b) through
// splitmix64, so the set of draws a task makes never depends on scheduling.

uint64_t splitmix64(uint64_t x);
uint64_t derive_seed(uint64_t master, uint64_t a, uint64_t b = 0);

/// Small deterministic RNG wrapper: uniform/normal/exponential draws with a
/// portable Box-Muller normal (no reliance on libstdc++ distribution guts).
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  /// Uniform on (0,1), endpoints excluded.
  double uniform() {
    return (static_cast<double>(gen_() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double c = std::cos(kTwoPi * u2);
    double s = std::sin(kTwoPi * u2);
    spare_ = r * s;
    have_spare_ = true;
    return r * c;
  }

  double exponential(double rate) { return -std::log(uniform()) / rate; }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// --- Parallel map ---------------------------------------------------------

/// Worker count: min(G2LDP_THREADS if set, hardware_concurrency), at least 1.
int thread_budget();

/// Runs body(i) for i in [0,n).  Each index is processed exactly once; the
/// caller owns per-index output slots, so results are scheduling-independent.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// FNV-1a over a byte string; used for config hashes and replay checks.
uint64_t fnv1a(const void* data, std::size_t n, uint64_t h = 1469598103934665603ull);
uint64_t fnv1a(const std::string& s, uint64_t h = 1469598103934665603ull);

}  // namespace g2ldp
