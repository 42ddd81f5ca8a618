#pragma once

#include <cmath>
#include <cstdint>

namespace socon {

/**
 * Small deterministic PRNG (splitmix64) with explicit transforms, so that
 * streams are bit-identical across platforms and standard-library versions.
 * Substreams derived from (seed, tag) make per-frame draws order-independent.
 */
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in (0, 1]; safe as a log() argument.
  double uniform01_open_low() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal via Box-Muller (pairs cached).
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform01_open_low();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * kRngPi * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * kRngPi * u2);
  }

  /// Exponential with mean 1.
  double exponential() { return -std::log(uniform01_open_low()); }

  /// Independent generator for (seed, tag); insensitive to draw order elsewhere.
  Rng substream(std::uint64_t tag) const {
    std::uint64_t z = state_ ^ (0xD1B54A32D192ED03ull * (tag + 1));
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return Rng(z ^ (z >> 31));
  }

 private:
  static constexpr double kRngPi = 3.14159265358979323846;
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace socon
