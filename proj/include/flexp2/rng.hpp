#pragma once

#include <cstdint>
#include <cmath>

namespace flexp2::rng {

// Deterministic random streams used everywhere randomness is needed.
//
// The generator is SplitMix64 (Steele et al.), a counter-based mixer with a
// 64-bit state and full-period output. A stream is a pure function of its
// seed, and independent substreams are obtained with derive(seed, tag), so
// the mapping (seed, tag) -> values is fixed for all time and documented by
// this header:
//
//   state_{i+1} = state_i + 0x9E3779B97F4A7C15
//   out_i       = mix(state_{i+1})            (mix below)
//   derive(s,t) = mix(s + (t + 1) * 0x9E3779B97F4A7C15)
//
// Uniforms take the top 53 bits of out_i; normals use Box-Muller on two
// consecutive uniforms (pairs are generated together, the second value of a
// pair is returned by the next call).

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed of an independent substream identified by (seed, tag).
inline std::uint64_t derive(std::uint64_t seed, std::uint64_t tag) {
  return mix64(seed + (tag + 1) * 0x9E3779B97F4A7C15ULL);
}

class Stream {
 public:
  explicit Stream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix64(state_);
  }

  /// Uniform on [0, 1) with 53-bit resolution.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller.
  double next_normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - next_unit();  // (0, 1], keeps log finite
    const double u2 = next_unit();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace flexp2::rng
