#pragma once

#include <cstdint>
#include <random>

namespace edgerecon {

/// Engine used everywhere. Never seeded from the clock or random_device.
using Rng = std::mt19937_64;

/// Independent sub-streams of one experiment seed, so that e.g. swapping the
/// camera policy never perturbs the draws that build the disruption traces.
enum class Stream : std::uint32_t {
  kCameraTrace = 1,
  kServerTrace = 2,
  kQualityNoise = 3,
  kCameraPolicy = 4,
  kServerPolicy = 5,
};

inline Rng make_rng(std::uint64_t seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return Rng(seq);
}

/// Uniform index in [0, n). n must be > 0.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

}  // namespace edgerecon
