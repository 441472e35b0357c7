#pragma once

#include <cmath>
#include <cstdint>

#include "jfab/constants.hpp"

namespace jfab {

// Counter-based pseudo-random stream. Output i of stream (seed, stream_id)
// is a pure function of (seed, stream_id, i), so independent substreams can
// be handed to workers in any order and the merged result does not depend
// on the thread count. Not cryptographic.
class StreamRng {
 public:
  explicit StreamRng(std::uint64_t seed, std::uint64_t stream_id = 0)
      : key_(derive_key(seed, stream_id)) {}

  static std::uint64_t mix64(std::uint64_t z) {
    // splitmix64 finalizer
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream_id) {
    return mix64(mix64(seed) ^ (0x9e3779b97f4a7c15ULL * (stream_id + 1)));
  }

  std::uint64_t next_u64() { return mix64(key_ ^ counter_++ * 0xd1342543de82ef95ULL); }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in (0, 1]; safe as a log() argument.
  double uniform_pos() { return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53; }

  // Standard normal via Box-Muller; consumes exactly two uniforms per call.
  double normal() {
    const double u1 = uniform_pos();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * constants::kPi * u2);
  }

  double normal(double mean, double sigma) { return mean + sigma * normal(); }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace jfab
