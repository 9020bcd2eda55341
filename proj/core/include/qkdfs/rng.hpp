#pragma once

// Keyed counter-based random streams for the pulse simulator. Every pulse
// draws from a stream keyed by (seed, stream tag, pulse index), so counts are
// bit-identical for any sharding of the pulse range and per-source streams
// stay stable when the source mix changes.

#include <cstdint>

namespace qkdfs {

/// splitmix64 finalizer; a well-mixed 64-bit hash step.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Stream key derived from up to three components.
constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t tag,
                                   std::uint64_t counter) {
  return mix64(mix64(mix64(seed) ^ tag) ^ counter);
}

/// splitmix64 sequence seeded by a stream key.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t key) : state_(key) {}

  constexpr std::uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  constexpr double next_unit() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

}  // namespace qkdfs
