#pragma once

#include <cstdint>
#include <random>

namespace threshq {

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed for chunk `chunk` of a run seeded with `seed`. Stable across platforms.
std::uint64_t chunk_seed(std::uint64_t seed, std::uint64_t chunk) noexcept;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double strictly inside (0, 1), 53 bits of resolution.
  double open_unit() noexcept {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  std::uint64_t next() noexcept { return engine_(); }

  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) noexcept {
    return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(engine_);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace threshq
