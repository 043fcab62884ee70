#pragma once

#include <cstdint>

namespace cmap {

// Counter-based pseudo-random streams.
//
// A stream is identified by a 64-bit key. Draw i of the stream is
//   mix64(key + (i + 1) * 0x9E3779B97F4A7C15)
// where mix64 is the SplitMix64 output function. This is exactly the
// SplitMix64 sequence seeded with `key`, but any draw can be computed
// directly from (key, i), so noise never has to be stored.
//
// Gaussian draws use Box-Muller on consecutive uniform pairs: for pair k,
// u1 = draw(2k) mapped to (0, 1], u2 = draw(2k+1) mapped to [0, 1), and
//   normal(2k)   = sqrt(-2 ln u1) cos(2 pi u2)
//   normal(2k+1) = sqrt(-2 ln u1) sin(2 pi u2).

std::uint64_t mix64(std::uint64_t z) noexcept;

/// Key of a sub-stream, e.g. derive_key(seed, iteration, purpose).
std::uint64_t derive_key(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) noexcept;

std::uint64_t stream_u64(std::uint64_t key, std::uint64_t index) noexcept;

class CounterStream {
 public:
  explicit CounterStream(std::uint64_t key) noexcept : key_(key) {}

  std::uint64_t next_u64() noexcept { return stream_u64(key_, counter_++); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform on (0, 1].
  double uniform_pos() noexcept;
  /// Standard normal. Consumes uniforms in pairs and caches the sine branch.
  double normal() noexcept;

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace cmap
