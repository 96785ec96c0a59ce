#pragma once

#include <cstdint>
#include <string_view>

namespace graphost {

/// Counter-based random stream.
///
/// Every draw is `splitmix64(key + counter * golden_gamma)`, so the value at
/// a given counter is a pure function of (key, counter). Streams are derived
/// from a seed and a tag, and indexed sub-streams (one per node, one per
/// trial) are obtained with `substream`, which makes a node's draws
/// independent of how many other nodes exist or in which order they are
/// visited.
class CounterRng {
 public:
  CounterRng() = default;
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  /// Stream for `(seed, tag)`. The tag is hashed (FNV-1a) into the key.
  static CounterRng from_seed(std::uint64_t seed, std::string_view tag);

  /// Independent child stream identified by `index`.
  CounterRng substream(std::uint64_t index) const;

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

  /// Raw 64-bit value at an explicit counter position; does not advance.
  std::uint64_t bits_at(std::uint64_t position) const noexcept;
  /// Uniform in [0,1) at an explicit position; does not advance.
  double uniform_at(std::uint64_t position) const noexcept;

  std::uint64_t next_bits() noexcept { return bits_at(counter_++); }
  /// Uniform double in [0,1) with 53 random bits.
  double uniform() noexcept { return uniform_at(counter_++); }
  /// Uniform integer in [0, bound). `bound` must be > 0.
  std::uint64_t uniform_index(std::uint64_t bound) noexcept;
  /// Standard normal draw (Marsaglia polar method; the spare deviate is kept).
  double normal() noexcept;

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// SplitMix64 finaliser.
std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace graphost
