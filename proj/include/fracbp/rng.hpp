#pragma once

#include <cstdint>

namespace fracbp {

/// SplitMix64: the 64-bit generator used everywhere randomness is needed.
///
/// Chosen because it is fully specified by a handful of integer operations,
/// so sequences replay bit-exactly across platforms, compilers and languages.
/// The standard library distributions are deliberately avoided: their
/// algorithms are implementation-defined and would break replayability.
///
/// Substreams: `substream(seed, key)` starts an independent generator at
/// state `finalize(seed + GOLDEN * (key + 1))`. Batches, edge draws and node
/// draws each get their own key, so parallel or reordered evaluation cannot
/// change the numbers drawn.
class SplitMix64 {
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    state_ += kGolden;
    return finalize(state_);
  }

  /// Uniform double in [0, 1): top 53 bits scaled by 2^-53.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [lo, hi).
  double next_double(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  static SplitMix64 substream(std::uint64_t seed, std::uint64_t key) {
    return SplitMix64(finalize(seed + kGolden * (key + 1)));
  }

private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

  static std::uint64_t finalize(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

} // namespace fracbp
