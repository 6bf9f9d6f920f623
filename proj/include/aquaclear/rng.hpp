#pragma once

#include <cstdint>
#include <span>

namespace aqua {

// Counter-based splitmix64 generator. Each (seed, stream) pair yields an
// independent deterministic sequence, so simulated paths can be assigned one
// stream apiece and produce identical draws regardless of thread count.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : state_(mix(mix(seed + kGolden) ^ mix(stream + kStreamSalt))) {}

  std::uint64_t next_u64() {
    state_ += kGolden;
    return mix(state_);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return (next_u64() >> 11) * 0x1.0p-53; }

  // Index i with probability weights[i] / sum(weights). Weights need not be
  // normalized; the last positive-weight index absorbs rounding.
  int categorical(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = uniform01() * total;
    double cum = 0.0;
    int last = 0;
    for (int i = 0; i < static_cast<int>(weights.size()); ++i) {
      if (weights[i] <= 0.0) continue;
      cum += weights[i];
      last = i;
      if (u < cum) return i;
    }
    return last;
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
  static constexpr std::uint64_t kStreamSalt = 0xD2B74407B1CE6E93ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace aqua
