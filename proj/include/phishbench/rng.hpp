#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace phishbench {

/// splitmix64 stream. Used to expand a single 64-bit seed into generator
/// state and to derive independent sub-seeds for pipeline stages.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// xoshiro256** generator. All randomized pipeline stages draw from this
/// so results are reproducible across platforms from a single seed.
class Xoshiro256StarStar {
 public:
  explicit Xoshiro256StarStar(std::uint64_t seed) {
    SplitMix64 sm(seed);
    for (auto& word : state_) word = sm.next();
  }

  std::uint64_t next() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Unbiased draw in [0, n). Rejection sampling on the modulus boundary so
  /// every value is exactly equally likely. n must be nonzero.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n + 1) % n;
    std::uint64_t draw = next();
    while (draw > limit) draw = next();
    return draw % n;
  }

  /// Uniform double in [0, 1) from the top 53 bits.
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4];
};

/// In-place Fisher-Yates shuffle.
template <typename T>
void shuffle(std::vector<T>& values, Xoshiro256StarStar& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.below(i));
    std::swap(values[i - 1], values[j]);
  }
}

/// k distinct indices drawn uniformly from [0, population), returned in
/// ascending order so downstream consumers preserve source ordering.
std::vector<std::size_t> sample_indices(std::size_t population, std::size_t k,
                                        Xoshiro256StarStar& rng);

/// Deterministic sub-seed for a named pipeline stage. Distinct stage names
/// give statistically independent streams from the same base seed.
std::uint64_t derive_seed(std::uint64_t base, std::string_view stage);

}  // namespace phishbench
