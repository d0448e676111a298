#include "phishbench/rng.hpp"

#include <algorithm>

#include "phishbench/errors.hpp"
#include "phishbench/hash.hpp"

namespace phishbench {

std::vector<std::size_t> sample_indices(std::size_t population, std::size_t k,
                                        Xoshiro256StarStar& rng) {
  if (k > population) {
    throw DataError("sample size " + std::to_string(k) +
                    " exceeds population " + std::to_string(population));
  }
  std::vector<std::size_t> pool(population);
  for (std::size_t i = 0; i < population; ++i) pool[i] = i;
  // Partial Fisher-Yates: after k swaps the prefix holds the sample.
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(population - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

std::uint64_t derive_seed(std::uint64_t base, std::string_view stage) {
  SplitMix64 mixer(base ^ fnv1a64(stage));
  return mixer.next();
}

}  // namespace phishbench
