#include "phishbench/hash.hpp"

#include <cstdio>

namespace phishbench {

std::uint64_t fnv1a64(std::string_view data, std::uint64_t basis) {
  std::uint64_t hash = basis;
  for (unsigned char byte : data) {
    hash ^= byte;
    hash *= 0x100000001B3ULL;
  }
  return hash;
}

std::string content_hash128(std::string_view data) {
  // Second pass uses a different offset basis so the two halves are
  // independent enough for dedup and cache keys.
  const std::uint64_t hi = fnv1a64(data);
  const std::uint64_t lo = fnv1a64(data, 0x6C62272E07BB0142ULL);
  char buffer[33];
  std::snprintf(buffer, sizeof(buffer), "%016llx%016llx",
                static_cast<unsigned long long>(hi),
                static_cast<unsigned long long>(lo));
  return std::string(buffer, 32);
}

}  // namespace phishbench
