#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace phishbench {

/// 64-bit FNV-1a. Non-cryptographic; used for content fingerprints and
/// cache keys, never for security decisions.
std::uint64_t fnv1a64(std::string_view data,
                      std::uint64_t basis = 0xCBF29CE484222325ULL);

/// 128-bit content fingerprint rendered as 32 lowercase hex digits.
/// Two independent FNV-1a passes with different offset bases.
std::string content_hash128(std::string_view data);

}  // namespace phishbench
