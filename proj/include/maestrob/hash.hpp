#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace maestrob {

// FNV-1a, used for state digests and hash tables. Stable across platforms,
// which keeps trace digests and golden logs byte-identical.
inline constexpr uint64_t kFnvOffset = 1469598103934665603ULL;
inline constexpr uint64_t kFnvPrime = 1099511628211ULL;

inline uint64_t fnv1a(std::string_view bytes, uint64_t seed = kFnvOffset) {
  uint64_t h = seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

std::string hex64(uint64_t value);

}  // namespace maestrob
