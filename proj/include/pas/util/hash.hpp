#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace pas::util {

std::string sha256_hex(std::string_view bytes);

// 64-bit FNV-1a; used for deterministic seed derivation, not integrity.
std::uint64_t fnv1a64(std::string_view bytes);

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ splitmix64(b));
}

template <typename... Rest>
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, Rest... rest) {
  return mix_seed(mix_seed(a, b), static_cast<std::uint64_t>(rest)...);
}

}  // namespace pas::util
