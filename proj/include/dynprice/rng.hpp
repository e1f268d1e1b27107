#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace dynprice {

using Rng = std::mt19937_64;

// splitmix64 finaliser
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives an independent stream seed from a base seed and a tuple of
/// stream coordinates, so that e.g. (seed, kind, tau, t) always maps to the
/// same generator state regardless of call order.
inline std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::int64_t> coords) noexcept {
  std::uint64_t h = mix64(base);
  for (auto c : coords) {
    h = mix64(h ^ static_cast<std::uint64_t>(c));
  }
  return h;
}

inline Rng make_rng(std::uint64_t base, std::initializer_list<std::int64_t> coords) {
  return Rng(derive_seed(base, coords));
}

} // namespace dynprice
