#pragma once

#include <cstdint>
#include <random>

namespace rdsurv {

using Rng = std::mt19937_64;

//! splitmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

//! Deterministic child seed for stream `index` under `seed`, optionally
//! namespaced by `stream` so that independent consumers never collide.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index,
                                 std::uint64_t stream = 0) {
  return mix64(mix64(seed ^ mix64(stream)) + index);
}

inline Rng make_rng(std::uint64_t seed, std::uint64_t index, std::uint64_t stream = 0) {
  return Rng(derive_seed(seed, index, stream));
}

} // namespace rdsurv
