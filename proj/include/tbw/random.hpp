#pragma once

#include <cstdint>
#include <random>

namespace tbw {

// splitmix64 step: advances `state` and returns the mixed output.
inline std::uint64_t splitmix64_next(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t value) noexcept { return splitmix64_next(value); }

// Seed for sub-stream `index` of `master`; distinct indices give unrelated streams.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
  return mix64(mix64(master) ^ (index * 0xd1b54a32d192ed03ULL + 1));
}

using Rng = std::mt19937_64;

// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
inline double unit_uniform(Rng& rng) noexcept {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace tbw
