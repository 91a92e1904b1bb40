#pragma once

#include <cstdint>
#include <numbers>

namespace zpflab {

// SplitMix64 finalizer. Used as a counter-based generator: the value for
// (seed, counter) does not depend on how many other values were drawn.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t counter_draw(std::uint64_t seed, std::uint64_t counter) {
  return mix64(seed ^ mix64(counter * 0xd1b54a32d192ed03ULL + 1));
}

// Uniform on [0, 1) with 53 random bits.
constexpr double counter_uniform(std::uint64_t seed, std::uint64_t counter) {
  return static_cast<double>(counter_draw(seed, counter) >> 11) * 0x1.0p-53;
}

// Independent child seed, e.g. one per trajectory of an ensemble.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(mix64(master) + 0x632be59bd9b4e019ULL * (index + 1));
}

inline double counter_phase(std::uint64_t seed, std::uint64_t counter) {
  return 2.0 * std::numbers::pi * counter_uniform(seed, counter);
}

}  // namespace zpflab
