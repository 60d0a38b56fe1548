#pragma once

#include <cstdint>
#include <random>

namespace vwpinn {

// Portable uniform in [0,1) built on the standard mt19937_64 stream; the
// standard fixes that stream, so seeded draws match across platforms.
inline double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_in(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * unit_uniform(rng);
}

}  // namespace vwpinn
