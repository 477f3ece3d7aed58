#pragma once

#include <cstdint>
#include <random>

namespace heatlab {

/// Uniform on [0, 1) from the top 53 bits of a 64-bit Mersenne twister.
/// Unlike std::uniform_real_distribution the mapping is fixed by the standard.
inline double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform_in(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * unit_uniform(rng); }

}  // namespace heatlab
