#pragma once

#include <cstdint>

#include "nmmo/config.hpp"

namespace nmmo {

/// Single-octave gradient noise on the integer lattice, in [-1, 1].
/// Gradients are hashed from (lattice point, seed).
double gradient_noise(double x, double y, std::uint64_t seed);

/// Octave modulation field in [0, 1] used to pick the local octave count.
double octave_modulation(double x, double y, std::uint64_t seed, const WorldgenParams& params);

/// Effective (fractional) octave count at (x, y):
/// octaves_min + m(x, y) * (octaves_max - octaves_min).
double effective_octaves(double x, double y, std::uint64_t seed, const WorldgenParams& params);

/// Multi-octave noise whose octave count varies smoothly across space.
/// Octave k has weight clamp(o(x, y) - k, 0, 1), so the top octave fades in
/// continuously. Normalized by the weighted amplitude sum; result in [-1, 1].
/// Coordinates are in tiles.
double noise(double x, double y, std::uint64_t seed, const WorldgenParams& params);

}  // namespace nmmo
