#include "nmmo/noise.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "nmmo/hash.hpp"

namespace nmmo {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kSqrt2 = 1.41421356237309504880;

// Eight unit gradients; for unit gradients the 2D lattice noise is bounded by
// sqrt(2)/2, hence the sqrt(2) rescale below.
constexpr std::array<std::array<double, 2>, 8> kGradients{{
    {1.0, 0.0},
    {-1.0, 0.0},
    {0.0, 1.0},
    {0.0, -1.0},
    {kInvSqrt2, kInvSqrt2},
    {-kInvSqrt2, kInvSqrt2},
    {kInvSqrt2, -kInvSqrt2},
    {-kInvSqrt2, -kInvSqrt2},
}};

constexpr std::uint64_t kModulationSalt = 0x6D6F64756C617465ULL;

inline double fade(double t) { return t * t * t * (t * (t * 6.0 - 15.0) + 10.0); }

inline double corner(std::int64_t ix, std::int64_t iy, double dx, double dy, std::uint64_t seed) {
  std::uint64_t h = hash_combine(seed, static_cast<std::uint64_t>(ix));
  h = hash_combine(h, static_cast<std::uint64_t>(iy));
  const auto& g = kGradients[h & 7U];
  return g[0] * dx + g[1] * dy;
}

}  // namespace

double gradient_noise(double x, double y, std::uint64_t seed) {
  const double fx = std::floor(x);
  const double fy = std::floor(y);
  const auto ix = static_cast<std::int64_t>(fx);
  const auto iy = static_cast<std::int64_t>(fy);
  const double dx = x - fx;
  const double dy = y - fy;

  const double n00 = corner(ix, iy, dx, dy, seed);
  const double n10 = corner(ix + 1, iy, dx - 1.0, dy, seed);
  const double n01 = corner(ix, iy + 1, dx, dy - 1.0, seed);
  const double n11 = corner(ix + 1, iy + 1, dx - 1.0, dy - 1.0, seed);

  const double u = fade(dx);
  const double v = fade(dy);
  const double nx0 = n00 + u * (n10 - n00);
  const double nx1 = n01 + u * (n11 - n01);
  return std::clamp(kSqrt2 * (nx0 + v * (nx1 - nx0)), -1.0, 1.0);
}

double octave_modulation(double x, double y, std::uint64_t seed, const WorldgenParams& params) {
  const double f = params.modulation_frequency;
  const double m = 0.5 * (1.0 + gradient_noise(x * f, y * f, hash_combine(seed, kModulationSalt)));
  return std::clamp(m, 0.0, 1.0);
}

double effective_octaves(double x, double y, std::uint64_t seed, const WorldgenParams& params) {
  const int span = params.octaves_max - params.octaves_min;
  if (span == 0) return params.octaves_min;
  return params.octaves_min + octave_modulation(x, y, seed, params) * span;
}

double noise(double x, double y, std::uint64_t seed, const WorldgenParams& params) {
  const double octaves = effective_octaves(x, y, seed, params);
  double freq = params.base_frequency;
  double amp = 1.0;
  double sum = 0.0;
  double norm = 0.0;
  for (int k = 0; k < params.octaves_max; ++k) {
    const double w = std::clamp(octaves - k, 0.0, 1.0);
    if (w <= 0.0) break;
    const std::uint64_t octave_seed = hash_combine(seed, static_cast<std::uint64_t>(k));
    sum += w * amp * gradient_noise(x * freq, y * freq, octave_seed);
    norm += w * amp;
    freq *= params.lacunarity;
    amp *= params.persistence;
  }
  return std::clamp(sum / norm, -1.0, 1.0);
}

}  // namespace nmmo
