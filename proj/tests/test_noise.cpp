#include <algorithm>
#include <cmath>
#include <fstream>

#include "doctest.h"
#include "json.hpp"
#include "nmmo/hash.hpp"
#include "nmmo/noise.hpp"
#include "nmmo/rng.hpp"

using namespace nmmo;

namespace {

/// Straight transcription of the octave blend from its definition.
double blended_oracle(double x, double y, std::uint64_t seed, const WorldgenParams& p) {
  const double m = effective_octaves(x, y, seed, p);
  double num = 0.0;
  double den = 0.0;
  for (int k = 0; k < p.octaves_max; ++k) {
    const double w = std::min(1.0, std::max(0.0, m - k));
    const double amp = std::pow(p.persistence, k);
    const double freq = p.base_frequency * std::pow(p.lacunarity, k);
    num += w * amp * gradient_noise(x * freq, y * freq, hash_combine(seed, k));
    den += w * amp;
  }
  return num / den;
}

}  // namespace

TEST_CASE("gradient noise is zero on lattice points and bounded") {
  CounterRng r(3);
  for (int i = 0; i < 1000; ++i) {
    const auto x = static_cast<double>(static_cast<int>(r.below(1000)) - 500);
    const auto y = static_cast<double>(static_cast<int>(r.below(1000)) - 500);
    CHECK(gradient_noise(x, y, i) == 0.0);
  }
  for (int i = 0; i < 100000; ++i) {
    const double v = gradient_noise(r.uniform() * 200 - 100, r.uniform() * 200 - 100, 11);
    REQUIRE(std::abs(v) <= 1.0);
  }
}

TEST_CASE("single octave degenerates to base noise") {
  WorldgenParams p;
  p.octaves_min = p.octaves_max = 1;
  CounterRng r(4);
  for (int i = 0; i < 2000; ++i) {
    const double x = r.uniform() * 500;
    const double y = r.uniform() * 500;
    CHECK(noise(x, y, 42, p) ==
          doctest::Approx(gradient_noise(x * p.base_frequency, y * p.base_frequency, hash_combine(42, 0)))
              .epsilon(1e-12));
  }
}

TEST_CASE("octave blend matches its definition") {
  WorldgenParams p;
  CounterRng r(5);
  for (int i = 0; i < 5000; ++i) {
    const double x = r.uniform() * 2000;
    const double y = r.uniform() * 2000;
    const double o = effective_octaves(x, y, 9, p);
    REQUIRE(o >= p.octaves_min);
    REQUIRE(o <= p.octaves_max);
    CHECK(noise(x, y, 9, p) == doctest::Approx(blended_oracle(x, y, 9, p)).epsilon(1e-12));
  }
}

TEST_CASE("effective octave count varies across space") {
  WorldgenParams p;
  double lo = 1e9;
  double hi = -1e9;
  for (int r = 0; r < 1024; r += 8)
    for (int c = 0; c < 1024; c += 8) {
      const double o = effective_octaves(c, r, 1, p);
      lo = std::min(lo, o);
      hi = std::max(hi, o);
    }
  CHECK(hi - lo > 2.0);
}

TEST_CASE("noise determinism and seed sensitivity") {
  WorldgenParams p;
  CHECK(noise(12.5, 99.25, 1, p) == noise(12.5, 99.25, 1, p));
  int differ = 0;
  for (int i = 0; i < 100; ++i) differ += noise(i * 3.7 + 0.5, i * 1.3 + 0.5, 1, p) != noise(i * 3.7 + 0.5, i * 1.3 + 0.5, 2, p);
  CHECK(differ > 95);
}

TEST_CASE("noise Lipschitz regression against golden bound") {
  std::ifstream in(NMMO_GOLDEN_DIR "/noise_lipschitz.json");
  REQUIRE(in);
  const auto golden = nlohmann::json::parse(in);
  const double bound = golden.at("bound").get<double>();
  WorldgenParams p;
  CounterRng r(1);
  double worst = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double x = r.uniform() * 4096;
    const double y = r.uniform() * 4096;
    const double v = noise(x, y, 7, p);
    worst = std::max({worst, std::abs(noise(x + 1, y, 7, p) - v), std::abs(noise(x, y + 1, 7, p) - v)});
  }
  CHECK(worst <= bound);
  CHECK(worst > 0.0);
}
