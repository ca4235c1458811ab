#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

#include "nmmo/hash.hpp"

namespace nmmo {

/// Labels for world-level stochastic draws.
enum class RngStream : std::uint8_t { Spawn, Combat, Npc, Resource };
inline constexpr std::size_t kRngStreamCount = 4;

/// Counter-based generator: output n is splitmix64(key, n). The full state
/// is (key, counter), so it can be saved, hashed and restored exactly.
class CounterRng {
 public:
  CounterRng() = default;
  explicit CounterRng(std::uint64_t key) : key_(splitmix64(key)) {}

  std::uint64_t next_u64() { return splitmix64(key_ ^ splitmix64(counter_++)); }

  /// Uniform in [0, 1) with 53 bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) {
    // Lemire's multiply-shift with rejection; unbiased.
    std::uint64_t x = next_u64();
    __uint128_t m = static_cast<__uint128_t>(x) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t t = (0 - n) % n;
      while (low < t) {
        x = next_u64();
        m = static_cast<__uint128_t>(x) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  bool bernoulli(double p) { return uniform() < p; }

  [[nodiscard]] std::uint64_t key() const { return key_; }
  [[nodiscard]] std::uint64_t counter() const { return counter_; }
  bool operator==(const CounterRng&) const = default;

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

/// The world's single generator. Every draw is attributed to a stream label
/// so divergent runs can be localized by subsystem.
class WorldRng {
 public:
  WorldRng() = default;
  explicit WorldRng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t below(RngStream s, std::uint64_t n) {
    count(s);
    return gen_.below(n);
  }
  double uniform(RngStream s) {
    count(s);
    return gen_.uniform();
  }
  bool bernoulli(RngStream s, double p) {
    count(s);
    return gen_.bernoulli(p);
  }

  [[nodiscard]] const CounterRng& generator() const { return gen_; }
  [[nodiscard]] const std::array<std::uint64_t, kRngStreamCount>& draws() const { return draws_; }
  bool operator==(const WorldRng&) const = default;

 private:
  void count(RngStream s) { ++draws_[static_cast<std::size_t>(s)]; }

  CounterRng gen_;
  std::array<std::uint64_t, kRngStreamCount> draws_{};
};

}  // namespace nmmo
