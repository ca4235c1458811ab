#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"
#include "nmmo/evaluation.hpp"

namespace nmmo {

struct BenchOptions {
  int invariant_interval = 0;  // check invariants every n ticks; 0 never
  EngineOptions engine;
};

struct BenchReport {
  std::string policy;
  int map_size = 0;
  int population_cap = 0;
  int ticks = 0;
  int episodes = 0;
  double seconds = 0;
  double ticks_per_sec = 0;
  double observations_per_sec = 0;
  double mean_live_agents = 0;
  ThroughputSample sample;
  double reps = 0;
  std::int64_t peak_rss_bytes = 0;  // -1 when unavailable
  std::int64_t rss_bytes = 0;
  int invariant_checks = 0;
  std::string invariant_error;  // empty when every check passed

  [[nodiscard]] nlohmann::json to_json() const;
};

/// Steps `ticks` ticks with every slot on `policy`, starting a new episode
/// (next seed, freshly generated map) whenever one ends. Throws
/// std::invalid_argument for ticks < 1.
BenchReport bench(const EnvConfig& config, const PolicyEntry& policy, int ticks, const BenchOptions& options = {});

/// Resident set size from /proc/self/status; -1 when unavailable.
std::int64_t resident_bytes(bool peak);

}  // namespace nmmo
