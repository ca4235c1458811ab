#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "nmmo/evaluation.hpp"

namespace nmmo {

// Replay file layout (all integers little-endian):
//   magic "NMMORPL1"
//   records: [u32 payload length][u8 type][payload][u64 fnv1a64 of type + payload]
//   one Header record, one Tick record per tick, then one Trailer record.
// The file is append-only and flushed per record, so a crash leaves a valid
// prefix that read_replay reports as partial.

inline constexpr char kReplayMagic[8] = {'N', 'M', 'M', 'O', 'R', 'P', 'L', '1'};
inline constexpr std::uint16_t kReplayMajor = 1;
inline constexpr std::uint16_t kReplayMinor = 0;
inline constexpr const char* kEngineVersion = "nmmo-engine 1.0";

enum class ReplayRecord : std::uint8_t { Header = 1, Tick = 2, Trailer = 3 };

class ReplayError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ReplayHeader {
  std::uint16_t major = kReplayMajor;
  std::uint16_t minor = kReplayMinor;
  std::string engine_version = kEngineVersion;
  std::uint64_t config_digest = 0;
  std::uint64_t map_seed = 0;
  std::uint64_t episode_seed = 0;
  std::uint64_t initial_digest = 0;  // after reset
  EnvConfig config;
  EngineOptions engine;
  TileMap map;
  std::vector<std::string> policies;
  std::vector<int> slot_policy;
  bool teams = false;
};

struct ReplayTick {
  std::int32_t tick = 0;
  std::uint64_t digest = 0;  // after the tick
  std::vector<std::pair<EntityId, ActionSet>> actions;
  std::vector<TickEvent> events;
  std::array<std::uint64_t, kRngStreamCount> draws{};  // cumulative per stream
};

struct ReplayTrailer {
  std::uint64_t final_digest = 0;
  std::int32_t ticks = 0;
  nlohmann::json metrics;  // array of metrics_json rows
};

struct Replay {
  ReplayHeader header;
  std::vector<ReplayTick> ticks;
  std::optional<ReplayTrailer> trailer;
  bool complete = false;
  int last_complete_tick = -1;  // -1 when no tick record survived
  std::string problem;          // why the file is partial
};

ReplayHeader make_replay_header(const Environment& env, std::vector<std::string> policies,
                                std::vector<int> slot_policy, bool teams);
ReplayTick make_tick_record(const Environment& env, const std::map<EntityId, ActionSet>& actions,
                            const StepResult& result);

/// Streams records to a file, flushing after each.
class ReplayWriter {
 public:
  ReplayWriter(const std::filesystem::path& path, const ReplayHeader& header);
  void write_tick(const ReplayTick& tick);
  void finish(const ReplayTrailer& trailer);

 private:
  void write_record(ReplayRecord type, const std::vector<std::uint8_t>& payload);
  std::ofstream out_;
  std::filesystem::path path_;
};

/// Throws ReplayError on a missing file, bad magic or an unknown major
/// version. A truncated or corrupted tail yields complete = false.
Replay read_replay(const std::filesystem::path& path);

/// Runs the episode and records it.
EpisodeOutcome record_episode(const EpisodeSetup& setup, const std::filesystem::path& path);

struct PlayResult {
  std::vector<std::uint64_t> digests;  // after reset, then after every tick
  std::optional<int> divergent_tick;   // first tick whose digest differs; -1 for reset
  std::string divergence;
  std::vector<PolicyMetrics> metrics;
  std::vector<LifetimeLog> logs;
  OverlaySet overlays;
  bool trailer_matches = false;        // final digest and metrics equal the trailer
};

/// Re-simulates from recorded actions and checks every digest. `engine`
/// overrides the recorded engine options.
PlayResult play(const Replay& replay, std::optional<EngineOptions> engine = {});

}  // namespace nmmo
