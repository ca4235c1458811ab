#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "nmmo/bench.hpp"
#include "nmmo/replay.hpp"
#include "nmmo/worldgen.hpp"
#include "support.hpp"

using namespace nmmo;
using namespace nmmo::test;

namespace {

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("nmmo_replay_" + name);
}

EnvConfig replay_config(int horizon) {
  EnvConfig cfg = canonical("SmallMaps");
  cfg.map_size = 48;
  cfg.population_cap = 16;
  cfg.npc_params.npc_cap = 8;
  cfg.worldgen_params.border_width = 4;
  cfg.episode_horizon = horizon;
  cfg.seed = 21;
  return cfg;
}

struct Recorded {
  TileMap map;
  EpisodeOutcome outcome;
};

Recorded record(const EnvConfig& cfg, const std::string& preset, const std::filesystem::path& path) {
  Recorded r;
  r.map = generate_map(cfg);
  ScriptedPolicy policy(policy_preset(preset));
  EpisodeSetup setup{cfg, &r.map, {&policy}, std::vector<int>(static_cast<std::size_t>(cfg.population_cap), 0)};
  r.outcome = record_episode(setup, path);
  return r;
}

void truncate_to(const std::filesystem::path& path, std::uintmax_t size) { std::filesystem::resize_file(path, size); }

}  // namespace

TEST_CASE("ten-tick meander replay has ten tick records and a matching trailer") {
  const auto path = temp_path("ten.rpl");
  const Recorded rec = record(replay_config(10), "meander", path);
  const Replay replay = read_replay(path);
  CHECK(replay.complete);
  CHECK(replay.ticks.size() == 10);
  CHECK(replay.last_complete_tick == 9);
  REQUIRE(replay.trailer);
  CHECK(replay.trailer->final_digest == rec.outcome.digests.back());
  CHECK(replay.trailer->ticks == 10);
  CHECK(replay.header.engine_version == kEngineVersion);
  CHECK(replay.header.config_digest == config_digest(replay.header.config));
  CHECK(replay.header.map_seed == rec.map.seed());
  CHECK(replay.header.map == rec.map);
  std::filesystem::remove(path);
}

TEST_CASE("record then play reproduces digests, metrics and overlays") {
  for (const char* preset : {"meander", "combat"}) {
    const auto path = temp_path("roundtrip.rpl");
    const Recorded rec = record(replay_config(120), preset, path);
    const Replay replay = read_replay(path);
    const PlayResult played = play(replay);
    CHECK_FALSE(played.divergent_tick);
    CHECK(played.digests == rec.outcome.digests);
    CHECK(played.metrics == rec.outcome.metrics);
    CHECK(played.trailer_matches);
    CHECK(played.overlays.render() == rec.outcome.overlays.render());
    for (std::size_t i = 0; i < replay.ticks.size(); ++i) CHECK(replay.ticks[i].tick == static_cast<int>(i));
    std::filesystem::remove(path);
  }
}

TEST_CASE("truncated replay reports the last complete tick") {
  const auto path = temp_path("trunc.rpl");
  record(replay_config(30), "meander", path);
  const Replay full = read_replay(path);
  REQUIRE(full.complete);
  const auto size = std::filesystem::file_size(path);

  truncate_to(path, size - 3);  // inside the trailer
  Replay cut = read_replay(path);
  CHECK_FALSE(cut.complete);
  CHECK_FALSE(cut.trailer);
  CHECK(cut.last_complete_tick == 29);

  truncate_to(path, size / 2);
  cut = read_replay(path);
  CHECK_FALSE(cut.complete);
  CHECK(cut.last_complete_tick >= 0);
  CHECK(cut.last_complete_tick < 29);
  CHECK(cut.ticks.size() == static_cast<std::size_t>(cut.last_complete_tick + 1));
  // The surviving prefix still replays cleanly.
  const PlayResult partial = play(cut);
  CHECK_FALSE(partial.divergent_tick);
  CHECK_FALSE(partial.trailer_matches);
  std::filesystem::remove(path);
}

TEST_CASE("corrupted record is detected by its checksum") {
  const auto path = temp_path("corrupt.rpl");
  record(replay_config(20), "meander", path);
  const auto size = std::filesystem::file_size(path);
  {
    std::fstream f(path, std::ios::binary | std::ios::in | std::ios::out);
    f.seekp(static_cast<std::streamoff>(size - 40));
    const char junk = 0x5a;
    f.write(&junk, 1);
  }
  const Replay r = read_replay(path);
  CHECK_FALSE(r.complete);
  CHECK(r.problem.find("checksum") != std::string::npos);
  std::filesystem::remove(path);
}

TEST_CASE("unknown format versions and foreign files are refused") {
  const auto path = temp_path("version.rpl");
  record(replay_config(5), "meander", path);
  {
    // Major version is the first payload field of the header record.
    std::fstream f(path, std::ios::binary | std::ios::in | std::ios::out);
    f.seekp(8 + 5);
    const char v[2] = {9, 0};
    f.write(v, 2);
  }
  CHECK_THROWS_AS(read_replay(path), ReplayError);
  std::ofstream(path) << "not a replay";
  CHECK_THROWS_AS(read_replay(path), ReplayError);
  CHECK_THROWS_AS(read_replay(temp_path("missing.rpl")), ReplayError);
  std::filesystem::remove(path);
}

TEST_CASE("changed tie-break diverges at the first contested move") {
  // Two spawn tiles on the top row; both agents step down, then both step
  // into the tile between them.
  TileMap map(9, 0, 1);
  for (int r = 0; r < 9; ++r)
    for (int c = 0; c < 9; ++c) map.at({r, c}).material = map.in_border({r, c}) ? Material::Lava : Material::Stone;
  for (Position p : {Position{1, 2}, Position{1, 4}, Position{2, 2}, Position{2, 3}, Position{2, 4}})
    map.at(p).material = Material::Grass;
  map.spawn_ring() = compute_spawn_ring(map);
  REQUIRE(map.spawn_ring().size() == 2);

  EnvConfig cfg = small_config(9, only(false, false, false, false));
  cfg.population_cap = 2;
  cfg.episode_horizon = 4;
  Environment env(cfg, {map});
  env.reset(1);
  const auto path = temp_path("contest.rpl");
  {
    ReplayWriter writer(path, make_replay_header(env, {"scripted"}, {0, 0}, false));
    for (int t = 0; t < 4; ++t) {
      std::map<EntityId, ActionSet> actions;
      for (const auto& a : env.world().agents) {
        if (t == 0) actions[a.id] = move(Direction::South);
        if (t == 1) actions[a.id] = move(a.position.col < 3 ? Direction::East : Direction::West);
      }
      const StepResult r = env.step(actions);
      writer.write_tick(make_tick_record(env, actions, r));
    }
    writer.finish({digest(env.world()), env.world().tick, nlohmann::json::array()});
  }
  const Replay replay = read_replay(path);
  CHECK_FALSE(play(replay).divergent_tick);

  EngineOptions flipped = replay.header.engine;
  flipped.tie_break = TieBreak::HighestIdWins;
  const PlayResult drift = play(replay, flipped);
  REQUIRE(drift.divergent_tick);
  CHECK(*drift.divergent_tick == 1);
  CHECK(drift.divergence.find("digest") != std::string::npos);
  std::filesystem::remove(path);
}

TEST_CASE("bench reports positive throughput") {
  CHECK_THROWS_AS(bench(replay_config(50), scripted_entry("meander"), 0), std::invalid_argument);
  const BenchReport r = bench(replay_config(50), scripted_entry("meander"), 120, {10, {}});
  CHECK(r.ticks == 120);
  CHECK(r.episodes >= 2);
  CHECK(r.seconds > 0);
  CHECK(r.ticks_per_sec > 0);
  CHECK(r.observations_per_sec > 0);
  CHECK(r.reps > 0);
  CHECK(r.sample.observations > 0);
  CHECK(r.invariant_checks == 12);
  CHECK(r.invariant_error.empty());
  CHECK(r.peak_rss_bytes > 0);
  CHECK(r.to_json().at("reps").get<double>() == r.reps);
}
