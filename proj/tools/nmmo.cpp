// nmmo: generate maps, run and record episodes, evaluate, run tournaments,
// play back replays and benchmark the engine.
//
// Exit codes: 0 success, 1 usage or input error, 2 invariant or digest failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "nmmo/bench.hpp"
#include "nmmo/evaluation.hpp"
#include "nmmo/replay.hpp"
#include "nmmo/worldgen.hpp"

namespace fs = std::filesystem;
using namespace nmmo;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitFailure = 2;

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

EnvConfig resolve_config(const std::string& spec) {
  if (spec == "SmallMaps" || spec == "LargeMaps") return canonical(spec);
  return load_config_file(spec);
}

std::vector<std::string> split(const std::string& list) {
  std::vector<std::string> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::string hex(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void write_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << '\n';
}

void export_overlays(const OverlaySet& overlays, const std::string& dir) {
  fs::create_directories(dir);
  for (const Overlay& o : overlays.render()) {
    write_overlay_csv(o, fs::path(dir) / (o.name + ".csv"));
    write_overlay_pgm(o, fs::path(dir) / (o.name + ".pgm"));
  }
}

const std::vector<std::string>& presets() { return policy_preset_names(); }

struct Common {
  std::string config = "SmallMaps";
  std::optional<std::uint64_t> seed;
  std::optional<int> horizon;

  void add(CLI::App* app) {
    app->add_option("--config", config, "SmallMaps, LargeMaps or a JSON config file")->capture_default_str();
    app->add_option("--seed", seed, "Base seed (overrides the config)");
    app->add_option("--horizon", horizon, "Episode horizon in ticks (overrides the config)")->check(CLI::PositiveNumber);
  }
  [[nodiscard]] EnvConfig resolve() const {
    EnvConfig cfg = resolve_config(config);
    if (seed) cfg.seed = *seed;
    if (horizon) cfg.episode_horizon = *horizon;
    validate(cfg);
    return cfg;
  }
};

// ---- generate --------------------------------------------------------------

struct GenerateCmd {
  Common common;
  int count = 1;
  std::string out = "maps";

  int run() const {
    const EnvConfig cfg = common.resolve();
    fs::create_directories(out);
    for (const TileMap& m : generate_pool(cfg, count)) {
      const std::string stem = "map_" + std::to_string(m.seed());
      write_map(m, fs::path(out) / (stem + ".map"));
      write_map_pgm(m, fs::path(out) / (stem + ".pgm"));
      std::array<int, 6> counts{};
      for (int r = 0; r < m.size(); ++r)
        for (int c = 0; c < m.size(); ++c) ++counts[static_cast<std::size_t>(m.at({r, c}).material)];
      std::printf("%s size %d spawn_ring %zu grass %d forest %d scrub %d stone %d water %d lava %d\n", stem.c_str(),
                  m.size(), m.spawn_ring().size(), counts[0], counts[1], counts[2], counts[3], counts[4], counts[5]);
    }
    return 0;
  }
};

// ---- run -------------------------------------------------------------------

struct RunCmd {
  Common common;
  std::string policy = "forage";
  std::string record;
  std::string logs;
  std::string overlays;
  bool check = false;

  int run() const {
    const EnvConfig cfg = common.resolve();
    const TileMap map = generate_map(cfg);
    ScriptedPolicy p(policy_preset(policy));
    EngineOptions engine;
    engine.check_invariants = check;
    EpisodeSetup setup{cfg, &map, {&p}, std::vector<int>(static_cast<std::size_t>(cfg.population_cap), 0),
                       false, engine, {}, {}};
    EpisodeOutcome o;
    try {
      o = record.empty() ? run_episode(setup) : record_episode(setup, record);
    } catch (const InvariantViolation& e) {
      throw Failure(e.what());
    }
    std::printf("seed %llu ticks %d final_digest %s\n", static_cast<unsigned long long>(o.seed), o.ticks,
                hex(o.digests.back()).c_str());
    std::fputs(render_metrics_table(o.metrics).c_str(), stdout);
    if (!logs.empty()) {
      std::ofstream out(logs);
      if (!out) throw std::runtime_error("cannot write " + logs);
      write_lifetime_logs(o.logs, out);
    }
    if (!overlays.empty()) export_overlays(o.overlays, overlays);
    if (!record.empty()) std::printf("replay written to %s\n", record.c_str());
    return 0;
  }
};

// ---- eval ------------------------------------------------------------------

struct EvalCmd {
  Common common;
  std::vector<std::string> policies{"forage"};
  int episodes = 30;
  int workers = 1;
  std::string json_out;

  int run() const {
    const EnvConfig cfg = common.resolve();
    std::vector<PolicyMetrics> rows;
    json report = json::array();
    for (const auto& name : policies) {
      const SelfContainedResult r = run_self_contained(cfg, scripted_entry(name), episodes, {workers, {}});
      rows.push_back(r.metrics);
      json j = metrics_json(r.metrics);
      j["episodes"] = episodes;
      std::vector<std::string> digests;
      for (auto d : r.final_digests) digests.push_back(hex(d));
      j["final_digests"] = digests;
      report.push_back(j);
    }
    std::fputs(render_metrics_table(rows).c_str(), stdout);
    if (!json_out.empty()) write_json(report, json_out);
    return 0;
  }
};

// ---- tourney ---------------------------------------------------------------

struct TourneyCmd {
  Common common;
  std::string policies = "combat,forage,meander";
  int episodes = 16;
  int workers = 1;
  std::string json_out;

  int run() const {
    const EnvConfig cfg = common.resolve();
    std::vector<PolicyEntry> entries;
    for (const auto& name : split(policies)) entries.push_back(scripted_entry(name));
    const std::vector<MatchRecord> matches = run_tournament(cfg, entries, episodes, {workers, {}});
    Ratings ratings;
    json records = json::array();
    for (const auto& m : matches) {
      ratings = update_ratings(std::move(ratings), m);
      records.push_back(match_json(m));
      std::printf("seed %llu", static_cast<unsigned long long>(m.seed));
      for (std::size_t i = 0; i < m.policies.size(); ++i)
        std::printf("  %s %.4f (rank %d)", m.policies[i].c_str(), m.mean_reward[i], m.rank[i]);
      std::printf("\n");
      for (std::size_t i = 0; i < m.failures.size(); ++i)
        if (!m.failures[i].empty()) std::printf("  %s failed: %s\n", m.policies[i].c_str(), m.failures[i].c_str());
    }
    std::printf("%-18s %10s %10s\n", "policy", "sr", "sigma");
    json table = json::array();
    for (const auto& [name, r] : ratings) {
      std::printf("%-18s %10.1f %10.1f\n", name.c_str(), r.sr, r.sigma);
      table.push_back({{"policy", name}, {"sr", r.sr}, {"mu", r.mu}, {"sigma", r.sigma}});
    }
    if (!json_out.empty()) write_json({{"matches", records}, {"ratings", table}}, json_out);
    return 0;
  }
};

// ---- play ------------------------------------------------------------------

struct PlayCmd {
  std::string file;
  std::string overlays;
  std::string tie_break;

  int run() const {
    const Replay replay = read_replay(file);
    const ReplayHeader& h = replay.header;
    std::printf("replay %s: engine \"%s\" format %u.%u config %s map_seed %llu ticks %zu\n", file.c_str(),
                h.engine_version.c_str(), h.major, h.minor, hex(h.config_digest).c_str(),
                static_cast<unsigned long long>(h.map_seed), replay.ticks.size());
    if (h.engine_version != kEngineVersion)
      std::printf("warning: recorded with \"%s\", playing with \"%s\"\n", h.engine_version.c_str(), kEngineVersion);
    std::optional<EngineOptions> engine;
    if (!tie_break.empty()) {
      engine = h.engine;
      engine->tie_break = tie_break == "highest" ? TieBreak::HighestIdWins : TieBreak::LowestIdWins;
    }
    const PlayResult r = play(replay, engine);
    std::fputs(render_metrics_table(r.metrics).c_str(), stdout);
    if (!overlays.empty()) export_overlays(r.overlays, overlays);
    int code = 0;
    if (!replay.complete) {
      std::printf("partial replay (%s); last complete tick %d\n", replay.problem.c_str(), replay.last_complete_tick);
      code = kExitFailure;
    }
    if (r.divergent_tick) {
      std::printf("divergence at tick %d: %s\n", *r.divergent_tick, r.divergence.c_str());
      return kExitFailure;
    }
    std::printf("digest trace verified over %zu ticks; final digest %s\n", replay.ticks.size(),
                hex(r.digests.back()).c_str());
    if (replay.complete && !r.trailer_matches) {
      std::printf("trailer metrics differ from the re-simulation\n");
      code = kExitFailure;
    }
    return code;
  }
};

// ---- bench -----------------------------------------------------------------

struct BenchCmd {
  Common common;
  std::string policy = "meander";
  int ticks = 1000;
  int invariant_interval = 0;
  std::string report;

  int run() const {
    const EnvConfig cfg = common.resolve();
    const BenchReport r = bench(cfg, scripted_entry(policy), ticks, {invariant_interval, {}});
    std::printf("%s map %d cap %d: %d ticks in %.3f s over %d episodes\n", r.policy.c_str(), r.map_size,
                r.population_cap, r.ticks, r.seconds, r.episodes);
    std::printf("ticks/sec %.2f  observations/sec %.1f  mean live agents %.1f  REPS %.1f\n", r.ticks_per_sec,
                r.observations_per_sec, r.mean_live_agents, r.reps);
    std::printf("peak rss %.1f MiB  rss %.1f MiB  invariant checks %d\n", r.peak_rss_bytes / 1048576.0,
                r.rss_bytes / 1048576.0, r.invariant_checks);
    if (!report.empty()) write_json(r.to_json(), report);
    if (!r.invariant_error.empty()) {
      std::printf("invariant violation: %s\n", r.invariant_error.c_str());
      return kExitFailure;
    }
    return 0;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Many-agent survival simulation engine"};
  app.require_subcommand(1);

  GenerateCmd gen;
  auto* g = app.add_subcommand("generate", "Generate maps and write .map and .pgm files");
  gen.common.add(g);
  g->add_option("--count", gen.count, "Number of maps (seeds seed .. seed+count-1)")->check(CLI::PositiveNumber);
  g->add_option("--out", gen.out, "Output directory")->capture_default_str();

  RunCmd run;
  auto* r = app.add_subcommand("run", "Run one self-contained episode");
  run.common.add(r);
  r->add_option("--policy", run.policy, "Scripted policy preset")->check(CLI::IsMember(presets()))->capture_default_str();
  r->add_option("--record", run.record, "Write a replay file");
  r->add_option("--logs", run.logs, "Write lifetime logs as NDJSON");
  r->add_option("--overlays", run.overlays, "Export overlays (CSV and PGM) to a directory");
  r->add_flag("--check-invariants", run.check, "Verify world invariants after every tick");

  EvalCmd eval;
  auto* e = app.add_subcommand("eval", "Self-contained evaluation, one row per policy");
  eval.common.add(e);
  e->add_option("--policy", eval.policies, "Policy presets")->check(CLI::IsMember(presets()))->delimiter(',');
  e->add_option("--episodes", eval.episodes, "Episodes per policy")->check(CLI::PositiveNumber)->capture_default_str();
  e->add_option("--workers", eval.workers, "Worker threads")->check(CLI::PositiveNumber);
  e->add_option("--json", eval.json_out, "Write metrics as JSON");

  TourneyCmd tourney;
  auto* t = app.add_subcommand("tourney", "Tournament: all policies share each world; prints ratings");
  tourney.common.add(t);
  t->add_option("--policies", tourney.policies, "Comma-separated policy presets")->capture_default_str();
  t->add_option("--episodes", tourney.episodes, "Number of episodes")->check(CLI::PositiveNumber)->capture_default_str();
  t->add_option("--workers", tourney.workers, "Worker threads")->check(CLI::PositiveNumber);
  t->add_option("--json", tourney.json_out, "Write match records and ratings as JSON");

  PlayCmd playback;
  auto* p = app.add_subcommand("play", "Re-simulate a replay and verify its digest trace");
  p->add_option("file", playback.file, "Replay file")->required();
  p->add_option("--overlays", playback.overlays, "Export overlays (CSV and PGM) to a directory");
  p->add_option("--tie-break", playback.tie_break, "Override the recorded movement tie-break")
      ->check(CLI::IsMember({"lowest", "highest"}));

  BenchCmd benchmark;
  auto* b = app.add_subcommand("bench", "Measure throughput and memory");
  benchmark.common.add(b);
  b->add_option("--policy", benchmark.policy, "Scripted policy preset")
      ->check(CLI::IsMember(presets()))
      ->capture_default_str();
  b->add_option("--ticks", benchmark.ticks, "Ticks to simulate")->check(CLI::PositiveNumber)->capture_default_str();
  b->add_option("--invariant-interval", benchmark.invariant_interval, "Check invariants every n ticks (0 never)");
  b->add_option("--report", benchmark.report, "Write the benchmark report as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::ParseError& ex) {
    app.exit(ex);
    return kExitUsage;
  }

  try {
    if (*g) return gen.run();
    if (*r) return run.run();
    if (*e) return eval.run();
    if (*t) return tourney.run();
    if (*p) return playback.run();
    if (*b) return benchmark.run();
  } catch (const Failure& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return kExitFailure;
  } catch (const ReplayError& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return kExitUsage;
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return kExitUsage;
  }
  return kExitUsage;
}
