#include "nmmo/bench.hpp"

#include <chrono>
#include <fstream>
#include <stdexcept>

#include "nmmo/worldgen.hpp"

namespace nmmo {

std::int64_t resident_bytes(bool peak) {
  std::ifstream in("/proc/self/status");
  const std::string key = peak ? "VmHWM:" : "VmRSS:";
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind(key, 0) == 0) return std::stoll(line.substr(key.size())) * 1024;
  }
  return -1;
}

nlohmann::json BenchReport::to_json() const {
  return {{"policy", policy},
          {"map_size", map_size},
          {"population_cap", population_cap},
          {"ticks", ticks},
          {"episodes", episodes},
          {"seconds", seconds},
          {"ticks_per_sec", ticks_per_sec},
          {"observations_per_sec", observations_per_sec},
          {"mean_live_agents", mean_live_agents},
          {"sample",
           {{"observations", sample.observations},
            {"sim_time", sample.sim_time},
            {"realtime_fps", sample.realtime_fps},
            {"cores", sample.cores}}},
          {"reps", reps},
          {"peak_rss_bytes", peak_rss_bytes},
          {"rss_bytes", rss_bytes},
          {"invariant_checks", invariant_checks},
          {"invariant_error", invariant_error}};
}

BenchReport bench(const EnvConfig& config, const PolicyEntry& policy, int ticks, const BenchOptions& options) {
  if (ticks < 1) throw std::invalid_argument("bench needs ticks >= 1");
  using Clock = std::chrono::steady_clock;

  BenchReport rep;
  rep.policy = policy.name;
  rep.map_size = config.map_size;
  rep.population_cap = config.population_cap;

  const std::unique_ptr<Policy> p = policy.make();
  const PolicyContext ctx = PolicyContext::from(config);
  std::optional<Environment> env;
  std::map<EntityId, CounterRng> rngs;
  std::map<EntityId, ActionSet> actions;
  double observations = 0;
  double sim_seconds = 0;

  for (int t = 0; t < ticks; ++t) {
    if (!env || env->episode_over()) {
      EnvConfig cfg = config;
      cfg.seed = episode_seed(config, rep.episodes++);
      env.emplace(cfg, std::vector<TileMap>{generate_map(cfg)}, options.engine);
      env->reset(cfg.seed);
      rngs.clear();
    }
    const auto start = Clock::now();
    actions.clear();
    for (const auto& [id, obs] : env->observations()) {
      auto it = rngs.try_emplace(id, agent_rng(env->episode_seed(), id)).first;
      actions.emplace(id, p->act(obs, ctx, it->second));
    }
    const StepResult r = env->step(actions);
    sim_seconds += std::chrono::duration<double>(Clock::now() - start).count();
    observations += static_cast<double>(r.observations->size());

    if (options.invariant_interval > 0 && (t + 1) % options.invariant_interval == 0 && rep.invariant_error.empty()) {
      ++rep.invariant_checks;
      try {
        check_invariants(env->world());
      } catch (const InvariantViolation& e) {
        rep.invariant_error = "tick " + std::to_string(env->world().tick) + ": " + e.what();
      }
    }
  }

  rep.ticks = ticks;
  rep.seconds = sim_seconds;
  rep.ticks_per_sec = ticks / sim_seconds;
  rep.observations_per_sec = observations / sim_seconds;
  rep.mean_live_agents = observations / ticks;
  rep.sample = {observations, sim_seconds, kRealtimeFps, 1};
  rep.reps = observations > 0 ? reps(rep.sample) : 0.0;
  rep.peak_rss_bytes = resident_bytes(true);
  rep.rss_bytes = resident_bytes(false);
  return rep;
}

}  // namespace nmmo
