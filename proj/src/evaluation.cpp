#include "nmmo/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <mutex>
#include <numbers>
#include <set>
#include <stdexcept>
#include <thread>

#include "nmmo/hash.hpp"
#include "nmmo/worldgen.hpp"

namespace nmmo {

using nlohmann::json;

// ---- Metrics ---------------------------------------------------------------

void PolicyMetrics::add(const json& m) {
  ++agents;
  sums[static_cast<std::size_t>(Metric::Lifetime)] += m.at("lifetime").get<double>();
  sums[static_cast<std::size_t>(Metric::Achievement)] += m.at("achievement").get<double>();
  sums[static_cast<std::size_t>(Metric::PlayerKills)] += m.at("kills").get<double>();
  sums[static_cast<std::size_t>(Metric::Equipment)] += m.at("equipment").get<double>();
  sums[static_cast<std::size_t>(Metric::Explore)] += m.at("explore").get<double>();
  sums[static_cast<std::size_t>(Metric::Forage)] += m.at("forage").get<double>();
}

void PolicyMetrics::merge(const PolicyMetrics& o) {
  agents += o.agents;
  for (int i = 0; i < kMetricCount; ++i) sums[i] += o.sums[i];
}

std::vector<PolicyMetrics> fold_metrics(const std::vector<LifetimeLog>& logs, const std::vector<std::string>& names,
                                        const std::vector<int>& slot_policy) {
  std::vector<PolicyMetrics> out(names.size());
  for (std::size_t i = 0; i < names.size(); ++i) out[i].policy = names[i];
  for (const auto& l : logs) {
    const int slot = l.metrics.at("slot").get<int>();
    out.at(static_cast<std::size_t>(slot_policy.at(static_cast<std::size_t>(slot)))).add(l.metrics);
  }
  return out;
}

std::string render_metrics_table(const std::vector<PolicyMetrics>& rows) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-18s %8s %10s %12s %12s %10s %8s %8s\n", "policy", "agents", "lifetime",
                "achievement", "player_kills", "equipment", "explore", "forage");
  out += buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-18s %8lld %10.2f %12.2f %12.2f %10.2f %8.2f %8.2f\n", r.policy.c_str(),
                  static_cast<long long>(r.agents), r.mean(Metric::Lifetime), r.mean(Metric::Achievement),
                  r.mean(Metric::PlayerKills), r.mean(Metric::Equipment), r.mean(Metric::Explore),
                  r.mean(Metric::Forage));
    out += buf;
  }
  return out;
}

json metrics_json(const PolicyMetrics& m) {
  json j{{"policy", m.policy}, {"agents", m.agents}};
  for (int i = 0; i < kMetricCount; ++i) j[kMetricNames[i]] = m.mean(static_cast<Metric>(i));
  return j;
}

// ---- Episodes --------------------------------------------------------------

PolicyEntry scripted_entry(const std::string& preset) {
  const PolicySpec spec = policy_preset(preset);
  return {preset, [spec] { return std::make_unique<ScriptedPolicy>(spec); }};
}

CounterRng agent_rng(std::uint64_t episode_seed, EntityId id) {
  return CounterRng(hash_combine(hash_combine(episode_seed, 0x706f6c6963ULL), static_cast<std::uint64_t>(id)));
}

EpisodeOutcome run_episode(const EpisodeSetup& setup) {
  if (!setup.map) throw std::invalid_argument("episode has no map");
  const EnvConfig& cfg = setup.config;
  if (static_cast<int>(setup.slot_policy.size()) != cfg.population_cap)
    throw std::invalid_argument("slot_policy must have one entry per population slot");
  const std::size_t np = setup.policies.size();

  Environment env(cfg, {*setup.map}, setup.options);
  ResetOptions ro;
  if (setup.teams) ro.slot_population = setup.slot_policy;
  env.reset(cfg.seed, ro);

  EpisodeOutcome out;
  out.seed = cfg.seed;
  out.failures.assign(np, {});
  out.digests.push_back(digest(env.world()));
  if (setup.on_reset) setup.on_reset(env);
  const PolicyContext ctx = PolicyContext::from(cfg);
  std::map<EntityId, CounterRng> rngs;
  std::map<EntityId, double> returns;
  std::map<EntityId, ActionSet> actions;

  while (!env.episode_over()) {
    actions.clear();
    for (const auto& [id, obs] : env.observations()) {
      const AgentState* a = env.world().find_agent(id);
      const auto p = static_cast<std::size_t>(setup.slot_policy[static_cast<std::size_t>(a->slot)]);
      if (!out.failures[p].empty()) continue;
      auto it = rngs.try_emplace(id, agent_rng(cfg.seed, id)).first;
      try {
        actions.emplace(id, setup.policies[p]->act(obs, ctx, it->second));
      } catch (const std::exception& e) {
        out.failures[p] = "tick " + std::to_string(env.world().tick) + ": " + e.what();
      }
    }
    // A policy failing mid-tick forfeits the actions it already produced.
    for (auto it = actions.begin(); it != actions.end();) {
      const AgentState* a = env.world().find_agent(it->first);
      const auto p = static_cast<std::size_t>(setup.slot_policy[static_cast<std::size_t>(a->slot)]);
      it = out.failures[p].empty() ? std::next(it) : actions.erase(it);
    }
    const StepResult r = env.step(actions);
    for (const auto& [id, v] : r.rewards) returns[id] += v;
    out.digests.push_back(digest(env.world()));
    if (setup.on_step) setup.on_step(env, actions, r);
  }

  out.ticks = env.world().tick;
  out.logs = env.lifetime_logs();
  std::vector<std::string> names;
  for (const Policy* p : setup.policies) names.push_back(p->name());
  out.metrics = fold_metrics(out.logs, names, setup.slot_policy);
  out.mean_reward.assign(np, 0.0);
  for (const auto& l : out.logs) {
    const auto p = static_cast<std::size_t>(setup.slot_policy[l.metrics.at("slot").get<std::size_t>()]);
    out.mean_reward[p] += returns[l.id];
  }
  for (std::size_t p = 0; p < np; ++p)
    if (out.metrics[p].agents > 0) out.mean_reward[p] /= static_cast<double>(out.metrics[p].agents);
  out.overlays = env.overlays();
  return out;
}

std::uint64_t episode_seed(const EnvConfig& config, int episode) {
  return config.seed + static_cast<std::uint64_t>(episode);
}

namespace {

/// Runs job(i) for i in [0, n) on `workers` threads.
template <class Job>
void parallel_for(int n, int workers, Job job) {
  workers = std::clamp(workers, 1, std::max(1, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

SelfContainedResult run_self_contained(const EnvConfig& config, const PolicyEntry& policy, int episodes,
                                       const EvalOptions& options) {
  if (episodes < 1) throw std::invalid_argument("episodes must be >= 1");
  SelfContainedResult res;
  res.episodes.resize(static_cast<std::size_t>(episodes));
  res.final_digests.resize(static_cast<std::size_t>(episodes));
  parallel_for(episodes, options.workers, [&](int e) {
    EnvConfig cfg = config;
    cfg.seed = episode_seed(config, e);
    const TileMap map = generate_map(cfg);
    const std::unique_ptr<Policy> p = policy.make();
    EpisodeSetup setup{cfg, &map, {p.get()}, std::vector<int>(static_cast<std::size_t>(cfg.population_cap), 0),
                       false, options.engine, {}, {}};
    EpisodeOutcome o = run_episode(setup);
    o.metrics[0].policy = policy.name;
    res.episodes[static_cast<std::size_t>(e)] = o.metrics[0];
    res.final_digests[static_cast<std::size_t>(e)] = o.digests.back();
  });
  res.metrics.policy = policy.name;
  for (const auto& m : res.episodes) res.metrics.merge(m);
  return res;
}

// ---- Tournaments -----------------------------------------------------------

std::vector<int> allocate_slots(int cap, int n) {
  if (n < 1) throw std::invalid_argument("need at least one policy");
  std::vector<int> out(static_cast<std::size_t>(n), cap / n);
  for (int i = 0; i < cap % n; ++i) ++out[static_cast<std::size_t>(i)];
  return out;
}

std::vector<int> rank_rewards(const std::vector<double>& rewards) {
  std::vector<int> rank(rewards.size(), 0);
  for (std::size_t i = 0; i < rewards.size(); ++i)
    for (double r : rewards) rank[i] += r > rewards[i];
  return rank;
}

json match_json(const MatchRecord& m) {
  return json{{"seed", m.seed},        {"policies", m.policies}, {"slots", m.slots},
              {"mean_reward", m.mean_reward}, {"rank", m.rank},         {"failures", m.failures}};
}

std::vector<MatchRecord> run_tournament(const EnvConfig& config, const std::vector<PolicyEntry>& policies,
                                        int episodes, const EvalOptions& options) {
  if (policies.size() < 2) throw std::invalid_argument("a tournament needs at least two policies");
  if (episodes < 1) throw std::invalid_argument("episodes must be >= 1");
  const std::vector<int> slots = allocate_slots(config.population_cap, static_cast<int>(policies.size()));
  std::vector<int> slot_policy;
  for (std::size_t p = 0; p < slots.size(); ++p) slot_policy.insert(slot_policy.end(), slots[p], static_cast<int>(p));

  std::vector<MatchRecord> out(static_cast<std::size_t>(episodes));
  parallel_for(episodes, options.workers, [&](int e) {
    EnvConfig cfg = config;
    cfg.seed = episode_seed(config, e);
    const TileMap map = generate_map(cfg);
    std::vector<std::unique_ptr<Policy>> owned;
    std::vector<Policy*> ptrs;
    for (const auto& entry : policies) {
      owned.push_back(entry.make());
      ptrs.push_back(owned.back().get());
    }
    const EpisodeOutcome o = run_episode({cfg, &map, ptrs, slot_policy, true, options.engine, {}, {}});
    MatchRecord& m = out[static_cast<std::size_t>(e)];
    m.seed = cfg.seed;
    for (const auto& entry : policies) m.policies.push_back(entry.name);
    m.slots = slots;
    m.mean_reward = o.mean_reward;
    m.rank = rank_rewards(o.mean_reward);
    m.failures = o.failures;
  });
  return out;
}

// ---- Ratings ---------------------------------------------------------------

double win_probability(double d, double scale) { return 1.0 / (1.0 + std::pow(10.0, -d / scale)); }

Ratings update_ratings(Ratings ratings, const MatchRecord& match, const RatingParams& params) {
  for (const auto& name : match.policies) {
    if (!ratings.count(name)) ratings[name] = {name, params.prior_mu, params.prior_sigma, params.prior_mu};
  }
  const double q = std::log(10.0) / params.scale;
  auto g = [&](double sigma) {
    return 1.0 / std::sqrt(1.0 + 3.0 * q * q * sigma * sigma / (std::numbers::pi * std::numbers::pi));
  };
  const std::size_t n = match.policies.size();
  std::vector<SkillRating> next;
  for (std::size_t i = 0; i < n; ++i) {
    const SkillRating& me = ratings.at(match.policies[i]);
    double info = 0.0;
    double score = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const SkillRating& op = ratings.at(match.policies[j]);
      const double gj = g(op.sigma);
      const double e = win_probability(gj * (me.mu - op.mu), params.scale);
      const double s = match.rank[i] < match.rank[j] ? 1.0 : match.rank[i] == match.rank[j] ? 0.5 : 0.0;
      info += gj * gj * e * (1.0 - e);
      score += gj * (s - e);
    }
    SkillRating r = me;
    const double var = 1.0 / (1.0 / (me.sigma * me.sigma) + q * q * info);
    r.mu = me.mu + q * var * score;
    r.sigma = std::sqrt(var);
    next.push_back(r);
  }
  for (auto& r : next) ratings[r.policy] = r;

  auto anchor = ratings.find(params.anchor);
  const double shift = anchor == ratings.end() ? 0.0 : 1500.0 - anchor->second.mu;
  for (auto& [name, r] : ratings) {
    r.mu = name == params.anchor ? 1500.0 : r.mu + shift;
    r.sr = r.mu;
  }
  return ratings;
}

// ---- Efficiency ------------------------------------------------------------

double reps(const ThroughputSample& s) {
  if (!(s.observations > 0) || !(s.sim_time > 0) || !(s.realtime_fps > 0) || !(s.cores > 0))
    throw std::invalid_argument("throughput sample fields must be positive");
  return s.observations / (s.sim_time * s.realtime_fps * s.cores);
}

}  // namespace nmmo
