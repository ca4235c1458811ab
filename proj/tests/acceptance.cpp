// Acceptance suite: one PASS/FAIL line per criterion; exit 1 if any fails.
// Usage: nmmo_acceptance [--only name] [--work dir]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "map_checks.hpp"
#include "nmmo/bench.hpp"
#include "nmmo/evaluation.hpp"
#include "nmmo/noise.hpp"
#include "nmmo/observation.hpp"
#include "nmmo/replay.hpp"
#include "nmmo/worldgen.hpp"
#include "observation_oracle.hpp"
#include "support.hpp"

using namespace nmmo;
using namespace nmmo::test;
namespace fs = std::filesystem;

namespace {

// Tolerances and budgets.
constexpr int kDeterminismEpisodes = 100;
constexpr double kDeterminismBudget = 5 * 60;
constexpr int kOracleStates = 1000;
constexpr double kOracleBudget = 60;
constexpr int kBaselineEpisodes = 30;
constexpr double kBaselineAlpha = 0.01;
constexpr double kExploreRatio = 1.3;
constexpr double kBaselineBudget = 30 * 60;
constexpr int kRatingMatches = 10000;
constexpr double kRatingWinP = 0.95;
constexpr double kRatingGap = 100;
constexpr double kRatingTol = 10;
constexpr double kRatingBudget = 60;
constexpr int kLongTicks = 1000;
constexpr int kWorldgenSeeds = 100;
constexpr int kNoiseSamples = 1000000;
constexpr double kWorldgenBudget = 2 * 60;
constexpr int kScaleTicks = 1000;

struct Outcome {
  bool pass = true;
  std::string detail;
};

fs::path g_work = fs::temp_directory_path() / "nmmo_acceptance";

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string preset_for(int episode) {
  static const char* names[] = {"meander", "meander", "meander",          "meander",          "meander",
                                "meander", "combat",  "combat-noexplore", "forage-noexplore", "forage"};
  return names[episode % 10];
}

Outcome determinism() {
  const fs::path dir = g_work / "replays";
  fs::create_directories(dir);
  int mismatches = 0;
  std::size_t ticks = 0;
  std::string first;
  for (int e = 0; e < kDeterminismEpisodes; ++e) {
    EnvConfig cfg = canonical("SmallMaps");
    cfg.seed = 7000 + static_cast<std::uint64_t>(e);
    const TileMap map = generate_map(cfg);
    const std::vector<int> slots(static_cast<std::size_t>(cfg.population_cap), 0);
    const fs::path path = dir / ("episode_" + std::to_string(e) + ".rpl");

    ScriptedPolicy p1(policy_preset(preset_for(e)));
    const EpisodeOutcome recorded = record_episode({cfg, &map, {&p1}, slots}, path);
    ScriptedPolicy p2(policy_preset(preset_for(e)));
    const EpisodeOutcome again = run_episode({cfg, &map, {&p2}, slots});
    const PlayResult played = play(read_replay(path));
    ticks += recorded.digests.size();

    const bool ok = recorded.digests == again.digests && played.digests == recorded.digests &&
                    !played.divergent_tick && played.trailer_matches;
    if (!ok) {
      ++mismatches;
      if (first.empty()) first = "episode " + std::to_string(e) + " " + preset_for(e) + " " + played.divergence;
    }
    fs::remove(path);
  }
  Outcome o;
  o.pass = mismatches == 0;
  o.detail = std::to_string(kDeterminismEpisodes) + " episodes, " + std::to_string(ticks) + " digests, " +
             std::to_string(mismatches) + " mismatched";
  if (!first.empty()) o.detail += "; first: " + first;
  return o;
}

Outcome observation_oracle() {
  std::mt19937_64 g(404);
  int states = 0;
  std::size_t compared = 0;
  int mismatches = 0;
  for (int episode = 0; states < kOracleStates; ++episode) {
    EnvConfig cfg = canonical("SmallMaps");
    cfg.map_size = 48 + static_cast<int>(g() % 3) * 16;
    cfg.vision_range = 3 + static_cast<int>(g() % 5);
    cfg.population_cap = 16 + static_cast<int>(g() % 32);
    cfg.npc_params.npc_cap = static_cast<int>(g() % 24);
    cfg.worldgen_params.border_width = 4;
    cfg.spawn_mode = g() % 2 ? SpawnMode::Continuous : SpawnMode::Concurrent;
    cfg.systems_enabled = {g() % 4 != 0, g() % 4 != 0, true, g() % 4 != 0};
    cfg.seed = g();
    const TileMap m = generate_map(cfg);
    WorldState w = reset(cfg, m);
    const int skip = static_cast<int>(g() % 8);
    for (int t = 0; t < 60 && !w.episode_over() && states < kOracleStates; ++t) {
      if (t >= skip && t % 3 == 0) {
        ++states;
        for (const auto& a : w.agents) {
          ++compared;
          if (!(select_observation(w, a.id) == traversal_observation(w, a.id))) ++mismatches;
        }
      }
      tick(w, random_actions(w, g, 0.4));
    }
  }
  return {mismatches == 0 && compared > 0, std::to_string(states) + " states, " + std::to_string(compared) +
                                               " observations, " + std::to_string(mismatches) + " mismatched"};
}

std::vector<double> episode_lifetimes(const SelfContainedResult& r) {
  std::vector<double> out;
  for (const auto& e : r.episodes) out.push_back(e.mean(Metric::Lifetime));
  return out;
}

/// One-sided Welch t-test p-value for mean(a) > mean(b).
double welch_greater(const std::vector<double>& a, const std::vector<double>& b) {
  auto moments = [](const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double s = 0;
    for (double x : v) s += (x - m) * (x - m);
    return std::pair{m, s / static_cast<double>(v.size() - 1)};
  };
  const auto [ma, va] = moments(a);
  const auto [mb, vb] = moments(b);
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  const double se2 = va / na + vb / nb;
  if (se2 == 0) return ma > mb ? 0.0 : 1.0;
  const double t = (ma - mb) / std::sqrt(se2);
  const double df = se2 * se2 / (va * va / (na * na * (na - 1)) + vb * vb / (nb * nb * (nb - 1)));
  return boost::math::cdf(boost::math::complement(boost::math::students_t(df), t));
}

Outcome baselines() {
  const EnvConfig cfg = canonical("SmallMaps");
  std::map<std::string, SelfContainedResult> res;
  std::vector<PolicyMetrics> rows;
  for (const char* name : {"forage", "forage-noexplore", "combat", "meander"}) {
    res[name] = run_self_contained(cfg, scripted_entry(name), kBaselineEpisodes);
    rows.push_back(res[name].metrics);
  }
  std::printf("%s", render_metrics_table(rows).c_str());

  const double p_fc = welch_greater(episode_lifetimes(res["forage"]), episode_lifetimes(res["combat"]));
  const double p_cm = welch_greater(episode_lifetimes(res["combat"]), episode_lifetimes(res["meander"]));
  const double ratio = res["forage"].metrics.mean(Metric::Explore) / res["forage-noexplore"].metrics.mean(Metric::Explore);
  bool zero = true;
  for (const char* name : {"forage", "forage-noexplore", "meander"})
    zero &= res[name].metrics.sums[static_cast<int>(Metric::PlayerKills)] == 0 &&
            res[name].metrics.sums[static_cast<int>(Metric::Equipment)] == 0;

  const bool a = p_fc < kBaselineAlpha && p_cm < kBaselineAlpha;
  const bool b = ratio >= kExploreRatio;
  Outcome o;
  o.pass = a && b && zero;
  o.detail = std::string("(a) ") + (a ? "ok" : "FAIL") + " p(forage>combat)=" + fmt("%.2e", p_fc) +
             " p(combat>meander)=" + fmt("%.2e", p_cm) + "; (b) " + (b ? "ok" : "FAIL") +
             " explore ratio " + fmt("%.3f", ratio) + "; (c) " + (zero ? "ok" : "FAIL") +
             " kills/equipment zero for non-combat";
  return o;
}

Outcome ratings() {
  std::mt19937_64 gen(95);
  std::bernoulli_distribution win(kRatingWinP);
  Ratings r;
  bool pinned = true;
  for (int i = 0; i < kRatingMatches; ++i) {
    MatchRecord m;
    m.policies = {"combat", "other"};
    m.mean_reward = win(gen) ? std::vector<double>{0.0, -1.0} : std::vector<double>{-1.0, 0.0};
    m.rank = rank_rewards(m.mean_reward);
    r = update_ratings(std::move(r), m);
    pinned &= r.at("combat").sr == 1500.0;
  }
  const double gap = r.at("combat").sr - r.at("other").sr;
  Outcome o;
  o.pass = pinned && std::abs(gap - kRatingGap) <= kRatingTol;
  o.detail = "gap " + fmt("%.2f", gap) + " (target 100 +/- 10), anchor " + fmt("%.6f", r.at("combat").sr) +
             (pinned ? " after every match" : " drifted");
  return o;
}

/// Half the agents follow the combat script, the rest act at random.
std::map<EntityId, ActionSet> mixed_actions(const Environment& env, const PolicyContext& ctx, std::mt19937_64& g) {
  static const PolicySpec combat = policy_preset("combat");
  std::map<EntityId, ActionSet> acts;
  for (const auto& [id, obs] : env.observations()) {
    if (id % 2 == 0) {
      CounterRng rng = agent_rng(env.episode_seed() + static_cast<std::uint64_t>(env.world().tick), id);
      acts[id] = scripted_act(obs, combat, ctx, rng);
    } else {
      ActionSet s;
      if (g() % 5) s.move = static_cast<Direction>(g() % 4);
      if (obs.entities.size() > 1 && g() % 2)
        s.attack = AttackIntent{static_cast<CombatStyle>(g() % 3), obs.entities[g() % obs.entities.size()][kEntId]};
      acts[id] = s;
    }
  }
  return acts;
}

Outcome achievements() {
  std::mt19937_64 g(1000);
  std::size_t unlocks = 0;
  int duplicates = 0;
  int score_mismatches = 0;
  std::size_t agents = 0;
  for (int episode = 0; episode < 3; ++episode) {
    EnvConfig cfg = canonical("SmallMaps");
    cfg.map_size = 64 + 32 * episode;
    cfg.population_cap = 32;
    cfg.npc_params.npc_cap = 16;
    cfg.worldgen_params.border_width = 4;
    cfg.spawn_mode = SpawnMode::Continuous;
    cfg.reward_mode = RewardMode::Achievement;
    cfg.episode_horizon = kLongTicks;
    cfg.seed = g();
    Environment env(cfg);
    env.reset();
    const PolicyContext ctx = PolicyContext::from(cfg);
    std::map<EntityId, double> returns;
    std::set<std::pair<EntityId, int>> seen;
    while (!env.episode_over()) {
      const StepResult r = env.step(mixed_actions(env, ctx, g));
      for (const auto& [id, v] : r.rewards) returns[id] += v;
      for (const auto& u : r.report.achievements) {
        ++unlocks;
        if (!seen.insert({u.id, static_cast<int>(u.task)}).second) ++duplicates;
      }
    }
    for (const auto& log : env.lifetime_logs()) {
      ++agents;
      if (returns[log.id] != log.metrics.at("achievement").get<double>()) ++score_mismatches;
    }
  }
  Outcome o;
  o.pass = duplicates == 0 && score_mismatches == 0 && unlocks > 0;
  o.detail = std::to_string(agents) + " agents, " + std::to_string(unlocks) + " unlocks, " +
             std::to_string(duplicates) + " repeated, " + std::to_string(score_mismatches) + " score mismatches";
  return o;
}

Outcome toggle_isolation() {
  std::mt19937_64 g(58);
  int episodes = 0;
  long ticks = 0;
  std::size_t events = 0;
  int leaks = 0;
  std::string first;
  auto leak = [&](bool bad, const std::string& what) {
    if (!bad) return;
    ++leaks;
    if (first.empty()) first = what;
  };
  for (int round = 0; round < 2; ++round) {
    for (int mask = 0; mask < 16; ++mask) {
      EnvConfig cfg = canonical("SmallMaps");
      cfg.systems_enabled = {bool(mask & 1), bool(mask & 2), bool(mask & 4), bool(mask & 8)};
      // Progression needs a source of XP.
      if (cfg.systems_enabled.progression && !cfg.systems_enabled.resource && !cfg.systems_enabled.combat) continue;
      cfg.map_size = 48 + static_cast<int>(g() % 3) * 16;
      cfg.vision_range = 3 + static_cast<int>(g() % 5);
      cfg.population_cap = 8 + static_cast<int>(g() % 24);
      cfg.npc_params.npc_cap = 4 + static_cast<int>(g() % 16);
      cfg.worldgen_params.border_width = 4;
      cfg.spawn_mode = SpawnMode::Continuous;
      cfg.episode_horizon = kLongTicks;
      cfg.seed = g();
      const TileMap m = generate_map(cfg);
      WorldState w = reset(cfg, m);
      while (!w.episode_over()) tick(w, random_actions(w, g, 0.3));
      ++episodes;
      ticks += w.tick;
      events += w.event_log.size();
      const auto& s = cfg.systems_enabled;
      const std::string tag = "mask " + std::to_string(mask) + ": ";
      if (!s.resource)
        for (auto k : {EventKind::Harvest, EventKind::Drink, EventKind::Starve, EventKind::Regen, EventKind::Regrow})
          leak(count_events(w, k) != 0, tag + "resource event");
      if (!s.combat) leak(count_events(w, EventKind::Attack) != 0, tag + "attack event");
      if (!s.progression) {
        leak(count_events(w, EventKind::XpGain) + count_events(w, EventKind::LevelUp) != 0, tag + "progression event");
        for (const auto& a : w.agents)
          for (const auto& sk : a.skills.skills) leak(sk.xp != 0, tag + "xp without progression");
      }
      if (!s.npc_equipment) {
        leak(count_events(w, EventKind::NpcSpawn) + count_events(w, EventKind::EquipmentGain) != 0,
             tag + "npc/equipment event");
        leak(!w.npcs.empty(), tag + "npc present");
      }
    }
  }
  Outcome o;
  o.pass = leaks == 0;
  o.detail = std::to_string(episodes) + " fuzzed " + std::to_string(kLongTicks) + "-tick episodes (" +
             std::to_string(ticks) + " ticks, " + std::to_string(events) + " events), " + std::to_string(leaks) +
             " leaks";
  if (!first.empty()) o.detail += "; first: " + first;
  return o;
}

Outcome worldgen() {
  EnvConfig cfg = canonical("SmallMaps");
  int violations = 0;
  int nondeterministic = 0;
  std::string first;
  for (int s = 0; s < kWorldgenSeeds; ++s) {
    cfg.seed = static_cast<std::uint64_t>(s);
    const TileMap a = generate_map(cfg);
    const std::string v = map_violation(a);
    if (!v.empty()) {
      ++violations;
      if (first.empty()) first = "seed " + std::to_string(s) + ": " + v;
    }
    nondeterministic += !(generate_map(cfg) == a);
  }
  std::mt19937_64 g(6);
  std::uniform_real_distribution<double> coord(-5000.0, 5000.0);
  double lo = 1;
  double hi = -1;
  int out_of_range = 0;
  for (int i = 0; i < kNoiseSamples; ++i) {
    const double x = coord(g);
    const double y = coord(g);
    const std::uint64_t seed = g();
    for (double v : {noise(x, y, seed, cfg.worldgen_params), gradient_noise(x, y, seed)}) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      out_of_range += !(v >= -1.0 && v <= 1.0);
    }
  }
  Outcome o;
  o.pass = violations == 0 && nondeterministic == 0 && out_of_range == 0;
  o.detail = std::to_string(kWorldgenSeeds) + " seeds: " + std::to_string(violations) + " invariant violations, " +
             std::to_string(nondeterministic) + " nondeterministic; noise over " + std::to_string(kNoiseSamples) +
             " samples in [" + fmt("%.4f", lo) + ", " + fmt("%.4f", hi) + "]";
  if (!first.empty()) o.detail += "; first: " + first;
  return o;
}

Outcome scale() {
  const BenchReport r = bench(canonical("LargeMaps"), scripted_entry("meander"), kScaleTicks, {1, {}});
  const fs::path report = g_work / "bench_report.json";
  std::ofstream(report) << r.to_json().dump(2) << "\n";
  Outcome o;
  o.pass = r.ticks == kScaleTicks && r.invariant_checks == kScaleTicks && r.invariant_error.empty();
  o.detail = std::to_string(r.ticks) + " ticks over " + std::to_string(r.episodes) + " episodes, " +
             fmt("%.1f", r.ticks_per_sec) + " ticks/sec, peak rss " +
             fmt("%.1f", static_cast<double>(r.peak_rss_bytes) / (1 << 20)) + " MiB, " +
             std::to_string(r.invariant_checks) + " invariant checks" +
             (r.invariant_error.empty() ? "" : ", violation: " + r.invariant_error) + "; report " +
             report.string();
  return o;
}

struct Criterion {
  const char* name;
  double budget;  // seconds; 0 unbounded
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  std::string only_name;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string flag = argv[i];
    if (flag == "--only") only_name = argv[i + 1];
    else if (flag == "--work") g_work = argv[i + 1];
    else {
      std::fprintf(stderr, "usage: %s [--only name] [--work dir]\n", argv[0]);
      return 1;
    }
  }
  fs::create_directories(g_work);

  const std::vector<Criterion> criteria{
      {"determinism", kDeterminismBudget, determinism},
      {"observation-oracle", kOracleBudget, observation_oracle},
      {"baselines", kBaselineBudget, baselines},
      {"ratings", kRatingBudget, ratings},
      {"achievements", 0, achievements},
      {"toggle-isolation", 0, toggle_isolation},
      {"worldgen", kWorldgenBudget, worldgen},
      {"scale", 0, scale},
  };

  int failed = 0;
  int ran = 0;
  for (const auto& c : criteria) {
    if (!only_name.empty() && only_name != c.name) continue;
    ++ran;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget > 0 && secs >= c.budget) {
      o.pass = false;
      o.detail += "; over budget of " + fmt("%.0f", c.budget) + " s";
    }
    failed += !o.pass;
    std::printf("%s %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  if (ran == 0) {
    std::fprintf(stderr, "no criterion named %s\n", only_name.c_str());
    return 1;
  }
  return failed ? 1 : 0;
}
