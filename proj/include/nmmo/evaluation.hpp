#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "nmmo/environment.hpp"
#include "nmmo/policies.hpp"

namespace nmmo {

// ---- Metrics ---------------------------------------------------------------

enum class Metric : std::uint8_t { Lifetime = 0, Achievement, PlayerKills, Equipment, Explore, Forage };
inline constexpr int kMetricCount = 6;
inline constexpr std::array<const char*, kMetricCount> kMetricNames{
    "lifetime", "achievement", "player_kills", "equipment", "explore", "forage"};

/// Running sums of the per-agent metrics of one policy.
struct PolicyMetrics {
  std::string policy;
  std::int64_t agents = 0;
  std::array<double, kMetricCount> sums{};

  /// Adds one lifetime log (the "metrics" object of a LifetimeLog).
  void add(const nlohmann::json& metrics);
  void merge(const PolicyMetrics& other);
  [[nodiscard]] double mean(Metric m) const {
    return agents ? sums[static_cast<std::size_t>(m)] / static_cast<double>(agents) : 0.0;
  }
  bool operator==(const PolicyMetrics&) const = default;
};

/// Folds lifetime logs into per-policy metrics; slot_policy maps each
/// population slot to an index into `names`.
std::vector<PolicyMetrics> fold_metrics(const std::vector<LifetimeLog>& logs, const std::vector<std::string>& names,
                                        const std::vector<int>& slot_policy);

/// Fixed-width table, one row per policy and one column per metric.
std::string render_metrics_table(const std::vector<PolicyMetrics>& rows);
nlohmann::json metrics_json(const PolicyMetrics& m);

// ---- Episodes --------------------------------------------------------------

/// Creates a fresh policy instance; one per worker and episode.
struct PolicyEntry {
  std::string name;
  std::function<std::unique_ptr<Policy>()> make;
};
PolicyEntry scripted_entry(const std::string& preset);

struct EpisodeSetup {
  EnvConfig config;  // config.seed is the episode seed
  const TileMap* map = nullptr;
  std::vector<Policy*> policies;
  std::vector<int> slot_policy;  // size population_cap
  bool teams = false;            // population tag = policy index
  EngineOptions options;
  /// Called after every step with the submitted actions.
  std::function<void(const Environment&, const std::map<EntityId, ActionSet>&, const StepResult&)> on_step;
  std::function<void(const Environment&)> on_reset;
};

struct EpisodeOutcome {
  std::uint64_t seed = 0;
  int ticks = 0;
  std::vector<std::uint64_t> digests;  // after reset, then after every tick
  std::vector<LifetimeLog> logs;
  std::vector<PolicyMetrics> metrics;  // per policy index
  std::vector<double> mean_reward;     // per policy index, mean over its agents
  std::vector<std::string> failures;   // per policy index; empty when healthy
  OverlaySet overlays;
};

/// Policy rng for one agent in one episode.
CounterRng agent_rng(std::uint64_t episode_seed, EntityId id);

/// Plays one episode to its end. A policy that throws is disabled: its
/// agents submit no actions for the rest of the episode.
EpisodeOutcome run_episode(const EpisodeSetup& setup);

struct EvalOptions {
  int workers = 1;
  EngineOptions engine;
};

/// Seed and map of evaluation episode e: config.seed + e, and the map
/// generated from that seed.
std::uint64_t episode_seed(const EnvConfig& config, int episode);

struct SelfContainedResult {
  PolicyMetrics metrics;                 // over all agents and episodes
  std::vector<PolicyMetrics> episodes;   // per episode
  std::vector<std::uint64_t> final_digests;
};

/// All slots play `policy`; every agent is its own population.
SelfContainedResult run_self_contained(const EnvConfig& config, const PolicyEntry& policy, int episodes,
                                       const EvalOptions& options = {});

// ---- Tournaments -----------------------------------------------------------

struct MatchRecord {
  std::uint64_t seed = 0;
  std::vector<std::string> policies;
  std::vector<int> slots;
  std::vector<double> mean_reward;
  std::vector<int> rank;  // 0 is best; equal rewards share a rank
  std::vector<std::string> failures;
};

/// Largest-remainder split of `cap` slots over `n` policies; earlier
/// policies receive the remainder.
std::vector<int> allocate_slots(int cap, int n);
/// Ranks from rewards, higher is better, ties share the lower rank.
std::vector<int> rank_rewards(const std::vector<double>& rewards);

nlohmann::json match_json(const MatchRecord& m);

/// Every episode mixes all policies in one world, each policy its own team.
std::vector<MatchRecord> run_tournament(const EnvConfig& config, const std::vector<PolicyEntry>& policies,
                                        int episodes, const EvalOptions& options = {});

// ---- Ratings ---------------------------------------------------------------

/// Scale at which a 100 point gap predicts a 95% win rate.
inline const double kRatingScale = 100.0 / std::log10(19.0);

struct RatingParams {
  double scale = kRatingScale;
  double prior_mu = 1500.0;
  double prior_sigma = 350.0;
  std::string anchor = "combat";
};

struct SkillRating {
  std::string policy;
  double mu = 1500.0;
  double sigma = 350.0;
  double sr = 1500.0;
};

using Ratings = std::map<std::string, SkillRating>;

/// Predicted probability that a player rated d points higher wins.
double win_probability(double d, double scale = kRatingScale);

/// One pairwise-logistic update from a match's ranks, with steps scaled by
/// each side's uncertainty. Missing policies enter at the prior. Afterwards
/// all ratings shift so the anchor (if rated) sits at exactly 1500.
Ratings update_ratings(Ratings ratings, const MatchRecord& match, const RatingParams& params = {});

// ---- Efficiency ------------------------------------------------------------

/// Real-time play speed: one tick every 0.6 seconds.
inline constexpr double kRealtimeFps = 1.0 / 0.6;

struct ThroughputSample {
  double observations = 0;  // agent observations produced
  double sim_time = 0;      // seconds
  double realtime_fps = kRealtimeFps;
  double cores = 1;
};

/// Real-time experience per second: observations / (sim_time * fps * cores).
double reps(const ThroughputSample& s);

}  // namespace nmmo
