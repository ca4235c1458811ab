#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nmmo/observation.hpp"
#include "nmmo/world.hpp"

namespace nmmo {

// ---- Rewards ---------------------------------------------------------------

/// What a reward function may read: the world after the tick, the tick's
/// report, and agent positions at the start of the tick.
struct RewardContext {
  const WorldState& world;
  const TickReport& report;
  const std::map<EntityId, Position>& previous_positions;

  /// State after the tick for any agent that acted, live or just dead.
  [[nodiscard]] const AgentState* agent(EntityId id) const;
  [[nodiscard]] bool died(EntityId id) const;
};

/// Rewards per agent that acted this tick. Missing ids read as 0.
using RewardFn = std::function<std::map<EntityId, double>(const RewardContext&)>;

/// -1 for an agent that died this tick, 0 otherwise.
double survival_reward(EntityId id, const TickReport& report);
/// Points of tasks first completed this tick.
double achievement_reward(EntityId id, const TickReport& report);

std::map<EntityId, double> survival_rewards(const RewardContext& ctx);
std::map<EntityId, double> achievement_rewards(const RewardContext& ctx);

// ---- Lifetime logs ---------------------------------------------------------

struct LifetimeLog {
  EntityId id = kNoEntity;
  nlohmann::json metrics;  // numeric or nested values keyed by name
};

/// Extra user data recorded in the log at the end of a lifetime.
using LifetimeLogger = std::function<nlohmann::json(const AgentState&, const WorldState&)>;

/// Standard end-of-lifetime metrics: lifetime, kills, equipment, explore
/// (L1 distance from spawn), forage (mean Hunting/Fishing level),
/// achievement score, skill levels, cause of death.
nlohmann::json lifetime_metrics(const AgentState& agent, std::optional<DeathCause> cause);

/// One JSON object per line.
void write_lifetime_logs(const std::vector<LifetimeLog>& logs, std::ostream& out);
std::vector<LifetimeLog> read_lifetime_logs(std::istream& in);

// ---- Overlays --------------------------------------------------------------

struct Overlay {
  std::string name;
  int size = 0;
  std::vector<double> values;  // row-major size*size

  [[nodiscard]] double at(Position p) const { return values[static_cast<std::size_t>(p.row) * size + p.col]; }
  double& at(Position p) { return values[static_cast<std::size_t>(p.row) * size + p.col]; }
  [[nodiscard]] double total() const;
  bool operator==(const Overlay&) const = default;
};

class OverlayError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr const char* kVisitationOverlay = "visitation";
inline constexpr const char* kDeathsOverlay = "deaths";

/// Named heatmaps. Visitation and deaths are maintained by the environment;
/// user overlays are replaced wholesale by update().
class OverlaySet {
 public:
  explicit OverlaySet(int map_size = 0);

  void update(const std::string& name, std::vector<double> grid);
  /// Folds one tick: +1 visitation per surviving agent, +1 per agent death.
  void record_tick(const WorldState& world, const TickReport& report);
  [[nodiscard]] const Overlay& get(const std::string& name) const;
  [[nodiscard]] std::vector<Overlay> render() const;
  [[nodiscard]] int map_size() const { return size_; }

 private:
  int size_ = 0;
  std::map<std::string, Overlay> overlays_;
};

/// CSV grid, one map row per line, values printed with full precision.
void write_overlay_csv(const Overlay& o, const std::filesystem::path& path);
Overlay read_overlay_csv(const std::filesystem::path& path, const std::string& name);
/// 8-bit graymap scaled to the overlay maximum.
void write_overlay_pgm(const Overlay& o, const std::filesystem::path& path);

// ---- Environment -----------------------------------------------------------

struct StepResult {
  /// Agents live after the step. Points into the environment; valid until
  /// the next step or reset.
  const std::map<EntityId, Observation>* observations = nullptr;
  std::map<EntityId, double> rewards;            // agents that acted
  std::map<EntityId, bool> dones;                // agents that acted
  std::map<EntityId, nlohmann::json> infos;      // dropped actions, lifetime logs
  TickReport report;
  bool episode_over = false;
};

/// Multi-agent environment over a map pool: reset samples a map, step
/// advances one tick and returns per-agent observations, rewards and dones.
class Environment {
 public:
  Environment(EnvConfig config, std::vector<TileMap> pool, EngineOptions options = {});
  /// Pool of one map generated from config.seed.
  explicit Environment(EnvConfig config, EngineOptions options = {});

  /// Starts an episode. The map is pool[episode_seed mod pool size] and the
  /// world rng is keyed by episode_seed. Without a seed, the seeds
  /// config.seed, config.seed + 1, ... are used in turn.
  const std::map<EntityId, Observation>& reset(std::optional<std::uint64_t> episode_seed = {},
                                                ResetOptions reset_options = {});

  /// `pre_dropped` lists entries the caller already rejected (for example
  /// undecodable actions); they are reported in infos alongside engine drops.
  StepResult step(const std::map<EntityId, ActionSet>& actions,
                  const std::vector<DroppedAction>& pre_dropped = {});

  /// Replaces the active reward function; returns a handle counting
  /// registrations. Survival or achievement is active by config otherwise.
  int register_reward(RewardFn fn);
  void set_lifetime_logger(LifetimeLogger logger) { logger_ = std::move(logger); }

  void update_overlay(const std::string& name, std::vector<double> grid) { overlays_.update(name, std::move(grid)); }
  [[nodiscard]] const OverlaySet& overlays() const { return overlays_; }
  [[nodiscard]] std::vector<Overlay> render_overlays() const { return overlays_.render(); }

  [[nodiscard]] const WorldState& world() const { return *world_; }
  [[nodiscard]] const EnvConfig& config() const { return config_; }
  [[nodiscard]] const std::vector<TileMap>& pool() const { return pool_; }
  [[nodiscard]] const std::map<EntityId, Observation>& observations() const { return observations_; }
  [[nodiscard]] const std::vector<LifetimeLog>& lifetime_logs() const { return logs_; }
  [[nodiscard]] std::uint64_t episode_seed() const { return episode_seed_; }
  [[nodiscard]] bool episode_over() const { return world_ && world_->episode_over(); }

 private:
  void refresh_observations();
  LifetimeLog make_log(const AgentState& a, std::optional<DeathCause> cause) const;

  EnvConfig config_;
  EngineOptions options_;
  std::vector<TileMap> pool_;
  std::optional<WorldState> world_;
  RewardFn reward_;
  int reward_handle_ = 0;
  LifetimeLogger logger_;
  OverlaySet overlays_;
  std::map<EntityId, Observation> observations_;
  std::vector<LifetimeLog> logs_;
  std::uint64_t next_seed_ = 0;
  std::uint64_t episode_seed_ = 0;
};

}  // namespace nmmo
