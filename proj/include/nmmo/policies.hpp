#pragma once

#include <algorithm>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nmmo/config.hpp"
#include "nmmo/entities.hpp"
#include "nmmo/observation.hpp"
#include "nmmo/rng.hpp"

namespace nmmo {

enum class PolicyKind : std::uint8_t { Meander, Forage, Combat };

struct PolicySpec {
  PolicyKind kind = PolicyKind::Forage;
  bool explore_bias = true;
  int forage_horizon = 16;  // ticks
  double aggression_margin = 0.0;
  std::string name = "forage";
};

/// Presets: meander, forage, forage-noexplore, combat, combat-noexplore.
PolicySpec policy_preset(std::string_view name);
const std::vector<std::string>& policy_preset_names();

/// Game rules a scripted policy needs besides its observation.
struct PolicyContext {
  int map_size = 0;
  ResourceParams resource;
  CombatParams combat;
  ProgressionParams progression;
  bool combat_enabled = true;
  bool resource_enabled = true;

  static PolicyContext from(const EnvConfig& cfg);
};

/// Local tile grid of an observation: materials and occupancy, centred on
/// the observing agent.
class Crop {
 public:
  explicit Crop(const Observation& obs);

  [[nodiscard]] int side() const { return side_; }
  [[nodiscard]] int radius() const { return side_ / 2; }
  [[nodiscard]] int center() const { return (side_ * side_) / 2; }
  [[nodiscard]] Material material(int i) const { return static_cast<Material>(material_[i]); }
  [[nodiscard]] bool occupied(int i) const { return occupied_[i] != 0; }
  /// Walkable, not lava, and free of other entities (the self tile counts).
  [[nodiscard]] bool passable(int i) const;
  [[nodiscard]] bool next_to_water(int i) const;
  [[nodiscard]] int neighbor(int i, Direction d) const;  // -1 outside the crop
  [[nodiscard]] Position absolute(int i) const { return {origin_.row + i / side_, origin_.col + i % side_}; }
  [[nodiscard]] Position self() const { return absolute(center()); }

 private:
  int side_ = 0;
  Position origin_;
  std::vector<std::uint8_t> material_;
  std::vector<std::uint8_t> occupied_;
};

inline constexpr int kUnreachable = 1 << 29;

/// Multi-source Dijkstra over passable crop tiles with unit step costs.
std::vector<int> crop_distances(const Crop& crop, const std::vector<int>& sources);

/// Projected (food, water) after following `path` (one crop index per tick)
/// in a static world, with foraged forest tiles removed after their harvest.
/// `low` is the lowest of food and water seen along the way.
struct Vitals {
  int food = 0;
  int water = 0;
  int max_food = 0;
  int max_water = 0;
  int low = 0;
};
Vitals simulate_path(const Crop& crop, Vitals start, const std::vector<int>& path, const PolicyContext& ctx);

/// Forage objective, compared lexicographically: the lowest vital over the
/// horizon, then min(food, water) at the horizon.
inline std::pair<int, int> plan_score(const Vitals& v) { return {v.low, std::min(v.food, v.water)}; }

ActionSet meander_act(const Observation& obs, CounterRng& rng);
ActionSet forage_act(const Observation& obs, const PolicySpec& spec, const PolicyContext& ctx, CounterRng& rng);
ActionSet combat_act(const Observation& obs, const PolicySpec& spec, const PolicyContext& ctx, CounterRng& rng);
ActionSet scripted_act(const Observation& obs, const PolicySpec& spec, const PolicyContext& ctx, CounterRng& rng);

/// Strength estimate from an entity row: combat levels, equipment and
/// health fraction with the default weights 1, 2 and 5.
double strength(const EntityRow& row);

/// A policy controlling one population of agents. Implementations may keep
/// per-agent state; scripted policies only use the rng.
class Policy {
 public:
  virtual ~Policy() = default;
  [[nodiscard]] virtual std::string name() const = 0;
  virtual ActionSet act(const Observation& obs, const PolicyContext& ctx, CounterRng& rng) = 0;
};

class ScriptedPolicy final : public Policy {
 public:
  explicit ScriptedPolicy(PolicySpec spec) : spec_(std::move(spec)) {}
  [[nodiscard]] std::string name() const override { return spec_.name; }
  ActionSet act(const Observation& obs, const PolicyContext& ctx, CounterRng& rng) override {
    return scripted_act(obs, spec_, ctx, rng);
  }
  [[nodiscard]] const PolicySpec& spec() const { return spec_; }

 private:
  PolicySpec spec_;
};

std::unique_ptr<Policy> make_policy(std::string_view preset);

}  // namespace nmmo
