#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace nmmo {

enum class GameSystem : std::uint8_t { Resource, Combat, Progression, NpcEquipment };

/// Toggle set over the four game systems.
struct SystemSet {
  bool resource = true;
  bool combat = true;
  bool progression = true;
  bool npc_equipment = true;

  [[nodiscard]] bool enabled(GameSystem s) const {
    switch (s) {
      case GameSystem::Resource: return resource;
      case GameSystem::Combat: return combat;
      case GameSystem::Progression: return progression;
      case GameSystem::NpcEquipment: return npc_equipment;
    }
    return false;
  }
  bool operator==(const SystemSet&) const = default;
};

enum class SpawnMode : std::uint8_t { Continuous, Concurrent };
enum class RewardMode : std::uint8_t { Survival, Achievement };

struct ResourceParams {
  int start_food = 32;
  int max_food = 32;
  int start_water = 32;
  int max_water = 32;
  int start_health = 10;
  int max_health = 10;
  int food_decay_per_tick = 1;
  int water_decay_per_tick = 1;
  int health_loss_when_starving = 1;  // per depleted vital per tick
  int health_regen_per_tick = 1;
  int regen_threshold = 16;  // food and water must both be >= this to regenerate
  int food_per_harvest = 16;
  int water_per_drink = 16;
  double forest_regen_probability = 0.02;

  bool operator==(const ResourceParams&) const = default;
};

struct StyleParams {
  int reach = 1;  // Chebyshev tiles
  int base_damage = 1;
  double base_accuracy = 0.7;

  bool operator==(const StyleParams&) const = default;
};

struct CombatParams {
  StyleParams melee{1, 3, 0.7};
  StyleParams range{3, 2, 0.6};
  StyleParams mage{4, 1, 0.6};
  int attack_cooldown = 0;
  double accuracy_per_level = 0.02;
  double damage_per_level = 0.1;
  double accuracy_min = 0.05;
  double accuracy_max = 0.95;
  bool friendly_fire = false;

  bool operator==(const CombatParams&) const = default;
};

struct ProgressionParams {
  int starting_level = 1;
  int max_level = 99;
  int xp_per_harvest = 10;
  int xp_per_hit = 10;
  int xp_threshold_base = 40;
  double xp_threshold_growth = 1.2;
  int capacity_per_level = 2;  // extra max food/water per Hunting/Fishing level
  int health_per_level = 1;    // extra max health per Constitution level

  bool operator==(const ProgressionParams&) const = default;
};

struct NpcParams {
  int npc_cap = 64;
  int level_min = 1;
  int level_max = 10;
  std::array<double, 3> disposition_weights{0.5, 0.3, 0.2};  // Passive, Neutral, Hostile
  double armor_per_level = 0.5;
  int base_health = 5;
  int health_per_level = 1;
  int vision_radius = 4;
  int leash_radius = 8;
  int wander_radius = 4;
  int flee_duration = 8;
  double neutral_drift_probability = 0.1;

  bool operator==(const NpcParams&) const = default;
};

struct WorldgenParams {
  int octaves_min = 1;
  int octaves_max = 6;
  double base_frequency = 1.0 / 24.0;
  double lacunarity = 2.0;
  double persistence = 0.5;
  double modulation_frequency = 1.0 / 96.0;
  /// Cut points water|grass|forest|stone, strictly increasing in [-1, 1].
  std::array<double, 3> tile_thresholds{-0.25, 0.1, 0.3};
  int border_width = 8;

  bool operator==(const WorldgenParams&) const = default;
};

struct AchievementParams {
  int small_points = 1;
  int medium_points = 3;
  int large_points = 7;
  int forage_level_small = 5;
  int forage_level_medium = 10;
  int travel_small = 32;
  int travel_medium = 64;
  int kills_small = 1;
  int kills_medium = 3;
  int traverse_margin = 8;  // depth of the opposite border region, in tiles

  bool operator==(const AchievementParams&) const = default;
};

struct EnvConfig {
  int map_size = 128;
  int population_cap = 256;
  int vision_range = 7;
  int episode_horizon = 1024;
  SystemSet systems_enabled;
  SpawnMode spawn_mode = SpawnMode::Concurrent;
  RewardMode reward_mode = RewardMode::Survival;
  ResourceParams resource_params;
  CombatParams combat_params;
  ProgressionParams progression_params;
  NpcParams npc_params;
  WorldgenParams worldgen_params;
  AchievementParams achievement_params;
  std::uint64_t seed = 0;

  bool operator==(const EnvConfig&) const = default;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws ConfigError naming the first violated field and constraint.
void validate(const EnvConfig& cfg);

/// Parses a JSON config document. Missing keys take defaults; unknown keys
/// are rejected.
EnvConfig load_config(std::string_view document);
EnvConfig load_config_file(const std::string& path);

/// Inverse of load_config: renders every field.
std::string render_config(const EnvConfig& cfg);

/// "SmallMaps" or "LargeMaps".
EnvConfig canonical(std::string_view name);

/// Stable 64-bit hash of the rendered config.
std::uint64_t config_digest(const EnvConfig& cfg);

}  // namespace nmmo
