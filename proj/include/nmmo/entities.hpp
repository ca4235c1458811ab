#pragma once

#include <cstdint>
#include <optional>

#include "nmmo/types.hpp"

namespace nmmo {

enum class Achievement : std::uint8_t {
  FirstArmor = 0,
  ForageSmall,
  ForageMedium,
  TravelSmall,
  TravelMedium,
  DefeatSmall,
  DefeatMedium,
  TraverseMap,
};
inline constexpr int kAchievementCount = 8;
std::string_view achievement_name(Achievement a);

/// Once-per-episode milestones for one agent.
struct AchievementDiary {
  std::uint32_t completed = 0;  // bit i set <=> task i done
  int score = 0;

  [[nodiscard]] bool has(Achievement a) const {
    return (completed >> static_cast<unsigned>(a)) & 1U;
  }
  /// Marks a task; returns false if it was already complete.
  bool complete(Achievement a, int points) {
    if (has(a)) return false;
    completed |= 1U << static_cast<unsigned>(a);
    score += points;
    return true;
  }
  bool operator==(const AchievementDiary&) const = default;
};

struct AgentState {
  EntityId id = kNoEntity;
  int population_tag = 0;
  int slot = 0;  // population slot (spawn index modulo population cap)
  Position position;
  Position spawn_position;
  int spawn_tick = 0;
  int health = 0;
  int food = 0;
  int water = 0;
  int max_health = 0;
  int max_food = 0;
  int max_water = 0;
  SkillSet skills;
  int equipment_level = 0;
  bool alive = true;
  int lifetime = 0;
  int kills = 0;
  int next_attack_tick = 0;
  AchievementDiary diary;

  [[nodiscard]] int attack_cooldown_remaining(int tick) const {
    return next_attack_tick > tick ? next_attack_tick - tick : 0;
  }
  bool operator==(const AgentState&) const = default;
};

enum class NpcMode : std::uint8_t { Idle = 0, Flee = 1, Pursue = 2 };

struct NpcState {
  EntityId id = kNoEntity;
  Position position;
  Position home_position;
  int level = 1;
  Disposition disposition = Disposition::Passive;
  int health = 0;
  int max_health = 0;
  int armor_level = 0;
  NpcMode mode = NpcMode::Idle;
  EntityId mode_target = kNoEntity;  // flee source or pursuit target
  int mode_ticks = 0;
  int next_attack_tick = 0;

  bool operator==(const NpcState&) const = default;
};

struct AttackIntent {
  CombatStyle style = CombatStyle::Melee;
  EntityId target = kNoEntity;
  bool operator==(const AttackIntent&) const = default;
};

/// One agent's submission for a tick: at most one move and one attack.
struct ActionSet {
  std::optional<Direction> move;
  std::optional<AttackIntent> attack;
  bool operator==(const ActionSet&) const = default;
};

}  // namespace nmmo
