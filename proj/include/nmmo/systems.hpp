#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "nmmo/world.hpp"

namespace nmmo {

// ---- Skill progression ----------------------------------------------------

/// Total XP needed to reach `level`: the sum of geometric increments
/// xp_threshold_base * growth^n for n = 0 .. level - starting_level - 1.
double xp_for_level(int level, const ProgressionParams& p);

/// Highest level whose cumulative threshold is <= xp, capped at max_level.
int level_from_xp(std::int64_t xp, const ProgressionParams& p);

/// Maxima implied by the current levels, without touching current vitals.
void apply_derived_maxima(AgentState& agent, const EnvConfig& cfg);

/// Adds XP when progression is enabled and records the touch for the
/// progression phase.
void award_xp(WorldState& world, AgentState& agent, Skill skill, int amount);

// ---- Combat ----------------------------------------------------------------

struct CombatStats {
  EntityId id = kNoEntity;
  Position position;
  std::array<int, 3> style_level{1, 1, 1};
  int defense_level = 1;
  int armor = 0;
  int health = 0;
};

CombatStats combat_stats(const AgentState& a);
CombatStats combat_stats(const NpcState& n);
const StyleParams& style_params(const CombatParams& p, CombatStyle s);

/// clamp(base_accuracy + accuracy_per_level * (style level - defense level)).
double hit_probability(const CombatStats& attacker, const CombatStats& defender, CombatStyle style,
                       const CombatParams& p);
/// Damage on hit before capping at remaining health: at least 1.
int hit_damage(const CombatStats& attacker, const CombatStats& defender, CombatStyle style,
               const CombatParams& p);

/// Draws the hit and computes dealt damage (capped at defender health).
/// Does not mutate either party. Reach and cooldown are checked by callers.
AttackOutcome resolve_attack(const CombatStats& attacker, const CombatStats& defender,
                             CombatStyle style, const CombatParams& p, WorldRng& rng);

struct AttackRequest {
  EntityId attacker = kNoEntity;
  AttackIntent intent;
};

/// Resolves requests in ascending attacker id, applying damage, XP, cooldowns
/// and NPC reactions. Rejected requests from agents are appended to dropped.
/// `killer` receives the lethal attacker for each defender brought to 0.
std::vector<AttackOutcome> attack_phase(WorldState& world, std::vector<AttackRequest> requests,
                                        std::vector<DroppedAction>& dropped,
                                        std::map<EntityId, EntityId>& killer);

// ---- Resources -------------------------------------------------------------

struct VitalsDelta {
  EntityId id = kNoEntity;
  int food = 0;
  int water = 0;
  int health = 0;
};

/// Decay, foraging, starvation and regeneration for every live agent, then
/// probabilistic regrowth of scrub.
std::vector<VitalsDelta> resource_phase(WorldState& world);

// ---- NPCs ------------------------------------------------------------------

struct NpcDecision {
  EntityId id = kNoEntity;
  std::optional<Direction> move;
  std::optional<EntityId> attack_target;  // melee
};

/// Scripted NPC behaviour by disposition.
std::vector<NpcDecision> npc_phase(WorldState& world);

/// Next step of a shortest walkable path from `from` to `to` within a square
/// window of the given radius; the target tile itself counts as walkable.
std::optional<Direction> step_toward(const WorldState& world, Position from, Position to,
                                     int radius);

/// Equipment dropped by an NPC of this level.
int npc_drop_level(int npc_level, const NpcParams& p);

// ---- Progression -----------------------------------------------------------

/// Recomputes levels for skills that gained XP this tick and refreshes the
/// derived maxima.
std::vector<LevelUp> progression_phase(WorldState& world);

// ---- Achievements ----------------------------------------------------------

/// Checks every task for one agent; returns newly completed tasks.
std::vector<AchievementUnlock> evaluate_achievements(AgentState& agent, const EnvConfig& cfg,
                                                     int map_size);
int achievement_points(Achievement a, const AchievementParams& p);

}  // namespace nmmo
