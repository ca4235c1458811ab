#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "nmmo/config.hpp"
#include "nmmo/entities.hpp"
#include "nmmo/flat_table.hpp"
#include "nmmo/rng.hpp"
#include "nmmo/tile_map.hpp"

namespace nmmo {

enum class EventKind : std::uint8_t {
  Spawn = 0,      // a: row, b: col, c: population tag
  NpcSpawn,       // a: row, b: col, c: level, d: disposition
  Attack,         // a: defender, b: style, c: damage, d: hit
  ActionDropped,  // a: DropReason
  Harvest,        // a: row, b: col, c: food gained
  Drink,          // a: water gained
  Starve,         // a: health lost
  Regen,          // a: health gained
  Regrow,         // a: row, b: col
  XpGain,         // a: skill, b: amount
  LevelUp,        // a: skill, b: new level
  EquipmentGain,  // a: new level, b: npc id
  Death,          // a: DeathCause, b: killer, c: row, d: col
  NpcDeath,       // a: DeathCause, b: killer, c: row, d: col
  Achieved,       // a: task, b: points
};
inline constexpr int kEventKindCount = 15;
std::string_view event_kind_name(EventKind k);

/// One event-log record.
struct TickEvent {
  std::int32_t tick = 0;
  EventKind kind = EventKind::Spawn;
  EntityId subject = kNoEntity;
  std::array<std::int64_t, 4> payload{};
  bool operator==(const TickEvent&) const = default;
};

enum class DeathCause : std::uint8_t { Combat = 0, Starvation = 1, Lava = 2 };

enum class DropReason : std::uint8_t {
  UnknownAgent = 0,
  TargetNotVisible,
  TargetDead,
  SelfTarget,
  OutOfReach,
  Cooldown,
  FriendlyFire,
  CombatDisabled,
  InvalidEncoding,
};
std::string_view drop_reason_name(DropReason r);

struct DroppedAction {
  EntityId id = kNoEntity;
  DropReason reason = DropReason::UnknownAgent;
  bool operator==(const DroppedAction&) const = default;
};

struct AttackOutcome {
  EntityId attacker = kNoEntity;
  EntityId defender = kNoEntity;
  CombatStyle style = CombatStyle::Melee;
  bool hit = false;
  int damage = 0;
  int xp_awarded = 0;
  bool lethal = false;
  bool operator==(const AttackOutcome&) const = default;
};

struct DeathRecord {
  EntityId id = kNoEntity;
  bool is_npc = false;
  DeathCause cause = DeathCause::Starvation;
  EntityId killer = kNoEntity;
  Position position;
};

struct LevelUp {
  EntityId id = kNoEntity;
  Skill skill = Skill::Hunting;
  int old_level = 1;
  int new_level = 1;
};

struct AchievementUnlock {
  EntityId id = kNoEntity;
  Achievement task = Achievement::FirstArmor;
  int points = 0;
};

struct TickReport {
  int tick = 0;  // index of the tick just processed
  std::vector<EntityId> acted;  // agents live at the start of the tick
  std::vector<DeathRecord> deaths;
  std::vector<AgentState> dead_agents;  // final states of agents that died
  std::vector<AttackOutcome> attacks;
  std::vector<LevelUp> level_ups;
  std::vector<AchievementUnlock> achievements;
  std::vector<DroppedAction> dropped;
  std::vector<EntityId> spawned;
  std::size_t first_event = 0;  // this tick's events are event_log[first_event, end)
};

/// Movement conflict resolution rule. LowestIdWins is the engine rule; the
/// alternative exists so replays can be checked against a drifted engine.
enum class TieBreak : std::uint8_t { LowestIdWins = 0, HighestIdWins = 1 };

struct EngineOptions {
  TieBreak tie_break = TieBreak::LowestIdWins;
  bool check_invariants = false;  // verify invariants after every tick
  int compaction_interval = 64;
};

struct ResetOptions {
  /// Population tag per slot; empty gives every agent its own tag (its id).
  std::vector<int> slot_population;
};

class SpawnError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct WorldState {
  EnvConfig config;
  EngineOptions options;
  ResetOptions reset_options;
  TileMap map;
  int tick = 0;
  std::vector<AgentState> agents;  // live agents, ascending id
  std::vector<NpcState> npcs;      // live npcs, ascending id
  WorldRng rng;
  FlatStateTable flat;
  std::vector<TickEvent> event_log;
  EntityId next_entity_id = 1;
  int agents_spawned = 0;
  std::vector<std::uint32_t> scrub_tiles;  // ascending tile index
  std::vector<Position> dirty_tiles;
  std::vector<std::pair<EntityId, Skill>> xp_touched;  // cleared every tick

  [[nodiscard]] AgentState* find_agent(EntityId id);
  [[nodiscard]] const AgentState* find_agent(EntityId id) const;
  [[nodiscard]] NpcState* find_npc(EntityId id);
  [[nodiscard]] const NpcState* find_npc(EntityId id) const;

  void set_material(Position p, Material m);
  void set_occupant(Position p, EntityId id);
  void log(EventKind kind, EntityId subject, std::int64_t a = 0, std::int64_t b = 0,
           std::int64_t c = 0, std::int64_t d = 0);

  [[nodiscard]] bool horizon_reached() const { return tick >= config.episode_horizon; }
  /// Terminal: horizon reached, or no live agents and none can spawn.
  [[nodiscard]] bool episode_over() const;
};

/// Places the initial population and NPCs. Throws SpawnError when the spawn
/// ring cannot hold a concurrent population.
WorldState reset(const EnvConfig& config, const TileMap& map, EngineOptions options = {},
                 ResetOptions reset_options = {});

/// Advances one tick. Phase order: npc decisions, attacks, movement,
/// resources and vitals, progression, deaths and loot, spawning, flat-table
/// refresh. Malformed entries are dropped and listed in the report.
TickReport tick(WorldState& world, const std::map<EntityId, ActionSet>& actions);

/// Order-independent state hash over tick, rng, entities and tiles.
std::uint64_t digest(const WorldState& world);

/// Throws InvariantViolation (with a tail of the event log) on breach.
void check_invariants(const WorldState& world);

/// Dump of the most recent events, for diagnostics.
std::string dump_events(const WorldState& world, std::size_t max_events = 64);

/// Agent stats at spawn: vitals, maxima, skills.
AgentState make_agent(const EnvConfig& cfg, EntityId id, Position pos, int tick);

// Scenario construction, for tests and tools. Each places a new entity on a
// free walkable tile, keeps the flat table current and returns the entity.
AgentState& place_agent_at(WorldState& world, Position pos);
NpcState& place_npc_at(WorldState& world, Position pos, int level, Disposition disposition);

/// An empty world on `map`: no agents, no npcs, fresh rng.
WorldState empty_world(const EnvConfig& config, const TileMap& map, EngineOptions options = {});

/// Rewrites the flat table from the object state.
void rebuild_flat(WorldState& world);

}  // namespace nmmo
