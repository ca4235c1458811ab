#include "nmmo/world.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

#include "nmmo/hash.hpp"
#include "nmmo/observation.hpp"
#include "nmmo/systems.hpp"

namespace nmmo {

std::string_view material_name(Material m) {
  switch (m) {
    case Material::Grass: return "grass";
    case Material::Forest: return "forest";
    case Material::Scrub: return "scrub";
    case Material::Stone: return "stone";
    case Material::Water: return "water";
    case Material::Lava: return "lava";
  }
  return "?";
}

std::string_view skill_name(Skill s) {
  static constexpr std::array<std::string_view, kSkillCount> kNames{
      "hunting", "fishing", "constitution", "melee", "range", "mage", "defense"};
  return kNames[static_cast<std::size_t>(s)];
}

std::string_view style_name(CombatStyle s) {
  static constexpr std::array<std::string_view, 3> kNames{"melee", "range", "mage"};
  return kNames[static_cast<std::size_t>(s)];
}

std::string_view direction_name(Direction d) {
  static constexpr std::array<std::string_view, 4> kNames{"north", "south", "east", "west"};
  return kNames[static_cast<std::size_t>(d)];
}

std::string_view achievement_name(Achievement a) {
  static constexpr std::array<std::string_view, kAchievementCount> kNames{
      "first_armor", "forage_small", "forage_medium", "travel_small",
      "travel_medium", "defeat_small", "defeat_medium", "traverse_map"};
  return kNames[static_cast<std::size_t>(a)];
}

std::string_view event_kind_name(EventKind k) {
  static constexpr std::array<std::string_view, kEventKindCount> kNames{
      "spawn", "npc_spawn", "attack", "action_dropped", "harvest", "drink", "starve", "regen",
      "regrow", "xp_gain", "level_up", "equipment_gain", "death", "npc_death", "achieved"};
  return kNames[static_cast<std::size_t>(k)];
}

std::string_view drop_reason_name(DropReason r) {
  static constexpr std::array<std::string_view, 9> kNames{
      "unknown_agent", "target_not_visible", "target_dead", "self_target", "out_of_reach",
      "cooldown", "friendly_fire", "combat_disabled", "invalid_encoding"};
  return kNames[static_cast<std::size_t>(r)];
}

namespace {

template <class T>
T* find_by_id(std::vector<T>& v, EntityId id) {
  auto it = std::lower_bound(v.begin(), v.end(), id, [](const T& e, EntityId i) { return e.id < i; });
  return it != v.end() && it->id == id ? &*it : nullptr;
}

}  // namespace

AgentState* WorldState::find_agent(EntityId id) { return find_by_id(agents, id); }
const AgentState* WorldState::find_agent(EntityId id) const {
  return find_by_id(const_cast<std::vector<AgentState>&>(agents), id);
}
NpcState* WorldState::find_npc(EntityId id) { return find_by_id(npcs, id); }
const NpcState* WorldState::find_npc(EntityId id) const {
  return find_by_id(const_cast<std::vector<NpcState>&>(npcs), id);
}

void WorldState::set_material(Position p, Material m) {
  map.at(p).material = m;
  dirty_tiles.push_back(p);
}

void WorldState::set_occupant(Position p, EntityId id) {
  map.at(p).occupant = id;
  dirty_tiles.push_back(p);
}

void WorldState::log(EventKind kind, EntityId subject, std::int64_t a, std::int64_t b,
                     std::int64_t c, std::int64_t d) {
  event_log.push_back(TickEvent{tick, kind, subject, {a, b, c, d}});
}

bool WorldState::episode_over() const {
  if (horizon_reached()) return true;
  return agents.empty() && config.spawn_mode == SpawnMode::Concurrent;
}

AgentState make_agent(const EnvConfig& cfg, EntityId id, Position pos, int tick) {
  AgentState a;
  a.id = id;
  a.position = pos;
  a.spawn_position = pos;
  a.spawn_tick = tick;
  for (auto& s : a.skills.skills) s.level = cfg.progression_params.starting_level;
  apply_derived_maxima(a, cfg);
  const auto& r = cfg.resource_params;
  if (cfg.systems_enabled.resource) {
    a.food = r.start_food;
    a.water = r.start_water;
    a.health = r.start_health;
  } else {
    a.food = a.max_food;
    a.water = a.max_water;
    a.health = a.max_health;
  }
  return a;
}

namespace {

void place_agent(WorldState& w, Position pos, int born_tick) {
  const EntityId id = w.next_entity_id++;
  AgentState a = make_agent(w.config, id, pos, born_tick);
  a.slot = w.agents_spawned % w.config.population_cap;
  const auto& pops = w.reset_options.slot_population;
  a.population_tag = pops.empty() ? id : pops[static_cast<std::size_t>(a.slot) % pops.size()];
  ++w.agents_spawned;
  w.set_occupant(pos, id);
  w.log(EventKind::Spawn, id, pos.row, pos.col, a.population_tag);
  w.agents.push_back(a);
}

bool npc_spawnable(const WorldState& w, Position p) {
  if (!w.map.in_bounds(p) || w.map.in_border(p)) return false;
  const auto& t = w.map.at(p);
  if (!is_walkable(t.material) || t.occupant != kNoEntity) return false;
  // Keep the spawn ring clear for agents.
  for (Direction d : kDirections) {
    const Position q = step(p, d);
    if (!w.map.in_bounds(q) || w.map.in_border(q)) return false;
  }
  return true;
}

Disposition sample_disposition(WorldState& w) {
  const auto& wts = w.config.npc_params.disposition_weights;
  const double total = wts[0] + wts[1] + wts[2];
  const double u = w.rng.uniform(RngStream::Spawn) * total;
  if (u < wts[0]) return Disposition::Passive;
  if (u < wts[0] + wts[1]) return Disposition::Neutral;
  return Disposition::Hostile;
}

/// Passive npcs take the lowest third of the level range, hostile the top.
int sample_npc_level(WorldState& w, Disposition d) {
  const auto& p = w.config.npc_params;
  const int span = p.level_max - p.level_min + 1;
  const int band = static_cast<int>(d);
  const int lo = p.level_min + span * band / 3;
  const int hi = std::max(lo, p.level_min + span * (band + 1) / 3 - 1);
  return lo + static_cast<int>(w.rng.below(RngStream::Spawn, static_cast<std::uint64_t>(hi - lo + 1)));
}

void spawn_npc(WorldState& w, Position p, int level, Disposition disposition);

bool try_spawn_npc(WorldState& w) {
  const int n = w.map.size();
  const Position p{static_cast<int>(w.rng.below(RngStream::Spawn, static_cast<std::uint64_t>(n))),
                   static_cast<int>(w.rng.below(RngStream::Spawn, static_cast<std::uint64_t>(n)))};
  if (!npc_spawnable(w, p)) return false;
  const Disposition d = sample_disposition(w);
  spawn_npc(w, p, sample_npc_level(w, d), d);
  return true;
}

void spawn_npc(WorldState& w, Position p, int level, Disposition disposition) {
  NpcState npc;
  npc.id = w.next_entity_id++;
  npc.position = p;
  npc.home_position = p;
  npc.disposition = disposition;
  npc.level = level;
  const auto& np = w.config.npc_params;
  npc.max_health = np.base_health + np.health_per_level * npc.level;
  npc.health = npc.max_health;
  npc.armor_level = npc_drop_level(npc.level, np);
  w.set_occupant(p, npc.id);
  w.log(EventKind::NpcSpawn, npc.id, p.row, p.col, npc.level, static_cast<int>(npc.disposition));
  w.npcs.push_back(npc);
}

std::vector<Position> free_ring_tiles(const WorldState& w) {
  std::vector<Position> free;
  for (const Position& p : w.map.spawn_ring())
    if (w.map.at(p).occupant == kNoEntity) free.push_back(p);
  return free;
}

void refresh_flat(WorldState& w) {
  for (const Position& p : w.dirty_tiles) w.flat.write_tile(w.map, p);
  w.dirty_tiles.clear();
  for (const auto& a : w.agents) w.flat.agents.upsert(serialize_agent(a));
  for (const auto& n : w.npcs) w.flat.npcs.upsert(serialize_npc(n));
}

struct Mover {
  EntityId id;
  Position from;
  Position to;
  bool is_agent;
};

/// Simultaneous movement. Each destination goes to one claimant (lowest id
/// under LowestIdWins); a claim into an occupied tile succeeds only if the
/// occupant itself moves away. Cycles fail. Moving onto lava kills.
void movement_phase(WorldState& w, std::vector<Mover> movers, std::set<EntityId>& lava_deaths) {
  if (movers.empty()) return;
  std::sort(movers.begin(), movers.end(), [&](const Mover& a, const Mover& b) {
    return w.options.tie_break == TieBreak::LowestIdWins ? a.id < b.id : a.id > b.id;
  });
  std::map<std::size_t, std::size_t> winner;  // destination tile -> mover index
  for (std::size_t i = 0; i < movers.size(); ++i) {
    winner.try_emplace(w.map.index(movers[i].to), i);
  }
  std::map<EntityId, std::size_t> by_id;
  for (std::size_t i = 0; i < movers.size(); ++i) by_id[movers[i].id] = i;

  enum : std::uint8_t { kUnknown, kVisiting, kOk, kFail };
  std::vector<std::uint8_t> state(movers.size(), kUnknown);
  std::vector<std::size_t> stack;
  auto resolve = [&](std::size_t start) {
    // Iterative chain walk: mover -> occupant of its destination -> ...
    std::size_t cur = start;
    while (true) {
      if (state[cur] == kOk || state[cur] == kFail) break;
      if (state[cur] == kVisiting) {  // cycle
        for (std::size_t s : stack) state[s] = kFail;
        stack.clear();
        return;
      }
      const Mover& m = movers[cur];
      if (winner.at(w.map.index(m.to)) != cur) {
        state[cur] = kFail;
        break;
      }
      if (w.map.at(m.to).material == Material::Lava) {
        state[cur] = kOk;
        break;
      }
      const EntityId occ = w.map.at(m.to).occupant;
      if (occ == kNoEntity) {
        state[cur] = kOk;
        break;
      }
      auto it = by_id.find(occ);
      if (it == by_id.end()) {
        state[cur] = kFail;
        break;
      }
      state[cur] = kVisiting;
      stack.push_back(cur);
      cur = it->second;
    }
    const std::uint8_t result = state[cur];
    while (!stack.empty()) {
      state[stack.back()] = result;
      stack.pop_back();
    }
  };
  for (std::size_t i = 0; i < movers.size(); ++i) resolve(i);

  // Vacate first, then occupy.
  for (std::size_t i = 0; i < movers.size(); ++i) {
    if (state[i] == kOk) w.set_occupant(movers[i].from, kNoEntity);
  }
  for (std::size_t i = 0; i < movers.size(); ++i) {
    if (state[i] != kOk) continue;
    const Mover& m = movers[i];
    if (w.map.at(m.to).material == Material::Lava) {
      if (m.is_agent) {
        AgentState* a = w.find_agent(m.id);
        a->health = 0;
        lava_deaths.insert(m.id);
      } else {
        NpcState* n = w.find_npc(m.id);
        n->health = 0;
        lava_deaths.insert(m.id);
      }
      continue;
    }
    w.set_occupant(m.to, m.id);
    if (m.is_agent) w.find_agent(m.id)->position = m.to;
    else w.find_npc(m.id)->position = m.to;
  }
}

bool visible(const WorldState& w, const AgentState& viewer, Position target) {
  return chebyshev(viewer.position, target) <= w.config.vision_range;
}

}  // namespace

WorldState empty_world(const EnvConfig& config, const TileMap& map, EngineOptions options) {
  if (map.size() != config.map_size) throw SpawnError("map size does not match config");
  WorldState w;
  w.config = config;
  w.options = options;
  w.map = map;
  for (auto& t : w.map.tiles()) t.occupant = kNoEntity;
  w.rng = WorldRng(hash_combine(config.seed, map.seed()));
  w.flat.init(w.map, config.vision_range);
  for (std::size_t i = 0; i < w.map.tiles().size(); ++i) {
    if (w.map.tiles()[i].material == Material::Scrub) w.scrub_tiles.push_back(static_cast<std::uint32_t>(i));
  }
  return w;
}

void rebuild_flat(WorldState& w) {
  w.flat.init(w.map, w.config.vision_range);
  w.dirty_tiles.clear();
  for (const auto& a : w.agents) w.flat.agents.upsert(serialize_agent(a));
  for (const auto& n : w.npcs) w.flat.npcs.upsert(serialize_npc(n));
}

namespace {

void require_free(const WorldState& w, Position pos) {
  if (!w.map.in_bounds(pos) || !is_walkable(w.map.at(pos).material) ||
      w.map.at(pos).occupant != kNoEntity)
    throw SpawnError("tile (" + std::to_string(pos.row) + "," + std::to_string(pos.col) +
                     ") is not a free walkable tile");
}

}  // namespace

AgentState& place_agent_at(WorldState& w, Position pos) {
  require_free(w, pos);
  place_agent(w, pos, w.tick);
  refresh_flat(w);
  return w.agents.back();
}

NpcState& place_npc_at(WorldState& w, Position pos, int level, Disposition disposition) {
  require_free(w, pos);
  spawn_npc(w, pos, level, disposition);
  refresh_flat(w);
  return w.npcs.back();
}

WorldState reset(const EnvConfig& config, const TileMap& map, EngineOptions options,
                 ResetOptions reset_options) {
  WorldState w = empty_world(config, map, options);
  w.reset_options = std::move(reset_options);

  std::vector<Position> ring = w.map.spawn_ring();
  const int cohort = config.spawn_mode == SpawnMode::Concurrent ? config.population_cap : 1;
  if (static_cast<int>(ring.size()) < cohort)
    throw SpawnError("spawn ring has " + std::to_string(ring.size()) + " tiles; need " +
                     std::to_string(cohort));
  // Partial Fisher-Yates: first `cohort` entries are a uniform sample.
  for (int i = 0; i < cohort; ++i) {
    const auto j = i + static_cast<int>(w.rng.below(RngStream::Spawn, ring.size() - static_cast<std::size_t>(i)));
    std::swap(ring[static_cast<std::size_t>(i)], ring[static_cast<std::size_t>(j)]);
    place_agent(w, ring[static_cast<std::size_t>(i)], 0);
  }

  if (config.systems_enabled.npc_equipment) {
    const int cap = config.npc_params.npc_cap;
    for (int attempts = 0; static_cast<int>(w.npcs.size()) < cap && attempts < cap * 20; ++attempts) {
      try_spawn_npc(w);
    }
  }
  refresh_flat(w);
  return w;
}

TickReport tick(WorldState& w, const std::map<EntityId, ActionSet>& actions) {
  TickReport report;
  report.tick = w.tick;
  report.first_event = w.event_log.size();
  const auto& sys = w.config.systems_enabled;
  report.acted.reserve(w.agents.size());
  for (const auto& a : w.agents) report.acted.push_back(a.id);

  // Validate submissions against the state observed at the start of the tick.
  std::vector<AttackRequest> attacks;
  std::vector<Mover> movers;
  for (const auto& [id, act] : actions) {
    const AgentState* a = w.find_agent(id);
    if (!a) {
      report.dropped.push_back({id, DropReason::UnknownAgent});
      continue;
    }
    if (act.move) {
      const Position to = step(a->position, *act.move);
      if (w.map.in_bounds(to) && !is_obstacle(w.map.at(to).material))
        movers.push_back({id, a->position, to, true});
    }
    if (act.attack) {
      const EntityId target = act.attack->target;
      std::optional<Position> tpos;
      if (const auto* ta = w.find_agent(target)) tpos = ta->position;
      else if (const auto* tn = w.find_npc(target)) tpos = tn->position;
      if (!sys.combat) report.dropped.push_back({id, DropReason::CombatDisabled});
      else if (target == id) report.dropped.push_back({id, DropReason::SelfTarget});
      else if (!tpos || !visible(w, *a, *tpos)) report.dropped.push_back({id, DropReason::TargetNotVisible});
      else attacks.push_back({id, *act.attack});
    }
  }

  // (1) npc decisions
  if (sys.npc_equipment) {
    for (const auto& d : npc_phase(w)) {
      const NpcState* n = w.find_npc(d.id);
      if (d.attack_target && sys.combat) attacks.push_back({d.id, {CombatStyle::Melee, *d.attack_target}});
      if (d.move) {
        const Position to = step(n->position, *d.move);
        if (w.map.in_bounds(to) && !is_obstacle(w.map.at(to).material))
          movers.push_back({d.id, n->position, to, false});
      }
    }
  }

  // (2) attacks
  std::map<EntityId, EntityId> killer;
  if (sys.combat) report.attacks = attack_phase(w, std::move(attacks), report.dropped, killer);

  // (3) movement; entities brought to 0 health this tick do not move.
  std::set<EntityId> lava_deaths;
  std::erase_if(movers, [&](const Mover& m) {
    if (m.is_agent) return w.find_agent(m.id)->health <= 0;
    return w.find_npc(m.id)->health <= 0;
  });
  movement_phase(w, std::move(movers), lava_deaths);

  // (4) resources and vitals
  if (sys.resource) resource_phase(w);

  // (5) progression
  if (sys.progression) report.level_ups = progression_phase(w);
  w.xp_touched.clear();

  // (6) deaths and loot
  std::vector<EntityId> dying_agents;
  for (const auto& a : w.agents)
    if (a.health <= 0) dying_agents.push_back(a.id);
  std::vector<EntityId> dying_npcs;
  for (const auto& n : w.npcs)
    if (n.health <= 0) dying_npcs.push_back(n.id);

  auto cause_of = [&](EntityId id) {
    if (lava_deaths.count(id)) return DeathCause::Lava;
    if (killer.count(id)) return DeathCause::Combat;
    return DeathCause::Starvation;
  };
  for (EntityId id : dying_agents) {
    const DeathCause cause = cause_of(id);
    if (cause != DeathCause::Combat) continue;
    const EntityId k = killer.at(id);
    if (AgentState* ka = w.find_agent(k)) ++ka->kills;
  }
  for (EntityId id : dying_npcs) {
    if (cause_of(id) != DeathCause::Combat) continue;
    const NpcState* victim = w.find_npc(id);
    const int drop = npc_drop_level(victim->level, w.config.npc_params);
    const EntityId k = killer.at(id);
    if (AgentState* ka = w.find_agent(k)) {
      if (drop > ka->equipment_level) {
        ka->equipment_level = drop;
        w.log(EventKind::EquipmentGain, k, drop, id);
      }
    } else if (NpcState* kn = w.find_npc(k)) {
      kn->armor_level = std::max(kn->armor_level, drop);
    }
  }
  for (auto& a : w.agents)
    if (a.health > 0) ++a.lifetime;
  for (auto& a : w.agents) {
    for (const auto& u : evaluate_achievements(a, w.config, w.map.size())) {
      report.achievements.push_back(u);
      w.log(EventKind::Achieved, u.id, static_cast<int>(u.task), u.points);
    }
  }
  for (EntityId id : dying_agents) {
    AgentState* a = w.find_agent(id);
    const DeathCause cause = cause_of(id);
    const EntityId k = cause == DeathCause::Combat ? killer.at(id) : kNoEntity;
    a->alive = false;
    if (!lava_deaths.count(id)) w.set_occupant(a->position, kNoEntity);
    w.log(EventKind::Death, id, static_cast<int>(cause), k, a->position.row, a->position.col);
    report.deaths.push_back({id, false, cause, k, a->position});
    report.dead_agents.push_back(*a);
    w.flat.agents.tombstone(id);
  }
  for (EntityId id : dying_npcs) {
    NpcState* n = w.find_npc(id);
    const DeathCause cause = cause_of(id);
    const EntityId k = cause == DeathCause::Combat ? killer.at(id) : kNoEntity;
    if (!lava_deaths.count(id)) w.set_occupant(n->position, kNoEntity);
    w.log(EventKind::NpcDeath, id, static_cast<int>(cause), k, n->position.row, n->position.col);
    report.deaths.push_back({id, true, cause, k, n->position});
    w.flat.npcs.tombstone(id);
  }
  std::erase_if(w.agents, [](const AgentState& a) { return a.health <= 0; });
  std::erase_if(w.npcs, [](const NpcState& n) { return n.health <= 0; });

  // (7) spawning
  if (w.config.spawn_mode == SpawnMode::Continuous &&
      static_cast<int>(w.agents.size()) < w.config.population_cap) {
    const auto free = free_ring_tiles(w);
    if (!free.empty()) {
      const Position p = free[w.rng.below(RngStream::Spawn, free.size())];
      // Agents spawned during tick t first act at tick t + 1.
      place_agent(w, p, w.tick + 1);
      report.spawned.push_back(w.agents.back().id);
    }
  }
  if (sys.npc_equipment && static_cast<int>(w.npcs.size()) < w.config.npc_params.npc_cap) {
    try_spawn_npc(w);
  }

  for (const auto& d : report.dropped) w.log(EventKind::ActionDropped, d.id, static_cast<int>(d.reason));

  // (8) flat-table refresh
  refresh_flat(w);
  ++w.tick;
  if (w.options.compaction_interval > 0 && w.tick % w.options.compaction_interval == 0) {
    w.flat.agents.compact();
    w.flat.npcs.compact();
  }
  if (w.options.check_invariants) check_invariants(w);
  return report;
}

std::uint64_t digest(const WorldState& w) {
  std::uint64_t h = hash_combine(0x4E4D4D4FULL, static_cast<std::uint64_t>(w.tick));
  const auto& g = w.rng.generator();
  h = hash_combine(h, g.key());
  h = hash_combine(h, g.counter());
  for (auto c : w.rng.draws()) h = hash_combine(h, c);
  h = hash_combine(h, static_cast<std::uint64_t>(w.next_entity_id));
  h = hash_combine(h, static_cast<std::uint64_t>(w.agents_spawned));

  // Entity collections: commutative sum of per-entity hashes.
  std::uint64_t agents = 0;
  for (const auto& a : w.agents) {
    std::uint64_t e = hash_combine(1, static_cast<std::uint64_t>(a.id));
    for (std::int64_t v : {std::int64_t{a.population_tag}, std::int64_t{a.slot},
                           std::int64_t{a.position.row}, std::int64_t{a.position.col},
                           std::int64_t{a.spawn_position.row}, std::int64_t{a.spawn_position.col},
                           std::int64_t{a.spawn_tick}, std::int64_t{a.health}, std::int64_t{a.food},
                           std::int64_t{a.water}, std::int64_t{a.max_health}, std::int64_t{a.max_food},
                           std::int64_t{a.max_water}, std::int64_t{a.equipment_level},
                           std::int64_t{a.alive}, std::int64_t{a.lifetime}, std::int64_t{a.kills},
                           std::int64_t{a.next_attack_tick}, std::int64_t{a.diary.completed},
                           std::int64_t{a.diary.score}})
      e = hash_combine(e, static_cast<std::uint64_t>(v));
    for (const auto& s : a.skills.skills) {
      e = hash_combine(e, static_cast<std::uint64_t>(s.xp));
      e = hash_combine(e, static_cast<std::uint64_t>(s.level));
    }
    agents += e;
  }
  std::uint64_t npcs = 0;
  for (const auto& n : w.npcs) {
    std::uint64_t e = hash_combine(2, static_cast<std::uint64_t>(n.id));
    for (std::int64_t v : {std::int64_t{n.position.row}, std::int64_t{n.position.col},
                           std::int64_t{n.home_position.row}, std::int64_t{n.home_position.col},
                           std::int64_t{n.level}, std::int64_t{static_cast<int>(n.disposition)},
                           std::int64_t{n.health}, std::int64_t{n.max_health}, std::int64_t{n.armor_level},
                           std::int64_t{static_cast<int>(n.mode)}, std::int64_t{n.mode_target},
                           std::int64_t{n.mode_ticks}, std::int64_t{n.next_attack_tick}})
      e = hash_combine(e, static_cast<std::uint64_t>(v));
    npcs += e;
  }
  h = hash_combine(h, agents);
  h = hash_combine(h, npcs);

  std::uint64_t tiles = 0xA5A5A5A5ULL;
  const auto& t = w.map.tiles();
  for (std::size_t i = 0; i < t.size(); ++i) {
    tiles = (tiles ^ (static_cast<std::uint64_t>(t[i].material) |
                      (static_cast<std::uint64_t>(static_cast<std::uint32_t>(t[i].occupant)) << 8))) *
            0x100000001B3ULL;
  }
  return hash_combine(h, tiles);
}

std::string dump_events(const WorldState& w, std::size_t max_events) {
  std::ostringstream out;
  const std::size_t n = w.event_log.size();
  const std::size_t start = n > max_events ? n - max_events : 0;
  for (std::size_t i = start; i < n; ++i) {
    const auto& e = w.event_log[i];
    out << "tick=" << e.tick << " kind=" << event_kind_name(e.kind) << " subject=" << e.subject
        << " payload=[" << e.payload[0] << "," << e.payload[1] << "," << e.payload[2] << ","
        << e.payload[3] << "]\n";
  }
  return out.str();
}

void check_invariants(const WorldState& w) {
  auto fail = [&](const std::string& what) {
    throw InvariantViolation("invariant violated at tick " + std::to_string(w.tick) + ": " + what +
                             "\nrecent events:\n" + dump_events(w));
  };
  const auto& r = w.config.resource_params;
  std::size_t occupied = 0;
  for (const auto& t : w.map.tiles()) {
    if (t.occupant == kNoEntity) continue;
    ++occupied;
    if (!is_walkable(t.material)) fail("occupant on impassable tile");
  }
  if (occupied != w.agents.size() + w.npcs.size()) fail("occupancy count mismatch");
  for (std::size_t i = 0; i < w.agents.size(); ++i) {
    const auto& a = w.agents[i];
    if (i > 0 && w.agents[i - 1].id >= a.id) fail("agents not sorted by id");
    if (!a.alive || a.health <= 0) fail("dead agent in live set");
    if (!w.map.in_bounds(a.position) || w.map.at(a.position).occupant != a.id)
      fail("agent " + std::to_string(a.id) + " not on its tile");
    if (a.health > a.max_health || a.food < 0 || a.food > a.max_food || a.water < 0 ||
        a.water > a.max_water)
      fail("agent " + std::to_string(a.id) + " vitals out of bounds");
    if (!w.config.systems_enabled.resource && (a.food != a.max_food || a.water != a.max_water))
      fail("vitals changed with resource system disabled");
    if (a.lifetime != w.tick - a.spawn_tick) fail("lifetime drift for agent " + std::to_string(a.id));
    for (const auto& s : a.skills.skills) {
      if (s.level != level_from_xp(s.xp, w.config.progression_params)) fail("level/xp mismatch");
    }
  }
  (void)r;
  for (std::size_t i = 0; i < w.npcs.size(); ++i) {
    const auto& n = w.npcs[i];
    if (i > 0 && w.npcs[i - 1].id >= n.id) fail("npcs not sorted by id");
    if (n.health <= 0 || n.health > n.max_health) fail("npc health out of bounds");
    if (!w.map.in_bounds(n.position) || w.map.at(n.position).occupant != n.id)
      fail("npc " + std::to_string(n.id) + " not on its tile");
  }
  if (!w.config.systems_enabled.npc_equipment && !w.npcs.empty()) fail("npcs with system disabled");
  // Flat table equals a fresh serialization.
  if (w.flat.agents.live_rows() != w.agents.size()) fail("flat agent row count");
  if (w.flat.npcs.live_rows() != w.npcs.size()) fail("flat npc row count");
  for (const auto& a : w.agents) {
    const EntityRow* row = w.flat.agents.find(a.id);
    if (!row || *row != serialize_agent(a)) fail("flat agent row stale");
  }
  for (const auto& n : w.npcs) {
    const EntityRow* row = w.flat.npcs.find(n.id);
    if (!row || *row != serialize_npc(n)) fail("flat npc row stale");
  }
  for (int rr = 0; rr < w.map.size(); ++rr) {
    for (int cc = 0; cc < w.map.size(); ++cc) {
      const auto row = w.flat.tile_row({rr, cc});
      const auto& t = w.map.at({rr, cc});
      if (row[kTileMaterial] != static_cast<int>(t.material) || row[kTileOccupant] != t.occupant)
        fail("flat tile row stale");
    }
  }
}

}  // namespace nmmo
