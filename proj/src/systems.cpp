#include "nmmo/systems.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>

namespace nmmo {

// ---- Skill progression ----------------------------------------------------

double xp_for_level(int level, const ProgressionParams& p) {
  double total = 0.0;
  double step = p.xp_threshold_base;
  for (int l = p.starting_level; l < level; ++l) {
    total += step;
    step *= p.xp_threshold_growth;
  }
  return total;
}

int level_from_xp(std::int64_t xp, const ProgressionParams& p) {
  int level = p.starting_level;
  double threshold = p.xp_threshold_base;
  double step = p.xp_threshold_base;
  const auto x = static_cast<double>(xp);
  while (level < p.max_level && x >= threshold) {
    ++level;
    step *= p.xp_threshold_growth;
    threshold += step;
  }
  return level;
}

void apply_derived_maxima(AgentState& a, const EnvConfig& cfg) {
  const auto& r = cfg.resource_params;
  const auto& p = cfg.progression_params;
  const int start = p.starting_level;
  a.max_food = r.max_food + p.capacity_per_level * (a.skills.level(Skill::Hunting) - start);
  a.max_water = r.max_water + p.capacity_per_level * (a.skills.level(Skill::Fishing) - start);
  a.max_health = r.max_health + p.health_per_level * (a.skills.level(Skill::Constitution) - start);
}

void award_xp(WorldState& world, AgentState& agent, Skill skill, int amount) {
  if (!world.config.systems_enabled.progression || amount <= 0) return;
  agent.skills[skill].xp += amount;
  world.xp_touched.emplace_back(agent.id, skill);
  world.log(EventKind::XpGain, agent.id, static_cast<int>(skill), amount);
}

// ---- Combat ----------------------------------------------------------------

CombatStats combat_stats(const AgentState& a) {
  CombatStats s;
  s.id = a.id;
  s.position = a.position;
  s.style_level = {a.skills.level(Skill::Melee), a.skills.level(Skill::Range),
                   a.skills.level(Skill::Mage)};
  s.defense_level = a.skills.level(Skill::Defense);
  s.armor = a.equipment_level;
  s.health = a.health;
  return s;
}

CombatStats combat_stats(const NpcState& n) {
  CombatStats s;
  s.id = n.id;
  s.position = n.position;
  s.style_level = {n.level, n.level, n.level};
  s.defense_level = n.level;
  s.armor = n.armor_level;
  s.health = n.health;
  return s;
}

const StyleParams& style_params(const CombatParams& p, CombatStyle s) {
  switch (s) {
    case CombatStyle::Melee: return p.melee;
    case CombatStyle::Range: return p.range;
    case CombatStyle::Mage: return p.mage;
  }
  return p.melee;
}

double hit_probability(const CombatStats& atk, const CombatStats& def, CombatStyle style,
                       const CombatParams& p) {
  const int diff = atk.style_level[static_cast<std::size_t>(style)] - def.defense_level;
  const double acc = style_params(p, style).base_accuracy + p.accuracy_per_level * diff;
  return std::clamp(acc, p.accuracy_min, p.accuracy_max);
}

int hit_damage(const CombatStats& atk, const CombatStats& def, CombatStyle style,
               const CombatParams& p) {
  const int level = atk.style_level[static_cast<std::size_t>(style)];
  const int raw = style_params(p, style).base_damage +
                  static_cast<int>(std::floor(p.damage_per_level * level)) - def.armor;
  return std::max(1, raw);
}

AttackOutcome resolve_attack(const CombatStats& atk, const CombatStats& def, CombatStyle style,
                             const CombatParams& p, WorldRng& rng) {
  AttackOutcome out;
  out.attacker = atk.id;
  out.defender = def.id;
  out.style = style;
  out.hit = rng.bernoulli(RngStream::Combat, hit_probability(atk, def, style, p));
  if (out.hit) {
    out.damage = std::min(hit_damage(atk, def, style, p), std::max(0, def.health));
    out.lethal = out.damage >= def.health;
  }
  return out;
}

namespace {

struct Combatant {
  AgentState* agent = nullptr;
  NpcState* npc = nullptr;

  explicit operator bool() const { return agent || npc; }
  [[nodiscard]] CombatStats stats() const { return agent ? combat_stats(*agent) : combat_stats(*npc); }
  [[nodiscard]] int health() const { return agent ? agent->health : npc->health; }
  [[nodiscard]] Position position() const { return agent ? agent->position : npc->position; }
  [[nodiscard]] int next_attack_tick() const { return agent ? agent->next_attack_tick : npc->next_attack_tick; }
  void set_next_attack_tick(int t) const { (agent ? agent->next_attack_tick : npc->next_attack_tick) = t; }
  void take_damage(int d) const { (agent ? agent->health : npc->health) -= d; }
};

Combatant lookup(WorldState& w, EntityId id) {
  if (auto* a = w.find_agent(id)) return {a, nullptr};
  if (auto* n = w.find_npc(id)) return {nullptr, n};
  return {};
}

void npc_react(NpcState& npc, EntityId attacker, const NpcParams& p) {
  switch (npc.disposition) {
    case Disposition::Passive:
      npc.mode = NpcMode::Flee;
      npc.mode_target = attacker;
      npc.mode_ticks = p.flee_duration;
      break;
    case Disposition::Neutral:
      npc.mode = NpcMode::Pursue;
      npc.mode_target = attacker;
      break;
    case Disposition::Hostile:
      if (npc.mode != NpcMode::Pursue) {
        npc.mode = NpcMode::Pursue;
        npc.mode_target = attacker;
      }
      break;
  }
}

}  // namespace

std::vector<AttackOutcome> attack_phase(WorldState& world, std::vector<AttackRequest> requests,
                                        std::vector<DroppedAction>& dropped,
                                        std::map<EntityId, EntityId>& killer) {
  std::vector<AttackOutcome> outcomes;
  const auto& cp = world.config.combat_params;
  std::stable_sort(requests.begin(), requests.end(),
                   [](const AttackRequest& a, const AttackRequest& b) { return a.attacker < b.attacker; });
  for (const auto& req : requests) {
    const Combatant atk = lookup(world, req.attacker);
    const Combatant def = lookup(world, req.intent.target);
    auto reject = [&](DropReason r) {
      if (atk.agent) dropped.push_back({req.attacker, r});
    };
    if (!atk || atk.health() <= 0) continue;  // killed earlier this phase
    if (!def || def.health() <= 0) {
      reject(DropReason::TargetDead);
      continue;
    }
    if (chebyshev(atk.position(), def.position()) > style_params(cp, req.intent.style).reach) {
      reject(DropReason::OutOfReach);
      continue;
    }
    if (world.tick < atk.next_attack_tick()) {
      reject(DropReason::Cooldown);
      continue;
    }
    if (!cp.friendly_fire && atk.agent && def.agent &&
        atk.agent->population_tag == def.agent->population_tag) {
      reject(DropReason::FriendlyFire);
      continue;
    }

    AttackOutcome out = resolve_attack(atk.stats(), def.stats(), req.intent.style, cp, world.rng);
    atk.set_next_attack_tick(world.tick + 1 + cp.attack_cooldown);
    def.take_damage(out.damage);
    if (out.lethal) killer[def.stats().id] = req.attacker;

    const int xp = world.config.progression_params.xp_per_hit;
    if (atk.agent && out.hit && world.config.systems_enabled.progression) {
      award_xp(world, *atk.agent, style_skill(req.intent.style), xp);
      out.xp_awarded = xp;
    }
    if (def.agent) {
      award_xp(world, *def.agent, out.hit ? Skill::Constitution : Skill::Defense, xp);
    } else {
      npc_react(*def.npc, req.attacker, world.config.npc_params);
    }
    world.log(EventKind::Attack, req.attacker, req.intent.target,
              static_cast<int>(req.intent.style), out.damage, out.hit ? 1 : 0);
    outcomes.push_back(out);
  }
  return outcomes;
}

// ---- Resources -------------------------------------------------------------

std::vector<VitalsDelta> resource_phase(WorldState& world) {
  std::vector<VitalsDelta> deltas;
  const auto& r = world.config.resource_params;
  const int xp = world.config.progression_params.xp_per_harvest;
  deltas.reserve(world.agents.size());
  std::vector<std::uint32_t> fresh;
  for (auto& a : world.agents) {
    if (a.health <= 0) continue;
    const VitalsDelta before{a.id, a.food, a.water, a.health};

    a.food = std::max(0, a.food - r.food_decay_per_tick);
    a.water = std::max(0, a.water - r.water_decay_per_tick);

    const TileState& here = world.map.at(a.position);
    if (here.material == Material::Forest && a.food < a.max_food) {
      const int gain = std::min(r.food_per_harvest, a.max_food - a.food);
      a.food += gain;
      world.set_material(a.position, Material::Scrub);
      fresh.push_back(static_cast<std::uint32_t>(world.map.index(a.position)));
      world.log(EventKind::Harvest, a.id, a.position.row, a.position.col, gain);
      award_xp(world, a, Skill::Hunting, xp);
    }
    if (a.water < a.max_water) {
      bool adjacent = false;
      for (Direction d : kDirections) adjacent |= world.map.material(step(a.position, d)) == Material::Water;
      if (adjacent) {
        const int gain = std::min(r.water_per_drink, a.max_water - a.water);
        a.water += gain;
        world.log(EventKind::Drink, a.id, gain);
        award_xp(world, a, Skill::Fishing, xp);
      }
    }

    int loss = 0;
    if (a.food == 0) loss += r.health_loss_when_starving;
    if (a.water == 0) loss += r.health_loss_when_starving;
    if (loss > 0) {
      const int dealt = std::min(loss, a.health);
      a.health -= dealt;
      world.log(EventKind::Starve, a.id, dealt);
    } else if (a.food >= r.regen_threshold && a.water >= r.regen_threshold && a.health < a.max_health) {
      const int gain = std::min(r.health_regen_per_tick, a.max_health - a.health);
      if (gain > 0) {
        a.health += gain;
        world.log(EventKind::Regen, a.id, gain);
      }
    }
    deltas.push_back({a.id, a.food - before.food, a.water - before.water, a.health - before.health});
  }

  // Regrowth, in ascending tile order. Tiles harvested this tick become
  // eligible from the next tick on.
  std::vector<std::uint32_t> remaining;
  remaining.reserve(world.scrub_tiles.size() + fresh.size());
  for (std::uint32_t idx : world.scrub_tiles) {
    const Position p = world.map.position(idx);
    if (world.rng.bernoulli(RngStream::Resource, r.forest_regen_probability)) {
      world.set_material(p, Material::Forest);
      world.log(EventKind::Regrow, kNoEntity, p.row, p.col);
    } else {
      remaining.push_back(idx);
    }
  }
  remaining.insert(remaining.end(), fresh.begin(), fresh.end());
  std::sort(remaining.begin(), remaining.end());
  world.scrub_tiles = std::move(remaining);
  return deltas;
}

// ---- NPCs ------------------------------------------------------------------

int npc_drop_level(int npc_level, const NpcParams& p) {
  return static_cast<int>(std::floor(p.armor_per_level * npc_level));
}

std::optional<Direction> step_toward(const WorldState& world, Position from, Position to,
                                     int radius) {
  if (from == to) return std::nullopt;
  const int side = 2 * radius + 1;
  const auto local = [&](Position p) -> int {
    const int lr = p.row - from.row + radius;
    const int lc = p.col - from.col + radius;
    if (lr < 0 || lc < 0 || lr >= side || lc >= side) return -1;
    return lr * side + lc;
  };
  if (local(to) < 0) return std::nullopt;
  std::vector<std::int8_t> first(static_cast<std::size_t>(side) * side, -1);
  std::vector<std::uint8_t> seen(first.size(), 0);
  std::deque<Position> queue;
  seen[static_cast<std::size_t>(local(from))] = 1;
  queue.push_back(from);
  while (!queue.empty()) {
    const Position p = queue.front();
    queue.pop_front();
    const int pi = local(p);
    for (Direction d : kDirections) {
      const Position q = step(p, d);
      const int qi = local(q);
      if (qi < 0 || seen[static_cast<std::size_t>(qi)]) continue;
      const bool goal = q == to;
      if (!goal) {
        if (!world.map.in_bounds(q)) continue;
        const auto& t = world.map.at(q);
        if (!is_walkable(t.material) || t.occupant != kNoEntity) continue;
      }
      seen[static_cast<std::size_t>(qi)] = 1;
      first[static_cast<std::size_t>(qi)] =
          p == from ? static_cast<std::int8_t>(d) : first[static_cast<std::size_t>(pi)];
      if (goal) return static_cast<Direction>(first[static_cast<std::size_t>(qi)]);
      queue.push_back(q);
    }
  }
  return std::nullopt;
}

namespace {

bool npc_can_enter(const WorldState& w, const NpcState& n, Position q) {
  if (!w.map.in_bounds(q)) return false;
  const auto& t = w.map.at(q);
  return is_walkable(t.material) && t.occupant == kNoEntity &&
         chebyshev(q, n.home_position) <= w.config.npc_params.wander_radius;
}

std::optional<Direction> random_walk(WorldState& w, const NpcState& n, double move_probability) {
  if (!w.rng.bernoulli(RngStream::Npc, move_probability)) return std::nullopt;
  const auto d = static_cast<Direction>(w.rng.below(RngStream::Npc, 4));
  if (!npc_can_enter(w, n, step(n.position, d))) return std::nullopt;
  return d;
}

std::optional<Direction> flee_step(const WorldState& w, Position self, Position threat) {
  std::optional<Direction> best;
  int best_dist = manhattan(self, threat);
  for (Direction d : kDirections) {
    const Position q = step(self, d);
    if (!w.map.in_bounds(q)) continue;
    const auto& t = w.map.at(q);
    if (!is_walkable(t.material) || t.occupant != kNoEntity) continue;
    const int dist = manhattan(q, threat);
    if (dist > best_dist) {
      best_dist = dist;
      best = d;
    }
  }
  return best;
}

std::optional<Position> entity_position(const WorldState& w, EntityId id) {
  if (const auto* a = w.find_agent(id); a && a->health > 0) return a->position;
  if (const auto* n = w.find_npc(id); n && n->health > 0) return n->position;
  return std::nullopt;
}

void chase(const WorldState& w, const NpcState& n, Position target, NpcDecision& out) {
  const int reach = w.config.combat_params.melee.reach;
  if (chebyshev(n.position, target) <= reach) {
    out.attack_target = w.map.at(target).occupant;
  } else {
    out.move = step_toward(w, n.position, target, w.config.npc_params.vision_radius + 2);
  }
}

}  // namespace

std::vector<NpcDecision> npc_phase(WorldState& world) {
  std::vector<NpcDecision> decisions;
  const auto& np = world.config.npc_params;
  decisions.reserve(world.npcs.size());
  for (auto& n : world.npcs) {
    NpcDecision dec;
    dec.id = n.id;
    switch (n.disposition) {
      case Disposition::Passive: {
        const auto threat = n.mode == NpcMode::Flee && n.mode_ticks > 0
                                ? entity_position(world, n.mode_target)
                                : std::nullopt;
        if (threat) {
          dec.move = flee_step(world, n.position, *threat);
          --n.mode_ticks;
        } else {
          n.mode = NpcMode::Idle;
          n.mode_target = kNoEntity;
          n.mode_ticks = 0;
          dec.move = random_walk(world, n, 0.5);
        }
        break;
      }
      case Disposition::Neutral: {
        if (n.mode == NpcMode::Pursue) {
          const auto target = entity_position(world, n.mode_target);
          if (target && chebyshev(*target, n.home_position) <= np.leash_radius) {
            chase(world, n, *target, dec);
            break;
          }
          n.mode = NpcMode::Idle;
          n.mode_target = kNoEntity;
        }
        dec.move = random_walk(world, n, np.neutral_drift_probability);
        break;
      }
      case Disposition::Hostile: {
        // Nearest agent or npc in vision; ties prefer lower health, then id.
        std::optional<Position> best;
        std::tuple<int, int, EntityId> best_key{};
        auto consider = [&](EntityId id, Position p, int health) {
          if (id == n.id || health <= 0) return;
          const int d = chebyshev(n.position, p);
          if (d > np.vision_radius) return;
          const std::tuple<int, int, EntityId> key{d, health, id};
          if (!best || key < best_key) {
            best = p;
            best_key = key;
          }
        };
        for (const auto& a : world.agents) consider(a.id, a.position, a.health);
        for (const auto& o : world.npcs) consider(o.id, o.position, o.health);
        if (best) {
          n.mode = NpcMode::Pursue;
          n.mode_target = std::get<2>(best_key);
          chase(world, n, *best, dec);
        } else {
          n.mode = NpcMode::Idle;
          n.mode_target = kNoEntity;
          dec.move = random_walk(world, n, 0.5);
        }
        break;
      }
    }
    if (!world.config.systems_enabled.combat) dec.attack_target.reset();
    decisions.push_back(dec);
  }
  return decisions;
}

// ---- Progression -----------------------------------------------------------

std::vector<LevelUp> progression_phase(WorldState& world) {
  std::vector<LevelUp> ups;
  auto& touched = world.xp_touched;
  std::sort(touched.begin(), touched.end());
  touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
  for (const auto& [id, skill] : touched) {
    AgentState* a = world.find_agent(id);
    if (!a) continue;
    auto& s = a->skills[skill];
    const int level = level_from_xp(s.xp, world.config.progression_params);
    if (level != s.level) {
      ups.push_back({id, skill, s.level, level});
      world.log(EventKind::LevelUp, id, static_cast<int>(skill), level);
      s.level = level;
    }
    apply_derived_maxima(*a, world.config);
  }
  touched.clear();
  return ups;
}

// ---- Achievements ----------------------------------------------------------

int achievement_points(Achievement a, const AchievementParams& p) {
  switch (a) {
    case Achievement::FirstArmor:
    case Achievement::ForageSmall:
    case Achievement::TravelSmall:
    case Achievement::DefeatSmall: return p.small_points;
    case Achievement::ForageMedium:
    case Achievement::TravelMedium:
    case Achievement::DefeatMedium: return p.medium_points;
    case Achievement::TraverseMap: return p.large_points;
  }
  return 0;
}

std::vector<AchievementUnlock> evaluate_achievements(AgentState& a, const EnvConfig& cfg,
                                                     int map_size) {
  const auto& p = cfg.achievement_params;
  std::vector<AchievementUnlock> out;
  auto check = [&](Achievement task, bool done) {
    if (!done) return;
    const int pts = achievement_points(task, p);
    if (a.diary.complete(task, pts)) out.push_back({a.id, task, pts});
  };
  const int forage = std::max(a.skills.level(Skill::Hunting), a.skills.level(Skill::Fishing));
  const int travel = manhattan(a.position, a.spawn_position);

  // Opposite border region relative to the spawn side.
  const int last = map_size - 1;
  const int edge = cfg.worldgen_params.border_width + p.traverse_margin;
  const Position s = a.spawn_position;
  const std::array<int, 4> to_side{s.row, last - s.row, s.col, last - s.col};
  const auto side = std::min_element(to_side.begin(), to_side.end()) - to_side.begin();
  bool traversed = false;
  switch (side) {
    case 0: traversed = last - a.position.row <= edge; break;
    case 1: traversed = a.position.row <= edge; break;
    case 2: traversed = last - a.position.col <= edge; break;
    default: traversed = a.position.col <= edge; break;
  }

  check(Achievement::FirstArmor, a.equipment_level >= 1);
  check(Achievement::ForageSmall, forage >= p.forage_level_small);
  check(Achievement::ForageMedium, forage >= p.forage_level_medium);
  check(Achievement::TravelSmall, travel >= p.travel_small);
  check(Achievement::TravelMedium, travel >= p.travel_medium);
  check(Achievement::DefeatSmall, a.kills >= p.kills_small);
  check(Achievement::DefeatMedium, a.kills >= p.kills_medium);
  check(Achievement::TraverseMap, traversed);
  return out;
}

}  // namespace nmmo
