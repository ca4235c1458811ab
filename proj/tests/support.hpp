#pragma once

#include <map>
#include <random>
#include <string>
#include <vector>

#include "nmmo/observation.hpp"
#include "nmmo/world.hpp"
#include "nmmo/worldgen.hpp"

namespace nmmo::test {

/// All-grass map with a lava border of the given width.
inline TileMap open_map(int size, int border = 1) {
  TileMap m(size, 0, border);
  for (int r = 0; r < size; ++r)
    for (int c = 0; c < size; ++c)
      m.at({r, c}).material = m.in_border({r, c}) ? Material::Lava : Material::Grass;
  m.spawn_ring() = compute_spawn_ring(m);
  return m;
}

/// Map drawn from rows of characters: . grass, f forest, s scrub, # stone,
/// ~ water, L lava. Border width 0.
inline TileMap ascii_map(const std::vector<std::string>& rows) {
  const int n = static_cast<int>(rows.size());
  TileMap m(n, 0, 0);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      Material mat = Material::Grass;
      switch (rows[r][c]) {
        case 'f': mat = Material::Forest; break;
        case 's': mat = Material::Scrub; break;
        case '#': mat = Material::Stone; break;
        case '~': mat = Material::Water; break;
        case 'L': mat = Material::Lava; break;
        default: break;
      }
      m.at({r, c}).material = mat;
    }
  }
  m.spawn_ring() = compute_spawn_ring(m);
  return m;
}

/// Small config sized to `map`, with the requested systems on.
inline EnvConfig small_config(int map_size, SystemSet systems = {}, int vision = 3) {
  EnvConfig cfg;
  cfg.map_size = map_size;
  cfg.vision_range = vision;
  cfg.population_cap = 8;
  cfg.episode_horizon = 1000;
  cfg.systems_enabled = systems;
  cfg.worldgen_params.border_width = 1;
  return cfg;
}

inline SystemSet only(bool resource, bool combat, bool progression, bool npc) {
  return SystemSet{resource, combat, progression, npc};
}

inline ActionSet move(Direction d) {
  ActionSet a;
  a.move = d;
  return a;
}

inline ActionSet attack(CombatStyle s, EntityId target) {
  ActionSet a;
  a.attack = AttackIntent{s, target};
  return a;
}

inline std::size_t count_events(const WorldState& w, EventKind k) {
  std::size_t n = 0;
  for (const auto& e : w.event_log) n += e.kind == k;
  return n;
}

/// Random moves, and with probability attack_p an attack on a random visible entity.
inline std::map<EntityId, ActionSet> random_actions(const WorldState& w, std::mt19937_64& g, double attack_p) {
  std::map<EntityId, ActionSet> acts;
  for (const auto& a : w.agents) {
    ActionSet s;
    if (g() % 5) s.move = static_cast<Direction>(g() % 4);
    if (std::uniform_real_distribution<double>(0, 1)(g) < attack_p) {
      const Observation obs = select_observation(w, a.id);
      if (obs.entities.size() > 1) {
        const auto& row = obs.entities[g() % obs.entities.size()];
        s.attack = AttackIntent{static_cast<CombatStyle>(g() % 3), row[kEntId]};
      }
    }
    acts[a.id] = s;
  }
  return acts;
}

}  // namespace nmmo::test
