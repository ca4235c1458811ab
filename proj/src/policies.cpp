#include "nmmo/policies.hpp"

#include <algorithm>
#include <array>
#include <queue>
#include <stdexcept>
#include <tuple>

namespace nmmo {

PolicySpec policy_preset(std::string_view name) {
  PolicySpec s;
  s.name = std::string(name);
  if (name == "meander") {
    s.kind = PolicyKind::Meander;
    s.explore_bias = false;
  } else if (name == "forage") {
    s.kind = PolicyKind::Forage;
  } else if (name == "forage-noexplore") {
    s.kind = PolicyKind::Forage;
    s.explore_bias = false;
  } else if (name == "combat") {
    s.kind = PolicyKind::Combat;
  } else if (name == "combat-noexplore") {
    s.kind = PolicyKind::Combat;
    s.explore_bias = false;
  } else {
    throw std::invalid_argument("unknown policy \"" + std::string(name) + "\"");
  }
  return s;
}

const std::vector<std::string>& policy_preset_names() {
  static const std::vector<std::string> kNames{"meander", "forage", "forage-noexplore", "combat",
                                               "combat-noexplore"};
  return kNames;
}

std::unique_ptr<Policy> make_policy(std::string_view preset) {
  return std::make_unique<ScriptedPolicy>(policy_preset(preset));
}

PolicyContext PolicyContext::from(const EnvConfig& cfg) {
  PolicyContext c;
  c.map_size = cfg.map_size;
  c.resource = cfg.resource_params;
  c.combat = cfg.combat_params;
  c.progression = cfg.progression_params;
  c.combat_enabled = cfg.systems_enabled.combat;
  c.resource_enabled = cfg.systems_enabled.resource;
  return c;
}

// ---- Crop ------------------------------------------------------------------

Crop::Crop(const Observation& obs) {
  const auto n = obs.tiles.size();
  side_ = 1;
  while (static_cast<std::size_t>(side_) * side_ < n) ++side_;
  origin_ = {obs.tiles.front()[0], obs.tiles.front()[1]};
  material_.resize(n);
  occupied_.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) material_[i] = static_cast<std::uint8_t>(obs.tiles[i][2]);
  for (std::size_t k = 0; k < obs.entities.size(); ++k) {
    if (static_cast<int>(k) == obs.self_row_index) continue;
    const auto& e = obs.entities[k];
    const int lr = e[kEntRow] - origin_.row;
    const int lc = e[kEntCol] - origin_.col;
    occupied_[static_cast<std::size_t>(lr) * side_ + lc] = 1;
  }
}

bool Crop::passable(int i) const { return is_walkable(material(i)) && !occupied(i); }

int Crop::neighbor(int i, Direction d) const {
  const Position p = step({i / side_, i % side_}, d);
  if (p.row < 0 || p.col < 0 || p.row >= side_ || p.col >= side_) return -1;
  return p.row * side_ + p.col;
}

bool Crop::next_to_water(int i) const {
  for (Direction d : kDirections) {
    const int j = neighbor(i, d);
    if (j >= 0 && material(j) == Material::Water) return true;
  }
  return false;
}

std::vector<int> crop_distances(const Crop& crop, const std::vector<int>& sources) {
  const int n = crop.side() * crop.side();
  std::vector<int> dist(static_cast<std::size_t>(n), kUnreachable);
  using Item = std::pair<int, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  for (int s : sources) {
    if (!crop.passable(s) && s != crop.center()) continue;
    dist[static_cast<std::size_t>(s)] = 0;
    heap.emplace(0, s);
  }
  while (!heap.empty()) {
    const auto [d, i] = heap.top();
    heap.pop();
    if (d > dist[static_cast<std::size_t>(i)]) continue;
    for (Direction dir : kDirections) {
      const int j = crop.neighbor(i, dir);
      if (j < 0 || !(crop.passable(j) || j == crop.center())) continue;
      if (d + 1 < dist[static_cast<std::size_t>(j)]) {
        dist[static_cast<std::size_t>(j)] = d + 1;
        heap.emplace(d + 1, j);
      }
    }
  }
  return dist;
}

Vitals simulate_path(const Crop& crop, Vitals v, const std::vector<int>& path, const PolicyContext& ctx) {
  const auto& r = ctx.resource;
  std::vector<int> eaten;
  v.low = std::min(v.food, v.water);
  for (int i : path) {
    v.food = std::max(0, v.food - r.food_decay_per_tick);
    v.water = std::max(0, v.water - r.water_decay_per_tick);
    if (crop.material(i) == Material::Forest && v.food < v.max_food &&
        std::find(eaten.begin(), eaten.end(), i) == eaten.end()) {
      v.food = std::min(v.max_food, v.food + r.food_per_harvest);
      eaten.push_back(i);
    }
    if (crop.next_to_water(i) && v.water < v.max_water) v.water = std::min(v.max_water, v.water + r.water_per_drink);
    v.low = std::min({v.low, v.food, v.water});
  }
  return v;
}

// ---- Meander ---------------------------------------------------------------

ActionSet meander_act(const Observation& obs, CounterRng& rng) {
  const Crop crop(obs);
  std::array<Direction, 4> open{};
  std::size_t n = 0;
  for (Direction d : kDirections) {
    const int j = crop.neighbor(crop.center(), d);
    if (j >= 0 && is_walkable(crop.material(j))) open[n++] = d;
  }
  ActionSet a;
  if (n > 0) a.move = open[rng.below(n)];
  return a;
}

// ---- Forage ----------------------------------------------------------------

namespace {

const EntityRow& self_row(const Observation& obs) {
  if (obs.self_row_index < 0) throw std::invalid_argument("observation has no self row");
  return obs.entities[static_cast<std::size_t>(obs.self_row_index)];
}

constexpr int kStay = -1;

/// Candidate first moves in tie-break order: stay, then N, S, E, W.
constexpr std::array<int, 5> kCandidates{kStay, 0, 1, 2, 3};

int center_distance(Position p, int map_size) {
  // Four times the squared distance to the (possibly half-integer) map centre.
  const int c2 = map_size - 1;
  const int dr = 2 * p.row - c2;
  const int dc = 2 * p.col - c2;
  return dr * dr + dc * dc;
}

std::optional<Direction> as_move(int c) {
  if (c == kStay) return std::nullopt;
  return static_cast<Direction>(c);
}

/// Appends steps down `field` from `from` until a zero cell or `limit` steps.
void descend(const Crop& crop, const std::vector<int>& field, int from, std::size_t limit,
             std::vector<int>& path) {
  int cur = from;
  while (path.size() < limit && field[static_cast<std::size_t>(cur)] > 0 &&
         field[static_cast<std::size_t>(cur)] < kUnreachable) {
    int next = -1;
    for (Direction d : kDirections) {
      const int j = crop.neighbor(cur, d);
      if (j >= 0 && field[static_cast<std::size_t>(j)] == field[static_cast<std::size_t>(cur)] - 1) {
        next = j;
        break;
      }
    }
    if (next < 0) break;
    path.push_back(next);
    cur = next;
  }
}

/// Path distances to the reachable crop tile nearest the map centre.
std::vector<int> explore_field(const Crop& crop, int map_size) {
  const std::vector<int> reach = crop_distances(crop, {crop.center()});
  int target = crop.center();
  int best = center_distance(crop.self(), map_size);
  for (int i = 0; i < static_cast<int>(reach.size()); ++i) {
    if (reach[static_cast<std::size_t>(i)] >= kUnreachable) continue;
    const int d = center_distance(crop.absolute(i), map_size);
    if (d < best) {
      best = d;
      target = i;
    }
  }
  return crop_distances(crop, {target});
}

int first_tile(const Crop& crop, int c) {
  return c == kStay ? crop.center() : crop.neighbor(crop.center(), static_cast<Direction>(c));
}

std::optional<Direction> toward_center(const Crop& crop, int map_size) {
  const std::vector<int> field = explore_field(crop, map_size);
  int best = kStay;
  int best_d = field[static_cast<std::size_t>(crop.center())];
  for (int c : kCandidates) {
    const int j = first_tile(crop, c);
    if (c == kStay || j < 0 || !crop.passable(j)) continue;
    if (field[static_cast<std::size_t>(j)] < best_d) {
      best_d = field[static_cast<std::size_t>(j)];
      best = c;
    }
  }
  return as_move(best);
}

}  // namespace

ActionSet forage_act(const Observation& obs, const PolicySpec& spec, const PolicyContext& ctx, CounterRng& rng) {
  const Crop crop(obs);
  const EntityRow& me = self_row(obs);
  const int start_level = ctx.progression.starting_level;
  const Vitals start{me[kEntFood], me[kEntWater],
                     ctx.resource.max_food + ctx.progression.capacity_per_level * (me[kEntHunting] - start_level),
                     ctx.resource.max_water + ctx.progression.capacity_per_level * (me[kEntFishing] - start_level)};

  std::vector<int> forests;
  std::vector<int> drinks;
  const int n = crop.side() * crop.side();
  if (ctx.resource_enabled) {
    for (int i = 0; i < n; ++i) {
      if (!crop.passable(i) && i != crop.center()) continue;
      if (crop.material(i) == Material::Forest) forests.push_back(i);
      if (crop.next_to_water(i)) drinks.push_back(i);
    }
  }
  // Nothing to plan for: head for the map centre, or wander when there is
  // no bias or no progress toward it.
  auto explore_move = [&] {
    ActionSet a;
    if (spec.explore_bias) a.move = toward_center(crop, ctx.map_size);
    if (!a.move) a = meander_act(obs, rng);
    return a;
  };
  if (forests.empty() && drinks.empty()) return explore_move();

  const std::vector<int> to_forest = crop_distances(crop, forests);
  const std::vector<int> to_drink = crop_distances(crop, drinks);
  const auto horizon = static_cast<std::size_t>(std::max(1, spec.forage_horizon));

  auto plan_value = [&](int first) {
    std::pair<int, int> best{-1, -1};
    std::vector<int> path;
    auto finish = [&] {
      while (path.size() < horizon) path.push_back(path.back());
      best = std::max(best, plan_score(simulate_path(crop, start, path, ctx)));
    };
    const std::array<const std::vector<int>*, 2> fields{&to_forest, &to_drink};
    path.assign(1, first);
    finish();
    for (int a = 0; a < 2; ++a) {
      path.assign(1, first);
      descend(crop, *fields[a], first, horizon, path);
      const std::vector<int> leg = path;
      finish();
      path = leg;
      descend(crop, *fields[1 - a], path.back(), horizon, path);
      finish();
    }
    return best;
  };

  std::vector<int> explore;
  if (spec.explore_bias) explore = explore_field(crop, ctx.map_size);
  int best_c = kStay;
  std::pair<int, int> best_v{-1, -1};
  int best_center = 0;
  bool all_tied = true;
  for (int c : kCandidates) {
    const int first = first_tile(crop, c);
    if (first < 0 || (c != kStay && !crop.passable(first))) continue;
    const std::pair<int, int> v = plan_value(first);
    if (best_v.first >= 0 && v != best_v) all_tied = false;
    const int cd = spec.explore_bias ? explore[static_cast<std::size_t>(first)] : 0;
    const bool better = v > best_v || (v == best_v && cd < best_center);
    if (better) {
      best_c = c;
      best_v = v;
      best_center = cd;
    }
  }
  if (all_tied) return explore_move();
  ActionSet a;
  a.move = as_move(best_c);
  return a;
}

// ---- Combat ----------------------------------------------------------------

double strength(const EntityRow& e) {
  const double levels = e[kEntMelee] + e[kEntRange] + e[kEntMage] + e[kEntDefense] + e[kEntConstitution];
  const double health = e[kEntMaxHealth] > 0 ? static_cast<double>(e[kEntHealth]) / e[kEntMaxHealth] : 0.0;
  return levels + 2.0 * e[kEntEquipment] + 5.0 * health;
}

ActionSet combat_act(const Observation& obs, const PolicySpec& spec, const PolicyContext& ctx, CounterRng& rng) {
  const EntityRow& me = self_row(obs);
  const Position here{me[kEntRow], me[kEntCol]};
  const double mine = strength(me);
  const auto& cp = ctx.combat;
  const std::array<std::pair<CombatStyle, const StyleParams*>, 3> styles{
      {{CombatStyle::Melee, &cp.melee}, {CombatStyle::Range, &cp.range}, {CombatStyle::Mage, &cp.mage}}};
  const std::array<int, 3> my_level{me[kEntMelee], me[kEntRange], me[kEntMage]};
  int max_reach = 0;
  for (const auto& s : styles) max_reach = std::max(max_reach, s.second->reach);

  std::optional<AttackIntent> target;
  std::tuple<double, int, EntityId> target_key{};
  std::optional<Position> threat;
  std::tuple<int, EntityId> threat_key{};
  for (std::size_t k = 0; k < obs.entities.size(); ++k) {
    if (static_cast<int>(k) == obs.self_row_index) continue;
    const EntityRow& e = obs.entities[k];
    const Position p{e[kEntRow], e[kEntCol]};
    const int d = chebyshev(here, p);
    const double s = strength(e);
    const bool teammate = e[kEntKind] == kKindAgent && e[kEntPopulation] == me[kEntPopulation];
    if (s > mine && d <= max_reach + 1 && !(teammate && !cp.friendly_fire)) {
      const std::tuple<int, EntityId> key{d, e[kEntId]};
      if (!threat || key < threat_key) {
        threat = p;
        threat_key = key;
      }
    }
    if (!ctx.combat_enabled || s >= mine - spec.aggression_margin || (teammate && !cp.friendly_fire)) continue;
    std::optional<CombatStyle> style;
    int style_level = -1;
    for (std::size_t i = 0; i < styles.size(); ++i) {
      if (styles[i].second->reach >= d && my_level[i] > style_level) {
        style = styles[i].first;
        style_level = my_level[i];
      }
    }
    if (!style) continue;
    const std::tuple<double, int, EntityId> key{s, d, e[kEntId]};
    if (!target || key < target_key) {
      target = AttackIntent{*style, e[kEntId]};
      target_key = key;
    }
  }

  ActionSet a;
  if (threat) {
    const Crop crop(obs);
    int best = kStay;
    std::pair<int, int> best_key{chebyshev(here, *threat), manhattan(here, *threat)};
    for (int c : kCandidates) {
      if (c == kStay) continue;
      const int j = crop.neighbor(crop.center(), static_cast<Direction>(c));
      if (j < 0 || !crop.passable(j)) continue;
      const Position q = crop.absolute(j);
      const std::pair<int, int> key{chebyshev(q, *threat), manhattan(q, *threat)};
      if (key > best_key) {
        best_key = key;
        best = c;
      }
    }
    a.move = as_move(best);
  } else {
    a.move = forage_act(obs, spec, ctx, rng).move;
  }
  a.attack = target;
  return a;
}

ActionSet scripted_act(const Observation& obs, const PolicySpec& spec, const PolicyContext& ctx, CounterRng& rng) {
  switch (spec.kind) {
    case PolicyKind::Meander: return meander_act(obs, rng);
    case PolicyKind::Forage: return forage_act(obs, spec, ctx, rng);
    case PolicyKind::Combat: return combat_act(obs, spec, ctx, rng);
  }
  return {};
}

}  // namespace nmmo
