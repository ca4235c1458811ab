#include "nmmo/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "nmmo/hash.hpp"

namespace nmmo {
namespace {

using nlohmann::json;

// One field list per section drives both reading and writing.

template <class V>
void visit_fields(ResourceParams& p, V& v) {
  v("start_food", p.start_food);
  v("max_food", p.max_food);
  v("start_water", p.start_water);
  v("max_water", p.max_water);
  v("start_health", p.start_health);
  v("max_health", p.max_health);
  v("food_decay_per_tick", p.food_decay_per_tick);
  v("water_decay_per_tick", p.water_decay_per_tick);
  v("health_loss_when_starving", p.health_loss_when_starving);
  v("health_regen_per_tick", p.health_regen_per_tick);
  v("regen_threshold", p.regen_threshold);
  v("food_per_harvest", p.food_per_harvest);
  v("water_per_drink", p.water_per_drink);
  v("forest_regen_probability", p.forest_regen_probability);
}

template <class V>
void visit_fields(StyleParams& p, V& v) {
  v("reach", p.reach);
  v("base_damage", p.base_damage);
  v("base_accuracy", p.base_accuracy);
}

template <class V>
void visit_fields(CombatParams& p, V& v) {
  v.section("melee", p.melee);
  v.section("range", p.range);
  v.section("mage", p.mage);
  v("attack_cooldown", p.attack_cooldown);
  v("accuracy_per_level", p.accuracy_per_level);
  v("damage_per_level", p.damage_per_level);
  v("accuracy_min", p.accuracy_min);
  v("accuracy_max", p.accuracy_max);
  v("friendly_fire", p.friendly_fire);
}

template <class V>
void visit_fields(ProgressionParams& p, V& v) {
  v("starting_level", p.starting_level);
  v("max_level", p.max_level);
  v("xp_per_harvest", p.xp_per_harvest);
  v("xp_per_hit", p.xp_per_hit);
  v("xp_threshold_base", p.xp_threshold_base);
  v("xp_threshold_growth", p.xp_threshold_growth);
  v("capacity_per_level", p.capacity_per_level);
  v("health_per_level", p.health_per_level);
}

template <class V>
void visit_fields(NpcParams& p, V& v) {
  v("npc_cap", p.npc_cap);
  v("level_min", p.level_min);
  v("level_max", p.level_max);
  v("passive_weight", p.disposition_weights[0]);
  v("neutral_weight", p.disposition_weights[1]);
  v("hostile_weight", p.disposition_weights[2]);
  v("armor_per_level", p.armor_per_level);
  v("base_health", p.base_health);
  v("health_per_level", p.health_per_level);
  v("vision_radius", p.vision_radius);
  v("leash_radius", p.leash_radius);
  v("wander_radius", p.wander_radius);
  v("flee_duration", p.flee_duration);
  v("neutral_drift_probability", p.neutral_drift_probability);
}

template <class V>
void visit_fields(WorldgenParams& p, V& v) {
  v("octaves_min", p.octaves_min);
  v("octaves_max", p.octaves_max);
  v("base_frequency", p.base_frequency);
  v("lacunarity", p.lacunarity);
  v("persistence", p.persistence);
  v("modulation_frequency", p.modulation_frequency);
  v("tile_thresholds", p.tile_thresholds);
  v("border_width", p.border_width);
}

template <class V>
void visit_fields(AchievementParams& p, V& v) {
  v("small_points", p.small_points);
  v("medium_points", p.medium_points);
  v("large_points", p.large_points);
  v("forage_level_small", p.forage_level_small);
  v("forage_level_medium", p.forage_level_medium);
  v("travel_small", p.travel_small);
  v("travel_medium", p.travel_medium);
  v("kills_small", p.kills_small);
  v("kills_medium", p.kills_medium);
  v("traverse_margin", p.traverse_margin);
}

template <class V>
void visit_fields(EnvConfig& c, V& v) {
  v("map_size", c.map_size);
  v("population_cap", c.population_cap);
  v("vision_range", c.vision_range);
  v("episode_horizon", c.episode_horizon);
  v("systems_enabled", c.systems_enabled);
  v("spawn_mode", c.spawn_mode);
  v("reward_mode", c.reward_mode);
  v("seed", c.seed);
  v.section("resource", c.resource_params);
  v.section("combat", c.combat_params);
  v.section("progression", c.progression_params);
  v.section("npc", c.npc_params);
  v.section("worldgen", c.worldgen_params);
  v.section("achievements", c.achievement_params);
}

constexpr std::array<std::pair<GameSystem, std::string_view>, 4> kSystemNames{{
    {GameSystem::Resource, "resource"},
    {GameSystem::Combat, "combat"},
    {GameSystem::Progression, "progression"},
    {GameSystem::NpcEquipment, "npc_equipment"},
}};

json to_json_value(const SystemSet& s) {
  json arr = json::array();
  for (auto [sys, name] : kSystemNames)
    if (s.enabled(sys)) arr.push_back(std::string(name));
  return arr;
}

json to_json_value(SpawnMode m) { return m == SpawnMode::Concurrent ? "concurrent" : "continuous"; }
json to_json_value(RewardMode m) { return m == RewardMode::Survival ? "survival" : "achievement"; }
template <class T>
json to_json_value(const T& v) {
  return json(v);
}

struct Writer {
  json out = json::object();

  template <class T>
  void operator()(const char* key, T& value) {
    out[key] = to_json_value(value);
  }
  template <class S>
  void section(const char* key, S& sub) {
    Writer w;
    visit_fields(sub, w);
    out[key] = std::move(w.out);
  }
};

struct KeyCollector {
  std::set<std::string>& keys;
  template <class T>
  void operator()(const char* k, T&) { keys.insert(k); }
  template <class T>
  void section(const char* k, T&) { keys.insert(k); }
};

struct Reader {
  const json& in;
  std::string path;

  [[nodiscard]] std::string where(const char* key) const {
    return path.empty() ? std::string(key) : path + "." + key;
  }

  void read(const json& j, const std::string& field, int& out) const {
    if (!j.is_number_integer()) throw ConfigError(field + ": expected integer");
    const auto v = j.get<long long>();
    if (v < INT32_MIN || v > INT32_MAX) throw ConfigError(field + ": integer out of range");
    out = static_cast<int>(v);
  }
  void read(const json& j, const std::string& field, std::uint64_t& out) const {
    if (!j.is_number_integer()) throw ConfigError(field + ": expected integer");
    if (j.is_number_unsigned()) {
      out = j.get<std::uint64_t>();
    } else {
      const auto v = j.get<long long>();
      if (v < 0) throw ConfigError(field + ": expected non-negative integer");
      out = static_cast<std::uint64_t>(v);
    }
  }
  void read(const json& j, const std::string& field, double& out) const {
    if (!j.is_number()) throw ConfigError(field + ": expected number");
    out = j.get<double>();
  }
  void read(const json& j, const std::string& field, bool& out) const {
    if (!j.is_boolean()) throw ConfigError(field + ": expected boolean");
    out = j.get<bool>();
  }
  void read(const json& j, const std::string& field, std::array<double, 3>& out) const {
    if (!j.is_array() || j.size() != 3) throw ConfigError(field + ": expected array of 3 numbers");
    for (std::size_t i = 0; i < 3; ++i) read(j[i], field, out[i]);
  }
  void read(const json& j, const std::string& field, SpawnMode& out) const {
    const std::string s = j.is_string() ? j.get<std::string>() : "";
    if (s == "concurrent") out = SpawnMode::Concurrent;
    else if (s == "continuous") out = SpawnMode::Continuous;
    else throw ConfigError(field + ": expected \"concurrent\" or \"continuous\"");
  }
  void read(const json& j, const std::string& field, RewardMode& out) const {
    const std::string s = j.is_string() ? j.get<std::string>() : "";
    if (s == "survival") out = RewardMode::Survival;
    else if (s == "achievement") out = RewardMode::Achievement;
    else throw ConfigError(field + ": expected \"survival\" or \"achievement\"");
  }
  void read(const json& j, const std::string& field, SystemSet& out) const {
    if (!j.is_array()) throw ConfigError(field + ": expected array of system names");
    out = SystemSet{false, false, false, false};
    for (const auto& e : j) {
      const std::string s = e.is_string() ? e.get<std::string>() : "";
      if (s == "resource") out.resource = true;
      else if (s == "combat") out.combat = true;
      else if (s == "progression") out.progression = true;
      else if (s == "npc_equipment") out.npc_equipment = true;
      else throw ConfigError(field + ": unknown system \"" + s + "\"");
    }
  }

  template <class T>
  void operator()(const char* key, T& value) const {
    if (auto it = in.find(key); it != in.end()) read(*it, where(key), value);
  }
  template <class S>
  void section(const char* key, S& sub) const {
    auto it = in.find(key);
    if (it == in.end()) return;
    read_section(*it, where(key), sub);
  }

  template <class S>
  static void read_section(const json& j, const std::string& path, S& sub) {
    if (!j.is_object()) throw ConfigError((path.empty() ? "config" : path) + ": expected object");
    std::set<std::string> known;
    KeyCollector collector{known};
    S scratch = sub;
    visit_fields(scratch, collector);
    for (const auto& [k, _] : j.items()) {
      if (!known.count(k))
        throw ConfigError("unknown key \"" + (path.empty() ? k : path + "." + k) + "\"");
    }
    Reader r{j, path};
    visit_fields(sub, r);
  }
};

void require(bool ok, const std::string& msg) {
  if (!ok) throw ConfigError("invalid config: " + msg);
}

void validate_style(const StyleParams& s, const std::string& name) {
  require(s.reach >= 1, "combat." + name + ".reach >= 1");
  require(s.base_damage >= 0, "combat." + name + ".base_damage >= 0");
  require(s.base_accuracy >= 0.0 && s.base_accuracy <= 1.0,
          "combat." + name + ".base_accuracy in [0, 1]");
}

}  // namespace

void validate(const EnvConfig& c) {
  require(c.vision_range >= 1, "vision_range >= 1");
  require(c.population_cap >= 1, "population_cap >= 1");
  require(c.episode_horizon >= 1, "episode_horizon >= 1");
  require(c.map_size >= 2 * c.vision_range + 2, "map_size >= 2*vision_range + 2");
  require(c.map_size <= 65535, "map_size <= 65535");
  require(!c.systems_enabled.progression || c.systems_enabled.resource || c.systems_enabled.combat,
          "progression requires resource or combat");

  const auto& r = c.resource_params;
  require(r.start_food >= 0 && r.max_food >= 0 && r.start_water >= 0 && r.max_water >= 0 &&
              r.start_health >= 0 && r.max_health >= 0,
          "resource vitals >= 0");
  require(r.start_food <= r.max_food, "resource.start_food <= resource.max_food");
  require(r.start_water <= r.max_water, "resource.start_water <= resource.max_water");
  require(r.start_health <= r.max_health, "resource.start_health <= resource.max_health");
  require(r.max_health >= 1, "resource.max_health >= 1");
  require(r.food_decay_per_tick >= 0 && r.water_decay_per_tick >= 0,
          "resource decay rates >= 0");
  require(r.health_loss_when_starving >= 0, "resource.health_loss_when_starving >= 0");
  require(r.health_regen_per_tick >= 0, "resource.health_regen_per_tick >= 0");
  require(r.regen_threshold >= 0, "resource.regen_threshold >= 0");
  require(r.food_per_harvest >= 0 && r.water_per_drink >= 0, "resource gains >= 0");
  require(r.forest_regen_probability >= 0.0 && r.forest_regen_probability <= 1.0,
          "resource.forest_regen_probability in [0, 1]");

  const auto& cb = c.combat_params;
  validate_style(cb.melee, "melee");
  validate_style(cb.range, "range");
  validate_style(cb.mage, "mage");
  require(cb.attack_cooldown >= 0, "combat.attack_cooldown >= 0");
  require(cb.accuracy_per_level >= 0.0, "combat.accuracy_per_level >= 0");
  require(cb.damage_per_level >= 0.0, "combat.damage_per_level >= 0");
  require(cb.accuracy_min >= 0.0 && cb.accuracy_min <= cb.accuracy_max && cb.accuracy_max <= 1.0,
          "0 <= combat.accuracy_min <= combat.accuracy_max <= 1");

  const auto& p = c.progression_params;
  require(p.starting_level >= 1, "progression.starting_level >= 1");
  require(p.max_level >= p.starting_level, "progression.max_level >= progression.starting_level");
  require(p.xp_per_harvest >= 0 && p.xp_per_hit >= 0, "progression xp rates >= 0");
  require(p.xp_threshold_base >= 1, "progression.xp_threshold_base >= 1");
  require(p.xp_threshold_growth >= 1.0 && std::isfinite(p.xp_threshold_growth),
          "progression.xp_threshold_growth >= 1");
  require(p.capacity_per_level >= 0 && p.health_per_level >= 0, "progression bonuses >= 0");

  const auto& n = c.npc_params;
  require(n.npc_cap >= 0, "npc.npc_cap >= 0");
  require(n.level_min >= 1, "npc.level_min >= 1");
  require(n.level_min <= n.level_max, "npc.level_min <= npc.level_max");
  require(n.disposition_weights[0] >= 0 && n.disposition_weights[1] >= 0 &&
              n.disposition_weights[2] >= 0,
          "npc disposition weights >= 0");
  require(n.disposition_weights[0] + n.disposition_weights[1] + n.disposition_weights[2] > 0,
          "npc disposition weights not all zero");
  require(n.armor_per_level >= 0.0, "npc.armor_per_level >= 0");
  require(n.base_health >= 1 && n.health_per_level >= 0, "npc health >= 1");
  require(n.vision_radius >= 1 && n.leash_radius >= 1 && n.wander_radius >= 0 &&
              n.flee_duration >= 0,
          "npc radii and durations");
  require(n.neutral_drift_probability >= 0.0 && n.neutral_drift_probability <= 1.0,
          "npc.neutral_drift_probability in [0, 1]");

  const auto& w = c.worldgen_params;
  require(w.octaves_min >= 1, "worldgen.octaves_min >= 1");
  require(w.octaves_min <= w.octaves_max, "worldgen.octaves_min <= worldgen.octaves_max");
  require(w.octaves_max <= 16, "worldgen.octaves_max <= 16");
  require(w.base_frequency > 0.0, "worldgen.base_frequency > 0");
  require(w.modulation_frequency > 0.0, "worldgen.modulation_frequency > 0");
  require(w.lacunarity > 1.0, "worldgen.lacunarity > 1");
  require(w.persistence > 0.0 && w.persistence < 1.0, "worldgen.persistence in (0, 1)");
  const auto& t = w.tile_thresholds;
  require(t[0] >= -1.0 && t[2] <= 1.0, "worldgen.tile_thresholds in [-1, 1]");
  require(t[0] < t[1] && t[1] < t[2], "worldgen.tile_thresholds strictly increasing");
  require(w.border_width >= 0, "worldgen.border_width >= 0");
  require(c.map_size - 2 * w.border_width >= 2, "map interior (map_size - 2*border_width) >= 2");

  const auto& a = c.achievement_params;
  require(a.small_points >= 0 && a.medium_points >= 0 && a.large_points >= 0,
          "achievement points >= 0");
  require(a.traverse_margin >= 1, "achievements.traverse_margin >= 1");
}

EnvConfig load_config(std::string_view document) {
  json j;
  try {
    j = json::parse(document.begin(), document.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  EnvConfig cfg;
  Reader::read_section(j, "", cfg);
  validate(cfg);
  return cfg;
}

EnvConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_config(ss.str());
}

std::string render_config(const EnvConfig& cfg) {
  EnvConfig copy = cfg;
  Writer w;
  visit_fields(copy, w);
  return w.out.dump(2) + "\n";
}

EnvConfig canonical(std::string_view name) {
  EnvConfig c;
  if (name == "SmallMaps") {
    return c;
  }
  if (name == "LargeMaps") {
    c.map_size = 1024;
    c.population_cap = 1024;
    c.episode_horizon = 8192;
    c.npc_params.npc_cap = 1024;
    c.worldgen_params.border_width = 16;
    c.worldgen_params.modulation_frequency = 1.0 / 256.0;
    return c;
  }
  throw ConfigError("unknown canonical config \"" + std::string(name) +
                    "\" (expected SmallMaps or LargeMaps)");
}

std::uint64_t config_digest(const EnvConfig& cfg) {
  return fnv1a64(render_config(cfg));
}

}  // namespace nmmo
