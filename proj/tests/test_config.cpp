#include <functional>
#include <random>

#include "doctest.h"
#include "nmmo/config.hpp"

using namespace nmmo;

TEST_CASE("canonical configs") {
  const EnvConfig small = canonical("SmallMaps");
  CHECK(small.map_size == 128);
  CHECK(small.population_cap == 256);
  CHECK(small.episode_horizon == 1024);
  CHECK(small.vision_range == 7);
  const EnvConfig large = canonical("LargeMaps");
  CHECK(large.map_size == 1024);
  CHECK(large.population_cap == 1024);
  CHECK(large.episode_horizon == 8192);
  for (const auto& cfg : {small, large}) {
    CHECK_NOTHROW(validate(cfg));
    for (auto s : {GameSystem::Resource, GameSystem::Combat, GameSystem::Progression,
                   GameSystem::NpcEquipment})
      CHECK(cfg.systems_enabled.enabled(s));
  }
  CHECK_THROWS_AS(canonical("MediumMaps"), ConfigError);
}

TEST_CASE("load_config defaults and overrides") {
  CHECK(load_config("{}") == EnvConfig{});
  const EnvConfig c = load_config(R"({"map_size": 64, "combat": {"melee": {"reach": 2}},
                                      "systems_enabled": ["resource"], "spawn_mode": "continuous"})");
  CHECK(c.map_size == 64);
  CHECK(c.combat_params.melee.reach == 2);
  CHECK(c.combat_params.range.reach == EnvConfig{}.combat_params.range.reach);
  CHECK(c.systems_enabled == SystemSet{true, false, false, false});
  CHECK(c.spawn_mode == SpawnMode::Continuous);
}

TEST_CASE("load_config errors") {
  auto message = [](const std::string& doc) {
    try {
      load_config(doc);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message(R"({"vision_range": 0})").find("vision_range >= 1") != std::string::npos);
  CHECK(message(R"({"vison_range": 3})").find("unknown key \"vison_range\"") != std::string::npos);
  CHECK(message(R"({"combat": {"melee": {"rech": 1}}})").find("combat.melee.rech") != std::string::npos);
  CHECK(message(R"({"map_size": )").find("parse error") != std::string::npos);
  CHECK(message(R"({"systems_enabled": ["magic"]})").find("magic") != std::string::npos);
  CHECK(message(R"({"map_size": "big"})") != "");
  CHECK(message(R"({"systems_enabled": ["progression"]})").find("progression requires") !=
        std::string::npos);
}

namespace {

EnvConfig random_valid_config(std::mt19937_64& g) {
  auto ri = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(g); };
  auto rd = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(g); };
  EnvConfig c;
  c.vision_range = ri(1, 10);
  c.map_size = ri(2 * c.vision_range + 2, 300);
  c.population_cap = ri(1, 2000);
  c.episode_horizon = ri(1, 10000);
  c.systems_enabled = {ri(0, 1) == 1, ri(0, 1) == 1, false, ri(0, 1) == 1};
  c.systems_enabled.progression = (c.systems_enabled.resource || c.systems_enabled.combat) && ri(0, 1);
  c.spawn_mode = ri(0, 1) ? SpawnMode::Continuous : SpawnMode::Concurrent;
  c.reward_mode = ri(0, 1) ? RewardMode::Survival : RewardMode::Achievement;
  auto& r = c.resource_params;
  r.max_food = ri(0, 100);
  r.start_food = ri(0, r.max_food);
  r.max_water = ri(0, 100);
  r.start_water = ri(0, r.max_water);
  r.max_health = ri(1, 100);
  r.start_health = ri(0, r.max_health);
  r.forest_regen_probability = rd(0, 1);
  auto& cb = c.combat_params;
  cb.melee = {ri(1, 5), ri(0, 9), rd(0, 1)};
  cb.mage.base_accuracy = rd(0, 1);
  cb.accuracy_per_level = rd(0, 0.1);
  auto& p = c.progression_params;
  p.starting_level = ri(1, 5);
  p.max_level = ri(p.starting_level, 120);
  p.xp_threshold_growth = rd(1, 2);
  auto& n = c.npc_params;
  n.level_min = ri(1, 5);
  n.level_max = ri(n.level_min, 30);
  n.disposition_weights = {rd(0, 1), rd(0, 1), rd(0.01, 1)};
  n.armor_per_level = rd(0, 2);
  auto& w = c.worldgen_params;
  w.octaves_min = ri(1, 4);
  w.octaves_max = ri(w.octaves_min, 8);
  w.base_frequency = rd(0.001, 0.5);
  w.lacunarity = rd(1.1, 3);
  w.persistence = rd(0.1, 0.9);
  w.tile_thresholds = {rd(-1, -0.4), rd(-0.3, 0.2), rd(0.25, 1)};
  w.border_width = ri(0, (c.map_size - 2) / 2);
  c.seed = g();
  return c;
}

}  // namespace

TEST_CASE("render/load round trip") {
  std::mt19937_64 g(17);
  for (int i = 0; i < 300; ++i) {
    const EnvConfig c = random_valid_config(g);
    REQUIRE_NOTHROW(validate(c));
    const EnvConfig back = load_config(render_config(c));
    CHECK(back == c);
    CHECK(config_digest(back) == config_digest(c));
  }
  for (const char* name : {"SmallMaps", "LargeMaps"}) {
    const EnvConfig c = canonical(name);
    CHECK(load_config(render_config(c)) == c);
  }
}

TEST_CASE("config digest is sensitive to every field change") {
  EnvConfig a;
  EnvConfig b = a;
  b.resource_params.regen_threshold += 1;
  CHECK(config_digest(a) != config_digest(b));
}

TEST_CASE("validation rejects single-field violations") {
  using Mutation = std::function<void(EnvConfig&)>;
  const std::vector<std::pair<const char*, Mutation>> mutations = {
      {"vision_range", [](EnvConfig& c) { c.vision_range = 0; }},
      {"population_cap", [](EnvConfig& c) { c.population_cap = 0; }},
      {"episode_horizon", [](EnvConfig& c) { c.episode_horizon = 0; }},
      {"map_size", [](EnvConfig& c) { c.map_size = 2 * c.vision_range + 1; }},
      {"progression", [](EnvConfig& c) { c.systems_enabled = {false, false, true, true}; }},
      {"start_food", [](EnvConfig& c) { c.resource_params.start_food = c.resource_params.max_food + 1; }},
      {"start_water", [](EnvConfig& c) { c.resource_params.start_water = c.resource_params.max_water + 1; }},
      {"start_health", [](EnvConfig& c) { c.resource_params.start_health = c.resource_params.max_health + 1; }},
      {"food_decay", [](EnvConfig& c) { c.resource_params.food_decay_per_tick = -1; }},
      {"regen_prob", [](EnvConfig& c) { c.resource_params.forest_regen_probability = 1.5; }},
      {"regen_prob_neg", [](EnvConfig& c) { c.resource_params.forest_regen_probability = -0.1; }},
      {"reach", [](EnvConfig& c) { c.combat_params.range.reach = 0; }},
      {"accuracy", [](EnvConfig& c) { c.combat_params.mage.base_accuracy = 1.01; }},
      {"cooldown", [](EnvConfig& c) { c.combat_params.attack_cooldown = -1; }},
      {"acc_clamp", [](EnvConfig& c) { c.combat_params.accuracy_min = 0.99; }},
      {"starting_level", [](EnvConfig& c) { c.progression_params.starting_level = 0; }},
      {"threshold_base", [](EnvConfig& c) { c.progression_params.xp_threshold_base = 0; }},
      {"growth", [](EnvConfig& c) { c.progression_params.xp_threshold_growth = 0.9; }},
      {"npc_levels", [](EnvConfig& c) { c.npc_params.level_min = c.npc_params.level_max + 1; }},
      {"npc_weights_neg", [](EnvConfig& c) { c.npc_params.disposition_weights[1] = -1; }},
      {"npc_weights_zero", [](EnvConfig& c) { c.npc_params.disposition_weights = {0, 0, 0}; }},
      {"armor", [](EnvConfig& c) { c.npc_params.armor_per_level = -0.5; }},
      {"octaves", [](EnvConfig& c) { c.worldgen_params.octaves_min = c.worldgen_params.octaves_max + 1; }},
      {"frequency", [](EnvConfig& c) { c.worldgen_params.base_frequency = 0; }},
      {"lacunarity", [](EnvConfig& c) { c.worldgen_params.lacunarity = 1.0; }},
      {"persistence", [](EnvConfig& c) { c.worldgen_params.persistence = 1.0; }},
      {"thresholds", [](EnvConfig& c) { c.worldgen_params.tile_thresholds = {0.2, 0.1, 0.3}; }},
      {"border", [](EnvConfig& c) { c.worldgen_params.border_width = c.map_size / 2; }},
  };
  std::mt19937_64 g(99);
  for (int trial = 0; trial < 20; ++trial) {
    const EnvConfig base = trial == 0 ? EnvConfig{} : random_valid_config(g);
    for (const auto& [name, mutate] : mutations) {
      EnvConfig c = base;
      mutate(c);
      CAPTURE(name);
      CHECK_THROWS_AS(validate(c), ConfigError);
      CHECK_THROWS_AS(load_config(render_config(c)), ConfigError);
    }
  }
}
