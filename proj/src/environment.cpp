#include "nmmo/environment.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "nmmo/worldgen.hpp"

namespace nmmo {

using nlohmann::json;

// ---- Rewards ---------------------------------------------------------------

const AgentState* RewardContext::agent(EntityId id) const {
  if (const AgentState* a = world.find_agent(id)) return a;
  for (const auto& d : report.dead_agents)
    if (d.id == id) return &d;
  return nullptr;
}

bool RewardContext::died(EntityId id) const {
  return std::any_of(report.dead_agents.begin(), report.dead_agents.end(),
                     [&](const AgentState& a) { return a.id == id; });
}

double survival_reward(EntityId id, const TickReport& report) {
  for (const auto& d : report.deaths)
    if (!d.is_npc && d.id == id) return -1.0;
  return 0.0;
}

double achievement_reward(EntityId id, const TickReport& report) {
  double r = 0.0;
  for (const auto& u : report.achievements)
    if (u.id == id) r += u.points;
  return r;
}

std::map<EntityId, double> survival_rewards(const RewardContext& ctx) {
  std::map<EntityId, double> out;
  for (EntityId id : ctx.report.acted) out[id] = survival_reward(id, ctx.report);
  return out;
}

std::map<EntityId, double> achievement_rewards(const RewardContext& ctx) {
  std::map<EntityId, double> out;
  for (EntityId id : ctx.report.acted) out[id] = achievement_reward(id, ctx.report);
  return out;
}

// ---- Lifetime logs ---------------------------------------------------------

json lifetime_metrics(const AgentState& a, std::optional<DeathCause> cause) {
  json skills = json::object();
  for (int s = 0; s < kSkillCount; ++s)
    skills[std::string(skill_name(static_cast<Skill>(s)))] = a.skills.skills[s].level;
  static constexpr const char* kCauses[] = {"combat", "starvation", "lava"};
  return json{
      {"population", a.population_tag},
      {"slot", a.slot},
      {"spawn_tick", a.spawn_tick},
      {"lifetime", a.lifetime},
      {"kills", a.kills},
      {"equipment", a.equipment_level},
      {"explore", manhattan(a.position, a.spawn_position)},
      {"forage", 0.5 * (a.skills.level(Skill::Hunting) + a.skills.level(Skill::Fishing))},
      {"achievement", a.diary.score},
      {"skills", skills},
      {"cause", cause ? json(kCauses[static_cast<int>(*cause)]) : json("alive")},
  };
}

void write_lifetime_logs(const std::vector<LifetimeLog>& logs, std::ostream& out) {
  for (const auto& l : logs) out << json{{"id", l.id}, {"metrics", l.metrics}}.dump() << '\n';
}

std::vector<LifetimeLog> read_lifetime_logs(std::istream& in) {
  std::vector<LifetimeLog> logs;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    logs.push_back({j.at("id").get<EntityId>(), j.at("metrics")});
  }
  return logs;
}

// ---- Overlays --------------------------------------------------------------

double Overlay::total() const {
  double t = 0.0;
  for (double v : values) t += v;
  return t;
}

OverlaySet::OverlaySet(int map_size) : size_(map_size) {
  const auto n = static_cast<std::size_t>(map_size) * map_size;
  overlays_[kVisitationOverlay] = {kVisitationOverlay, map_size, std::vector<double>(n, 0.0)};
  overlays_[kDeathsOverlay] = {kDeathsOverlay, map_size, std::vector<double>(n, 0.0)};
}

void OverlaySet::update(const std::string& name, std::vector<double> grid) {
  if (grid.size() != static_cast<std::size_t>(size_) * size_)
    throw OverlayError("overlay \"" + name + "\" has " + std::to_string(grid.size()) +
                       " cells; map has " + std::to_string(size_ * size_));
  overlays_[name] = {name, size_, std::move(grid)};
}

void OverlaySet::record_tick(const WorldState& world, const TickReport& report) {
  Overlay& visits = overlays_.at(kVisitationOverlay);
  for (const auto& a : world.agents)
    if (a.spawn_tick <= report.tick) visits.at(a.position) += 1.0;
  Overlay& deaths = overlays_.at(kDeathsOverlay);
  for (const auto& d : report.deaths)
    if (!d.is_npc && world.map.in_bounds(d.position)) deaths.at(d.position) += 1.0;
}

const Overlay& OverlaySet::get(const std::string& name) const {
  auto it = overlays_.find(name);
  if (it == overlays_.end()) throw OverlayError("no overlay named \"" + name + "\"");
  return it->second;
}

std::vector<Overlay> OverlaySet::render() const {
  std::vector<Overlay> out;
  out.reserve(overlays_.size());
  for (const auto& [_, o] : overlays_) out.push_back(o);
  return out;
}

void write_overlay_csv(const Overlay& o, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw OverlayError("cannot write " + path.string());
  char buf[32];
  for (int r = 0; r < o.size; ++r) {
    for (int c = 0; c < o.size; ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", o.at({r, c}));
      if (c) out << ',';
      out << buf;
    }
    out << '\n';
  }
}

Overlay read_overlay_csv(const std::filesystem::path& path, const std::string& name) {
  std::ifstream in(path);
  if (!in) throw OverlayError("cannot read " + path.string());
  Overlay o;
  o.name = name;
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    int cols = 0;
    while (std::getline(ss, cell, ',')) {
      o.values.push_back(std::strtod(cell.c_str(), nullptr));
      ++cols;
    }
    if (rows == 0) o.size = cols;
    if (cols != o.size) throw OverlayError("ragged overlay row in " + path.string());
    ++rows;
  }
  if (rows != o.size) throw OverlayError("overlay in " + path.string() + " is not square");
  return o;
}

void write_overlay_pgm(const Overlay& o, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw OverlayError("cannot write " + path.string());
  const double hi = o.values.empty() ? 0.0 : *std::max_element(o.values.begin(), o.values.end());
  out << "P5\n" << o.size << ' ' << o.size << "\n255\n";
  for (double v : o.values) {
    const double x = hi > 0.0 ? std::clamp(v / hi, 0.0, 1.0) : 0.0;
    out.put(static_cast<char>(static_cast<unsigned char>(x * 255.0 + 0.5)));
  }
}

// ---- Environment -----------------------------------------------------------

Environment::Environment(EnvConfig config, std::vector<TileMap> pool, EngineOptions options)
    : config_(std::move(config)), options_(options), pool_(std::move(pool)),
      overlays_(config_.map_size), next_seed_(config_.seed) {
  validate(config_);
  if (pool_.empty()) throw std::invalid_argument("map pool is empty");
  for (const auto& m : pool_)
    if (m.size() != config_.map_size) throw std::invalid_argument("pool map size does not match config");
}

Environment::Environment(EnvConfig config, EngineOptions options)
    : Environment(config, {generate_map(config)}, options) {}

const std::map<EntityId, Observation>& Environment::reset(std::optional<std::uint64_t> episode_seed,
                                                           ResetOptions reset_options) {
  episode_seed_ = episode_seed ? *episode_seed : next_seed_++;
  EnvConfig cfg = config_;
  cfg.seed = episode_seed_;
  const TileMap& map = pool_[episode_seed_ % pool_.size()];
  world_.emplace(nmmo::reset(cfg, map, options_, std::move(reset_options)));
  overlays_ = OverlaySet(config_.map_size);
  logs_.clear();
  refresh_observations();
  return observations_;
}

void Environment::refresh_observations() {
  observations_.clear();
  for (const auto& a : world_->agents) select_observation(*world_, a.id, observations_[a.id]);
}

LifetimeLog Environment::make_log(const AgentState& a, std::optional<DeathCause> cause) const {
  LifetimeLog log{a.id, lifetime_metrics(a, cause)};
  if (logger_) log.metrics["user"] = logger_(a, *world_);
  return log;
}

int Environment::register_reward(RewardFn fn) {
  reward_ = std::move(fn);
  return ++reward_handle_;
}

StepResult Environment::step(const std::map<EntityId, ActionSet>& actions,
                             const std::vector<DroppedAction>& pre_dropped) {
  if (!world_) throw std::logic_error("step before reset");
  StepResult out;
  std::map<EntityId, Position> previous;
  for (const auto& a : world_->agents) previous.emplace(a.id, a.position);

  out.report = tick(*world_, actions);
  const TickReport& rep = out.report;
  overlays_.record_tick(*world_, rep);

  const RewardContext ctx{*world_, rep, previous};
  std::map<EntityId, double> rewards;
  if (reward_) rewards = reward_(ctx);
  else if (config_.reward_mode == RewardMode::Achievement) rewards = achievement_rewards(ctx);
  else rewards = survival_rewards(ctx);

  const bool over = world_->episode_over();
  out.episode_over = over;
  for (EntityId id : rep.acted) {
    auto it = rewards.find(id);
    out.rewards[id] = it == rewards.end() ? 0.0 : it->second;
    out.dones[id] = over;
  }

  auto info = [&](EntityId id) -> json& {
    auto [it, _] = out.infos.try_emplace(id, json::object());
    return it->second;
  };
  for (const auto* list : {&pre_dropped, &rep.dropped}) {
    for (const auto& d : *list) info(d.id)["dropped"].push_back(std::string(drop_reason_name(d.reason)));
  }
  for (const auto& dead : rep.dead_agents) {
    std::optional<DeathCause> cause;
    for (const auto& d : rep.deaths)
      if (!d.is_npc && d.id == dead.id) cause = d.cause;
    LifetimeLog log = make_log(dead, cause);
    info(dead.id)["lifetime"] = log.metrics;
    logs_.push_back(std::move(log));
    out.dones[dead.id] = true;
  }
  if (over) {
    for (const auto& a : world_->agents) {
      LifetimeLog log = make_log(a, std::nullopt);
      info(a.id)["lifetime"] = log.metrics;
      logs_.push_back(std::move(log));
      out.dones[a.id] = true;
    }
  }
  refresh_observations();
  out.observations = &observations_;
  return out;
}

}  // namespace nmmo
