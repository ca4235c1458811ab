#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>

#include "nmmo/environment.hpp"
#include "nmmo/evaluation.hpp"
#include "nmmo/policies.hpp"
#include "nmmo/replay.hpp"
#include "nmmo/world.hpp"
#include "nmmo/worldgen.hpp"

namespace py = pybind11;
using namespace nmmo;

namespace {

// Bumped whenever the Python layer needs a matching native module.
constexpr int kBindingAbi = 1;

py::object to_python(const nlohmann::json& j) {
  switch (j.type()) {
    case nlohmann::json::value_t::null: return py::none();
    case nlohmann::json::value_t::boolean: return py::bool_(j.get<bool>());
    case nlohmann::json::value_t::number_integer: return py::int_(j.get<std::int64_t>());
    case nlohmann::json::value_t::number_unsigned: return py::int_(j.get<std::uint64_t>());
    case nlohmann::json::value_t::number_float: return py::float_(j.get<double>());
    case nlohmann::json::value_t::string: return py::str(j.get<std::string>());
    case nlohmann::json::value_t::array: {
      py::list out;
      for (const auto& v : j) out.append(to_python(v));
      return out;
    }
    case nlohmann::json::value_t::object: {
      py::dict out;
      for (const auto& [k, v] : j.items()) out[py::str(k)] = to_python(v);
      return out;
    }
    default: return py::none();
  }
}

template <std::size_t N>
py::array_t<std::int32_t> rows_array(const std::vector<std::array<std::int32_t, N>>& rows) {
  py::array_t<std::int32_t> out({static_cast<py::ssize_t>(rows.size()), static_cast<py::ssize_t>(N)});
  auto v = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t c = 0; c < N; ++c) v(static_cast<py::ssize_t>(i), static_cast<py::ssize_t>(c)) = rows[i][c];
  return out;
}

py::dict observation_dict(const Observation& obs) {
  py::dict d;
  d["tiles"] = rows_array(obs.tiles);
  d["entities"] = rows_array(obs.entities);
  d["self"] = obs.self_row_index;
  return d;
}

py::dict observations_dict(const std::map<EntityId, Observation>& all) {
  py::dict d;
  for (const auto& [id, obs] : all) d[py::int_(id)] = observation_dict(obs);
  return d;
}

py::dict action_dict(const ActionSet& a) {
  py::dict d;
  d["move"] = a.move ? py::object(py::int_(static_cast<int>(*a.move))) : py::object(py::none());
  if (a.attack)
    d["attack"] = py::make_tuple(static_cast<int>(a.attack->style), a.attack->target);
  else
    d["attack"] = py::none();
  return d;
}

/// Decodes {"move": dir|None, "attack": (style, target)|None}; nullopt when malformed.
std::optional<ActionSet> decode_action(const py::handle& h) {
  if (!py::isinstance<py::dict>(h)) return std::nullopt;
  const auto d = py::reinterpret_borrow<py::dict>(h);
  for (const auto& [k, _] : d) {
    if (!py::isinstance<py::str>(k)) return std::nullopt;
    const auto key = k.cast<std::string>();
    if (key != "move" && key != "attack") return std::nullopt;
  }
  ActionSet a;
  try {
    if (d.contains("move") && !d["move"].is_none()) {
      const int m = d["move"].cast<int>();
      if (m < 0 || m >= 4) return std::nullopt;
      a.move = static_cast<Direction>(m);
    }
    if (d.contains("attack") && !d["attack"].is_none()) {
      const auto t = d["attack"].cast<py::sequence>();
      if (py::len(t) != 2) return std::nullopt;
      const int style = t[0].cast<int>();
      if (style < 0 || style >= 3) return std::nullopt;
      a.attack = AttackIntent{static_cast<CombatStyle>(style), t[1].cast<EntityId>()};
    }
  } catch (const py::cast_error&) {
    return std::nullopt;
  }
  return a;
}

class BoundEnv {
 public:
  BoundEnv(const std::string& config_json, std::optional<std::vector<std::uint64_t>> map_seeds) {
    const EnvConfig cfg = load_config(config_json);
    if (map_seeds && !map_seeds->empty()) {
      std::vector<TileMap> pool;
      for (auto s : *map_seeds) {
        EnvConfig c = cfg;
        c.seed = s;
        pool.push_back(generate_map(c));
      }
      env_ = std::make_unique<Environment>(cfg, std::move(pool));
    } else {
      env_ = std::make_unique<Environment>(cfg);
    }
  }

  Environment& env() {
    if (!env_) throw std::runtime_error("environment is closed");
    return *env_;
  }

  py::dict reset(std::optional<std::uint64_t> seed) { return observations_dict(env().reset(seed)); }

  py::tuple step(const py::dict& actions) {
    Environment& e = env();
    std::map<EntityId, ActionSet> decoded;
    std::vector<DroppedAction> malformed;
    py::list bad_keys;
    for (const auto& [k, v] : actions) {
      EntityId id = kNoEntity;
      try {
        id = k.cast<EntityId>();
      } catch (const py::cast_error&) {
        bad_keys.append(py::repr(k));
        continue;
      }
      if (auto a = decode_action(v))
        decoded[id] = *a;
      else
        malformed.push_back({id, DropReason::InvalidEncoding});
    }
    const StepResult r = e.step(decoded, malformed);
    py::dict rewards, dones, infos;
    for (const auto& [id, v] : r.rewards) rewards[py::int_(id)] = v;
    for (const auto& [id, v] : r.dones) dones[py::int_(id)] = v;
    for (const auto& [id, v] : r.infos) infos[py::int_(id)] = to_python(v);
    if (!bad_keys.empty()) infos["malformed_keys"] = bad_keys;
    return py::make_tuple(observations_dict(*r.observations), rewards, dones, infos);
  }

  void close() { env_.reset(); }
  [[nodiscard]] bool closed() const { return !env_; }

 private:
  std::unique_ptr<Environment> env_;
};

class BoundPolicy {
 public:
  explicit BoundPolicy(const std::string& preset) : spec_(policy_preset(preset)) {}

  /// Actions for every live agent. Per-agent rng streams match native rollouts.
  py::dict act(BoundEnv& bound) {
    Environment& env = bound.env();
    if (!seed_ || *seed_ != env.episode_seed() || env.world().tick < last_tick_) {
      rngs_.clear();
      seed_ = env.episode_seed();
    }
    last_tick_ = env.world().tick;
    const PolicyContext ctx = PolicyContext::from(env.config());
    py::dict out;
    for (const auto& [id, obs] : env.observations()) {
      auto it = rngs_.try_emplace(id, agent_rng(env.episode_seed(), id)).first;
      out[py::int_(id)] = action_dict(scripted_act(obs, spec_, ctx, it->second));
    }
    return out;
  }

  [[nodiscard]] const std::string& name() const { return spec_.name; }

 private:
  PolicySpec spec_;
  std::optional<std::uint64_t> seed_;
  int last_tick_ = 0;
  std::map<EntityId, CounterRng> rngs_;
};

py::list column_names(std::initializer_list<const char*> names) {
  py::list l;
  for (const char* n : names) l.append(n);
  return l;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Native many-agent survival engine";
  m.attr("BINDING_ABI") = kBindingAbi;
  m.attr("ENGINE_VERSION") = std::string(kEngineVersion);
  m.attr("TILE_COLUMNS") = column_names({"row", "col", "material"});
  m.attr("ENTITY_COLUMNS") =
      column_names({"id", "kind", "population", "disposition", "row", "col", "health", "max_health", "food",
                    "water", "hunting", "fishing", "constitution", "melee", "range", "mage", "defense",
                    "equipment"});
  m.attr("DIRECTIONS") = column_names({"north", "south", "east", "west"});
  m.attr("STYLES") = column_names({"melee", "range", "mage"});

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<OverlayError>(m, "OverlayError", PyExc_KeyError);

  m.def("canonical_config", [](const std::string& name) { return render_config(canonical(name)); });
  m.def("normalize_config", [](const std::string& doc) { return render_config(load_config(doc)); },
        "Parses, validates and re-renders a JSON config document.");
  m.def("policy_presets", [] { return policy_preset_names(); });

  py::class_<BoundEnv>(m, "Env")
      .def(py::init<const std::string&, std::optional<std::vector<std::uint64_t>>>(), py::arg("config_json"),
           py::arg("map_seeds") = py::none())
      .def("reset", &BoundEnv::reset, py::arg("seed") = py::none())
      .def("step", &BoundEnv::step, py::arg("actions"))
      .def("close", &BoundEnv::close)
      .def_property_readonly("closed", &BoundEnv::closed)
      .def_property_readonly("tick", [](BoundEnv& b) { return b.env().world().tick; })
      .def_property_readonly("episode_over", [](BoundEnv& b) { return b.env().episode_over(); })
      .def_property_readonly("episode_seed", [](BoundEnv& b) { return b.env().episode_seed(); })
      .def_property_readonly("config_json", [](BoundEnv& b) { return render_config(b.env().config()); })
      .def("digest", [](BoundEnv& b) { return digest(b.env().world()); })
      .def("observations", [](BoundEnv& b) { return observations_dict(b.env().observations()); })
      .def("lifetime_logs",
           [](BoundEnv& b) {
             py::list out;
             for (const auto& l : b.env().lifetime_logs()) {
               py::dict d = to_python(l.metrics);
               d["id"] = l.id;
               out.append(d);
             }
             return out;
           })
      .def("overlay_names",
           [](BoundEnv& b) {
             std::vector<std::string> names;
             for (const auto& o : b.env().render_overlays()) names.push_back(o.name);
             return names;
           })
      .def("overlay",
           [](BoundEnv& b, const std::string& name) {
             const Overlay& o = b.env().overlays().get(name);
             py::array_t<double> out({o.size, o.size});
             std::copy(o.values.begin(), o.values.end(), out.mutable_data());
             return out;
           })
      .def("update_overlay", [](BoundEnv& b, const std::string& name, py::array_t<double, py::array::c_style> grid) {
        b.env().update_overlay(name, std::vector<double>(grid.data(), grid.data() + grid.size()));
      });

  py::class_<BoundPolicy>(m, "ScriptedPolicy")
      .def(py::init<const std::string&>(), py::arg("preset"))
      .def_property_readonly("name", &BoundPolicy::name)
      .def("act", &BoundPolicy::act, py::arg("env"));
}
