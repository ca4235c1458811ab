#include "nmmo/replay.hpp"

#include <cstring>
#include <iterator>

#include "nmmo/hash.hpp"
#include "nmmo/worldgen.hpp"

namespace nmmo {

using nlohmann::json;

namespace {

class Writer {
 public:
  template <class T>
  void put(T v) {
    using U = std::make_unsigned_t<T>;
    auto u = static_cast<U>(v);
    for (std::size_t i = 0; i < sizeof(T); ++i) bytes.push_back(static_cast<std::uint8_t>(u >> (8 * i)));
  }
  void put_bytes(const std::vector<std::uint8_t>& b) {
    put<std::uint32_t>(static_cast<std::uint32_t>(b.size()));
    bytes.insert(bytes.end(), b.begin(), b.end());
  }
  void put_string(const std::string& s) { put_bytes({s.begin(), s.end()}); }

  std::vector<std::uint8_t> bytes;
};

class Reader {
 public:
  Reader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}

  template <class T>
  T get() {
    using U = std::make_unsigned_t<T>;
    need(sizeof(T));
    U u = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) u |= static_cast<U>(static_cast<U>(data_[pos_ + i]) << (8 * i));
    pos_ += sizeof(T);
    return static_cast<T>(u);
  }
  std::vector<std::uint8_t> get_bytes() {
    const auto n = get<std::uint32_t>();
    need(n);
    std::vector<std::uint8_t> out(data_ + pos_, data_ + pos_ + n);
    pos_ += n;
    return out;
  }
  std::string get_string() {
    const auto b = get_bytes();
    return {b.begin(), b.end()};
  }
  [[nodiscard]] bool done() const { return pos_ == size_; }

 private:
  void need(std::size_t n) const {
    if (size_ - pos_ < n) throw ReplayError("record payload ends early");
  }
  const std::uint8_t* data_;
  std::size_t size_;
  std::size_t pos_ = 0;
};

std::uint64_t record_checksum(std::uint8_t type, const std::uint8_t* payload, std::size_t n) {
  std::string buf(1, static_cast<char>(type));
  buf.append(reinterpret_cast<const char*>(payload), n);
  return fnv1a64(buf);
}

json header_meta(const ReplayHeader& h) {
  return json{{"engine_version", h.engine_version},
              {"config", json::parse(render_config(h.config))},
              {"tie_break", static_cast<int>(h.engine.tie_break)},
              {"check_invariants", h.engine.check_invariants},
              {"compaction_interval", h.engine.compaction_interval},
              {"policies", h.policies},
              {"slot_policy", h.slot_policy},
              {"teams", h.teams}};
}

std::vector<std::uint8_t> encode_header(const ReplayHeader& h) {
  Writer w;
  w.put(h.major);
  w.put(h.minor);
  w.put(h.config_digest);
  w.put(h.map_seed);
  w.put(h.episode_seed);
  w.put(h.initial_digest);
  w.put_string(header_meta(h).dump());
  w.put_bytes(encode_map(h.map));
  return w.bytes;
}

ReplayHeader decode_header(Reader& r) {
  ReplayHeader h;
  h.major = r.get<std::uint16_t>();
  h.minor = r.get<std::uint16_t>();
  if (h.major != kReplayMajor)
    throw ReplayError("replay format major version " + std::to_string(h.major) + " is not supported (expected " +
                      std::to_string(kReplayMajor) + ")");
  h.config_digest = r.get<std::uint64_t>();
  h.map_seed = r.get<std::uint64_t>();
  h.episode_seed = r.get<std::uint64_t>();
  h.initial_digest = r.get<std::uint64_t>();
  const json meta = json::parse(r.get_string());
  h.engine_version = meta.at("engine_version").get<std::string>();
  h.config = load_config(meta.at("config").dump());
  h.engine.tie_break = static_cast<TieBreak>(meta.at("tie_break").get<int>());
  h.engine.check_invariants = meta.at("check_invariants").get<bool>();
  h.engine.compaction_interval = meta.at("compaction_interval").get<int>();
  h.policies = meta.at("policies").get<std::vector<std::string>>();
  h.slot_policy = meta.at("slot_policy").get<std::vector<int>>();
  h.teams = meta.at("teams").get<bool>();
  h.map = decode_map(r.get_bytes());
  if (config_digest(h.config) != h.config_digest) throw ReplayError("replay header config digest mismatch");
  return h;
}

std::vector<std::uint8_t> encode_tick(const ReplayTick& t) {
  Writer w;
  w.put(t.tick);
  w.put(t.digest);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(t.actions.size()));
  for (const auto& [id, a] : t.actions) {
    w.put(id);
    w.put<std::uint8_t>(static_cast<std::uint8_t>((a.move ? 1 : 0) | (a.attack ? 2 : 0)));
    w.put<std::uint8_t>(a.move ? static_cast<std::uint8_t>(*a.move) : 0);
    w.put<std::uint8_t>(a.attack ? static_cast<std::uint8_t>(a.attack->style) : 0);
    w.put<EntityId>(a.attack ? a.attack->target : kNoEntity);
  }
  w.put<std::uint32_t>(static_cast<std::uint32_t>(t.events.size()));
  for (const auto& e : t.events) {
    w.put(e.tick);
    w.put(static_cast<std::uint8_t>(e.kind));
    w.put(e.subject);
    for (auto p : e.payload) w.put(p);
  }
  for (auto d : t.draws) w.put(d);
  return w.bytes;
}

ReplayTick decode_tick(Reader& r) {
  ReplayTick t;
  t.tick = r.get<std::int32_t>();
  t.digest = r.get<std::uint64_t>();
  const auto na = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < na; ++i) {
    const auto id = r.get<EntityId>();
    const auto flags = r.get<std::uint8_t>();
    const auto dir = r.get<std::uint8_t>();
    const auto style = r.get<std::uint8_t>();
    const auto target = r.get<EntityId>();
    ActionSet a;
    if (flags & 1) a.move = static_cast<Direction>(dir);
    if (flags & 2) a.attack = AttackIntent{static_cast<CombatStyle>(style), target};
    t.actions.emplace_back(id, a);
  }
  const auto ne = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < ne; ++i) {
    TickEvent e;
    e.tick = r.get<std::int32_t>();
    e.kind = static_cast<EventKind>(r.get<std::uint8_t>());
    e.subject = r.get<EntityId>();
    for (auto& p : e.payload) p = r.get<std::int64_t>();
    t.events.push_back(e);
  }
  for (auto& d : t.draws) d = r.get<std::uint64_t>();
  return t;
}

std::vector<std::uint8_t> encode_trailer(const ReplayTrailer& t) {
  Writer w;
  w.put(t.final_digest);
  w.put(t.ticks);
  w.put_string(t.metrics.dump());
  return w.bytes;
}

ReplayTrailer decode_trailer(Reader& r) {
  ReplayTrailer t;
  t.final_digest = r.get<std::uint64_t>();
  t.ticks = r.get<std::int32_t>();
  t.metrics = json::parse(r.get_string());
  return t;
}

json metrics_rows(const std::vector<PolicyMetrics>& metrics) {
  json rows = json::array();
  for (const auto& m : metrics) rows.push_back(metrics_json(m));
  return rows;
}

}  // namespace

ReplayHeader make_replay_header(const Environment& env, std::vector<std::string> policies,
                                std::vector<int> slot_policy, bool teams) {
  ReplayHeader h;
  h.config = env.config();
  h.config.seed = env.episode_seed();
  h.config_digest = config_digest(h.config);
  h.map = env.world().map;
  h.map_seed = h.map.seed();
  h.episode_seed = env.episode_seed();
  h.initial_digest = digest(env.world());
  h.engine = env.world().options;
  h.policies = std::move(policies);
  h.slot_policy = std::move(slot_policy);
  h.teams = teams;
  return h;
}

ReplayTick make_tick_record(const Environment& env, const std::map<EntityId, ActionSet>& actions,
                            const StepResult& result) {
  ReplayTick t;
  const WorldState& w = env.world();
  t.tick = result.report.tick;
  t.digest = digest(w);
  t.actions.assign(actions.begin(), actions.end());
  t.events.assign(w.event_log.begin() + static_cast<std::ptrdiff_t>(result.report.first_event), w.event_log.end());
  t.draws = w.rng.draws();
  return t;
}

ReplayWriter::ReplayWriter(const std::filesystem::path& path, const ReplayHeader& header)
    : out_(path, std::ios::binary | std::ios::trunc), path_(path) {
  if (!out_) throw ReplayError("cannot write " + path.string());
  out_.write(kReplayMagic, sizeof kReplayMagic);
  write_record(ReplayRecord::Header, encode_header(header));
}

void ReplayWriter::write_tick(const ReplayTick& tick) { write_record(ReplayRecord::Tick, encode_tick(tick)); }

void ReplayWriter::finish(const ReplayTrailer& trailer) {
  write_record(ReplayRecord::Trailer, encode_trailer(trailer));
  out_.close();
}

void ReplayWriter::write_record(ReplayRecord type, const std::vector<std::uint8_t>& payload) {
  Writer w;
  w.put<std::uint32_t>(static_cast<std::uint32_t>(payload.size()));
  w.put(static_cast<std::uint8_t>(type));
  w.bytes.insert(w.bytes.end(), payload.begin(), payload.end());
  w.put(record_checksum(static_cast<std::uint8_t>(type), payload.data(), payload.size()));
  out_.write(reinterpret_cast<const char*>(w.bytes.data()), static_cast<std::streamsize>(w.bytes.size()));
  out_.flush();
  if (!out_) throw ReplayError("write failed on " + path_.string());
}

Replay read_replay(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ReplayError("cannot read " + path.string());
  const std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (data.size() < sizeof kReplayMagic || std::memcmp(data.data(), kReplayMagic, sizeof kReplayMagic) != 0)
    throw ReplayError(path.string() + " is not a replay file");

  Replay replay;
  bool have_header = false;
  std::size_t pos = sizeof kReplayMagic;
  while (pos < data.size()) {
    if (data.size() - pos < 5) {
      replay.problem = "truncated record frame";
      break;
    }
    Reader frame(data.data() + pos, 5);
    const auto len = frame.get<std::uint32_t>();
    const auto type = frame.get<std::uint8_t>();
    if (data.size() - pos - 5 < static_cast<std::size_t>(len) + 8) {
      replay.problem = "truncated record payload";
      break;
    }
    const std::uint8_t* payload = data.data() + pos + 5;
    Reader sum(payload + len, 8);
    if (sum.get<std::uint64_t>() != record_checksum(type, payload, len)) {
      replay.problem = "record checksum mismatch";
      break;
    }
    pos += 5 + static_cast<std::size_t>(len) + 8;
    Reader r(payload, len);
    switch (static_cast<ReplayRecord>(type)) {
      case ReplayRecord::Header:
        if (have_header) throw ReplayError("duplicate replay header");
        replay.header = decode_header(r);
        have_header = true;
        break;
      case ReplayRecord::Tick:
        if (!have_header) throw ReplayError("tick record before header");
        replay.ticks.push_back(decode_tick(r));
        replay.last_complete_tick = replay.ticks.back().tick;
        break;
      case ReplayRecord::Trailer:
        if (!have_header) throw ReplayError("trailer before header");
        replay.trailer = decode_trailer(r);
        break;
      default:
        throw ReplayError("unknown record type " + std::to_string(type));
    }
    if (replay.trailer) break;
  }
  if (!have_header) throw ReplayError(path.string() + " has no complete header");
  replay.complete = replay.trailer.has_value() && pos == data.size();
  if (!replay.complete && replay.problem.empty()) replay.problem = replay.trailer ? "data after trailer" : "missing trailer";
  return replay;
}

EpisodeOutcome record_episode(const EpisodeSetup& setup, const std::filesystem::path& path) {
  std::optional<ReplayWriter> writer;
  std::vector<std::string> names;
  for (const Policy* p : setup.policies) names.push_back(p->name());
  EpisodeSetup s = setup;
  s.on_reset = [&](const Environment& env) {
    writer.emplace(path, make_replay_header(env, names, setup.slot_policy, setup.teams));
    if (setup.on_reset) setup.on_reset(env);
  };
  s.on_step = [&](const Environment& env, const std::map<EntityId, ActionSet>& actions, const StepResult& r) {
    writer->write_tick(make_tick_record(env, actions, r));
    if (setup.on_step) setup.on_step(env, actions, r);
  };
  EpisodeOutcome o = run_episode(s);
  writer->finish({o.digests.back(), o.ticks, metrics_rows(o.metrics)});
  return o;
}

PlayResult play(const Replay& replay, std::optional<EngineOptions> engine) {
  const ReplayHeader& h = replay.header;
  Environment env(h.config, {h.map}, engine ? *engine : h.engine);
  ResetOptions ro;
  if (h.teams) ro.slot_population = h.slot_policy;
  env.reset(h.episode_seed, ro);

  PlayResult out;
  auto diverge = [&](int tick, std::string why) {
    if (!out.divergent_tick) {
      out.divergent_tick = tick;
      out.divergence = std::move(why);
    }
  };
  out.digests.push_back(digest(env.world()));
  if (out.digests.back() != h.initial_digest) diverge(-1, "state after reset differs");

  std::map<EntityId, ActionSet> actions;
  for (const ReplayTick& t : replay.ticks) {
    if (env.episode_over()) {
      diverge(t.tick, "episode ended before the recorded tick");
      break;
    }
    actions.clear();
    actions.insert(t.actions.begin(), t.actions.end());
    const StepResult r = env.step(actions);
    out.digests.push_back(digest(env.world()));
    if (out.digests.back() != t.digest) {
      const WorldState& w = env.world();
      std::string why = "state digest differs";
      if (w.rng.draws() != t.draws) why += "; rng draw counts differ";
      if (!std::equal(w.event_log.begin() + static_cast<std::ptrdiff_t>(r.report.first_event), w.event_log.end(),
                      t.events.begin(), t.events.end()))
        why += "; events differ";
      diverge(t.tick, why);
    }
  }

  out.logs = env.lifetime_logs();
  if (h.slot_policy.size() == static_cast<std::size_t>(h.config.population_cap) && !h.policies.empty())
    out.metrics = fold_metrics(out.logs, h.policies, h.slot_policy);
  out.overlays = env.overlays();
  out.trailer_matches = replay.trailer && !out.divergent_tick && replay.trailer->final_digest == out.digests.back() &&
                        replay.trailer->metrics == metrics_rows(out.metrics);
  return out;
}

}  // namespace nmmo
