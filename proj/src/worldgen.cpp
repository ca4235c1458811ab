#include "nmmo/worldgen.hpp"

#include <array>
#include <cstring>
#include <fstream>

#include "nmmo/hash.hpp"
#include "nmmo/noise.hpp"

namespace nmmo {
namespace {

TileMap generate_once(const EnvConfig& cfg, std::uint64_t seed) {
  const auto& wg = cfg.worldgen_params;
  const int n = cfg.map_size;
  TileMap map(n, seed, wg.border_width);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const Position p{r, c};
      auto& tile = map.at(p);
      if (map.in_border(p)) {
        tile.material = Material::Lava;
      } else {
        tile.material = classify(noise(c + 0.5, r + 0.5, seed, wg), wg);
      }
    }
  }
  map.spawn_ring() = compute_spawn_ring(map);
  return map;
}

bool degenerate(const TileMap& map) {
  bool forest = false;
  bool water = false;
  for (const auto& t : map.tiles()) {
    forest |= t.material == Material::Forest;
    water |= t.material == Material::Water;
  }
  return !forest || !water || map.spawn_ring().empty();
}

void put_u32(std::vector<std::uint8_t>& out, std::size_t at, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out[at + i] = static_cast<std::uint8_t>(v >> (8 * i));
}
void put_u64(std::vector<std::uint8_t>& out, std::size_t at, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out[at + i] = static_cast<std::uint8_t>(v >> (8 * i));
}
std::uint32_t get_u32(const std::vector<std::uint8_t>& in, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(in[at + i]) << (8 * i);
  return v;
}
std::uint64_t get_u64(const std::vector<std::uint8_t>& in, std::size_t at) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(in[at + i]) << (8 * i);
  return v;
}

}  // namespace

Material classify(double v, const WorldgenParams& params) {
  const auto& t = params.tile_thresholds;
  if (v < t[0]) return Material::Water;
  if (v < t[1]) return Material::Grass;
  if (v < t[2]) return Material::Forest;
  return Material::Stone;
}

std::vector<Position> compute_spawn_ring(const TileMap& map) {
  std::vector<Position> ring;
  const int n = map.size();
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const Position p{r, c};
      if (map.in_border(p) || !is_walkable(map.at(p).material)) continue;
      for (Direction d : kDirections) {
        const Position q = step(p, d);
        if (!map.in_bounds(q) || map.in_border(q)) {
          ring.push_back(p);
          break;
        }
      }
    }
  }
  return ring;
}

TileMap generate_map(const EnvConfig& cfg) { return generate_map(cfg, cfg.seed); }

TileMap generate_map(const EnvConfig& cfg, std::uint64_t seed) {
  std::uint64_t s = seed;
  for (int attempt = 0; attempt <= kWorldgenRetryBudget; ++attempt) {
    TileMap map = generate_once(cfg, s);
    if (!degenerate(map)) return map;
    s = hash_combine(seed, static_cast<std::uint64_t>(attempt + 1));
  }
  throw WorldgenError("degenerate map for seed " + std::to_string(seed) + " after " +
                      std::to_string(kWorldgenRetryBudget) + " retries");
}

std::vector<TileMap> generate_pool(const EnvConfig& cfg, int count) {
  if (count < 1) throw WorldgenError("pool count must be >= 1");
  std::vector<TileMap> pool;
  pool.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    try {
      pool.push_back(generate_map(cfg, cfg.seed + static_cast<std::uint64_t>(i)));
    } catch (const WorldgenError& e) {
      throw WorldgenError("pool index " + std::to_string(i) + ": " + e.what());
    }
  }
  return pool;
}

std::vector<std::uint8_t> encode_map(const TileMap& map) {
  const std::size_t n = static_cast<std::size_t>(map.size());
  std::vector<std::uint8_t> out(32 + n * n, 0);
  std::memcpy(out.data(), kMapMagic, 8);
  put_u32(out, 8, kMapFormatVersion);
  put_u32(out, 12, static_cast<std::uint32_t>(map.size()));
  put_u64(out, 16, map.seed());
  put_u32(out, 24, static_cast<std::uint32_t>(map.border_width()));
  put_u32(out, 28, 0);
  for (std::size_t i = 0; i < n * n; ++i) {
    out[32 + i] = static_cast<std::uint8_t>(map.tiles()[i].material);
  }
  return out;
}

TileMap decode_map(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 32 || std::memcmp(bytes.data(), kMapMagic, 8) != 0)
    throw WorldgenError("not a map file (bad magic)");
  if (get_u32(bytes, 8) != kMapFormatVersion)
    throw WorldgenError("unsupported map format version " + std::to_string(get_u32(bytes, 8)));
  const auto size = get_u32(bytes, 12);
  const auto border = get_u32(bytes, 24);
  if (size == 0 || size > 65535 || bytes.size() != 32 + std::size_t{size} * size)
    throw WorldgenError("map file size mismatch");
  TileMap map(static_cast<int>(size), get_u64(bytes, 16), static_cast<int>(border));
  for (std::size_t i = 0; i < std::size_t{size} * size; ++i) {
    const auto code = bytes[32 + i];
    if (code >= kMaterialCount) throw WorldgenError("bad tile code " + std::to_string(code));
    map.tiles()[i].material = static_cast<Material>(code);
  }
  map.spawn_ring() = compute_spawn_ring(map);
  return map;
}

void write_map(const TileMap& map, const std::filesystem::path& path) {
  const auto bytes = encode_map(map);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw WorldgenError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

TileMap read_map(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw WorldgenError("cannot read " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_map(bytes);
}

void write_map_pgm(const TileMap& map, const std::filesystem::path& path) {
  static constexpr std::array<std::uint8_t, kMaterialCount> kGray{170, 90, 130, 220, 40, 255};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw WorldgenError("cannot write " + path.string());
  out << "P5\n" << map.size() << " " << map.size() << "\n255\n";
  for (const auto& t : map.tiles()) {
    out.put(static_cast<char>(kGray[static_cast<std::size_t>(t.material)]));
  }
}

}  // namespace nmmo
