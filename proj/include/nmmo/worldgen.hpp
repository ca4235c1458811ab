#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "nmmo/config.hpp"
#include "nmmo/tile_map.hpp"

namespace nmmo {

class WorldgenError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kWorldgenRetryBudget = 8;

/// Maps a noise value to terrain using the water|grass|forest|stone cuts.
Material classify(double noise_value, const WorldgenParams& params);

/// Generates the map for cfg.seed. Degenerate maps (no interior forest or
/// water, or an empty spawn ring) are regenerated from perturbed seeds up to
/// kWorldgenRetryBudget times; the returned map records the seed it used.
TileMap generate_map(const EnvConfig& cfg);
TileMap generate_map(const EnvConfig& cfg, std::uint64_t seed);

/// Maps for seeds cfg.seed .. cfg.seed + count - 1, in that order.
std::vector<TileMap> generate_pool(const EnvConfig& cfg, int count);

/// Recomputes the spawn ring: walkable interior tiles 4-adjacent to the
/// border ring (or the map edge).
std::vector<Position> compute_spawn_ring(const TileMap& map);

// Map file: 32-byte little-endian header then size*size one-byte tile codes.
//   [0,8)   magic "NMMOMAP\0"
//   [8,12)  u32 format version (1)
//   [12,16) u32 size
//   [16,24) u64 seed
//   [24,28) u32 border width
//   [28,32) u32 reserved (0)
inline constexpr char kMapMagic[8] = {'N', 'M', 'M', 'O', 'M', 'A', 'P', '\0'};
inline constexpr std::uint32_t kMapFormatVersion = 1;

std::vector<std::uint8_t> encode_map(const TileMap& map);
TileMap decode_map(const std::vector<std::uint8_t>& bytes);
void write_map(const TileMap& map, const std::filesystem::path& path);
TileMap read_map(const std::filesystem::path& path);

/// Binary portable graymap, one gray level per material.
void write_map_pgm(const TileMap& map, const std::filesystem::path& path);

}  // namespace nmmo
