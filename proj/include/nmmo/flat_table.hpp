#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "nmmo/entities.hpp"
#include "nmmo/tile_map.hpp"

namespace nmmo {

// Tile table columns. The occupant column is internal; observations export
// only row, col and material.
enum TileColumn : int { kTileRow = 0, kTileCol, kTileMaterial, kTileOccupant, kTileColumns };

// Entity table columns, shared by agents and NPCs.
enum EntityColumn : int {
  kEntId = 0,
  kEntKind,          // 0 agent, 1 npc
  kEntPopulation,    // -1 for npcs
  kEntDisposition,   // -1 for agents
  kEntRow,
  kEntCol,
  kEntHealth,
  kEntMaxHealth,
  kEntFood,
  kEntWater,
  kEntHunting,
  kEntFishing,
  kEntConstitution,
  kEntMelee,
  kEntRange,
  kEntMage,
  kEntDefense,
  kEntEquipment,
  kEntityColumns
};

inline constexpr std::int32_t kKindAgent = 0;
inline constexpr std::int32_t kKindNpc = 1;

using EntityRow = std::array<std::int32_t, kEntityColumns>;

EntityRow serialize_agent(const AgentState& a);
EntityRow serialize_npc(const NpcState& n);

/// Dense row store for one entity class. Dead rows are tombstoned in place
/// and dropped by compact().
class EntityTable {
 public:
  void upsert(const EntityRow& row);
  void tombstone(EntityId id);
  void compact();
  void clear();

  [[nodiscard]] const EntityRow* find(EntityId id) const;
  [[nodiscard]] std::size_t rows() const { return live_.size(); }
  [[nodiscard]] std::size_t live_rows() const { return live_count_; }
  [[nodiscard]] std::size_t tombstones() const { return live_.size() - live_count_; }
  [[nodiscard]] const EntityRow& row(std::size_t i) const { return data_[i]; }
  [[nodiscard]] bool is_live(std::size_t i) const { return live_[i] != 0; }

 private:
  std::vector<EntityRow> data_;
  std::vector<std::uint8_t> live_;
  std::unordered_map<EntityId, std::uint32_t> index_;
  std::size_t live_count_ = 0;
};

/// The always-current serialized copy of world state. Tiles are stored in a
/// grid padded by the vision range with lava rows, so any crop around a live
/// agent is a contiguous block selection with no bounds checks.
class FlatStateTable {
 public:
  void init(const TileMap& map, int vision_range);
  /// Rewrites one tile row from the map.
  void write_tile(const TileMap& map, Position p);

  [[nodiscard]] int padding() const { return pad_; }
  [[nodiscard]] int padded_size() const { return padded_; }
  [[nodiscard]] std::span<const std::int32_t, kTileColumns> tile_row(Position p) const {
    const std::size_t i =
        (static_cast<std::size_t>(p.row + pad_) * padded_ + (p.col + pad_)) * kTileColumns;
    return std::span<const std::int32_t, kTileColumns>(tiles_.data() + i, kTileColumns);
  }
  [[nodiscard]] const std::int32_t* tile_data() const { return tiles_.data(); }

  EntityTable agents;
  EntityTable npcs;

 private:
  int pad_ = 0;
  int padded_ = 0;
  std::vector<std::int32_t> tiles_;
};

}  // namespace nmmo
