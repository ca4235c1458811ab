#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "nmmo/flat_table.hpp"

namespace nmmo {

struct WorldState;

inline constexpr int kTileObsColumns = 3;  // row, col, material
using TileObsRow = std::array<std::int32_t, kTileObsColumns>;

/// One agent's view: the (2v+1)^2 tile crop in row-major scan order, and the
/// rows of every entity standing in the crop, in the same scan order.
struct Observation {
  std::vector<TileObsRow> tiles;
  std::vector<EntityRow> entities;
  int self_row_index = -1;

  bool operator==(const Observation&) const = default;
  [[nodiscard]] bool contains_entity(EntityId id) const;
};

class ObservationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Gathers the observation for a live agent from the flat state table.
Observation select_observation(const WorldState& world, EntityId id);
void select_observation(const WorldState& world, EntityId id, Observation& out);

}  // namespace nmmo
