#include "nmmo/observation.hpp"

#include <string>

#include "nmmo/world.hpp"

namespace nmmo {

bool Observation::contains_entity(EntityId id) const {
  for (const auto& e : entities)
    if (e[kEntId] == id) return true;
  return false;
}

Observation select_observation(const WorldState& world, EntityId id) {
  Observation obs;
  select_observation(world, id, obs);
  return obs;
}

void select_observation(const WorldState& world, EntityId id, Observation& out) {
  const EntityRow* self = world.flat.agents.find(id);
  if (!self) throw ObservationError("no live agent with id " + std::to_string(id));
  const FlatStateTable& flat = world.flat;
  const int v = world.config.vision_range;
  const int side = 2 * v + 1;
  const int padded = flat.padded_size();
  const int pad = flat.padding();
  const std::int32_t* data = flat.tile_data();

  out.tiles.resize(static_cast<std::size_t>(side) * side);
  out.entities.clear();
  out.self_row_index = -1;

  // The crop is `side` contiguous runs of `side` tile rows in the padded grid.
  const int r0 = (*self)[kEntRow] - v + pad;
  const int c0 = (*self)[kEntCol] - v + pad;
  std::size_t k = 0;
  for (int dr = 0; dr < side; ++dr) {
    const std::int32_t* run =
        data + (static_cast<std::size_t>(r0 + dr) * padded + c0) * kTileColumns;
    for (int dc = 0; dc < side; ++dc, run += kTileColumns, ++k) {
      out.tiles[k] = {run[kTileRow], run[kTileCol], run[kTileMaterial]};
      const EntityId occ = run[kTileOccupant];
      if (occ == kNoEntity) continue;
      const EntityRow* row = flat.agents.find(occ);
      if (!row) row = flat.npcs.find(occ);
      if (occ == id) out.self_row_index = static_cast<int>(out.entities.size());
      out.entities.push_back(*row);
    }
  }
}

}  // namespace nmmo
