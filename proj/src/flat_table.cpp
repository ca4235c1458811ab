#include "nmmo/flat_table.hpp"

namespace nmmo {

EntityRow serialize_agent(const AgentState& a) {
  EntityRow r{};
  r[kEntId] = a.id;
  r[kEntKind] = kKindAgent;
  r[kEntPopulation] = a.population_tag;
  r[kEntDisposition] = -1;
  r[kEntRow] = a.position.row;
  r[kEntCol] = a.position.col;
  r[kEntHealth] = a.health;
  r[kEntMaxHealth] = a.max_health;
  r[kEntFood] = a.food;
  r[kEntWater] = a.water;
  r[kEntHunting] = a.skills.level(Skill::Hunting);
  r[kEntFishing] = a.skills.level(Skill::Fishing);
  r[kEntConstitution] = a.skills.level(Skill::Constitution);
  r[kEntMelee] = a.skills.level(Skill::Melee);
  r[kEntRange] = a.skills.level(Skill::Range);
  r[kEntMage] = a.skills.level(Skill::Mage);
  r[kEntDefense] = a.skills.level(Skill::Defense);
  r[kEntEquipment] = a.equipment_level;
  return r;
}

EntityRow serialize_npc(const NpcState& n) {
  EntityRow r{};
  r[kEntId] = n.id;
  r[kEntKind] = kKindNpc;
  r[kEntPopulation] = -1;
  r[kEntDisposition] = static_cast<std::int32_t>(n.disposition);
  r[kEntRow] = n.position.row;
  r[kEntCol] = n.position.col;
  r[kEntHealth] = n.health;
  r[kEntMaxHealth] = n.max_health;
  r[kEntFood] = 0;
  r[kEntWater] = 0;
  r[kEntHunting] = n.level;
  r[kEntFishing] = n.level;
  r[kEntConstitution] = n.level;
  r[kEntMelee] = n.level;
  r[kEntRange] = n.level;
  r[kEntMage] = n.level;
  r[kEntDefense] = n.level;
  r[kEntEquipment] = n.armor_level;
  return r;
}

void EntityTable::upsert(const EntityRow& row) {
  const EntityId id = row[kEntId];
  if (auto it = index_.find(id); it != index_.end()) {
    data_[it->second] = row;
    return;
  }
  index_.emplace(id, static_cast<std::uint32_t>(data_.size()));
  data_.push_back(row);
  live_.push_back(1);
  ++live_count_;
}

void EntityTable::tombstone(EntityId id) {
  auto it = index_.find(id);
  if (it == index_.end()) return;
  live_[it->second] = 0;
  --live_count_;
  index_.erase(it);
}

void EntityTable::compact() {
  std::size_t out = 0;
  for (std::size_t i = 0; i < data_.size(); ++i) {
    if (!live_[i]) continue;
    data_[out] = data_[i];
    live_[out] = 1;
    index_[data_[out][kEntId]] = static_cast<std::uint32_t>(out);
    ++out;
  }
  data_.resize(out);
  live_.resize(out);
}

void EntityTable::clear() {
  data_.clear();
  live_.clear();
  index_.clear();
  live_count_ = 0;
}

const EntityRow* EntityTable::find(EntityId id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &data_[it->second];
}

void FlatStateTable::init(const TileMap& map, int vision_range) {
  pad_ = vision_range;
  padded_ = map.size() + 2 * pad_;
  tiles_.assign(static_cast<std::size_t>(padded_) * padded_ * kTileColumns, 0);
  for (int pr = 0; pr < padded_; ++pr) {
    for (int pc = 0; pc < padded_; ++pc) {
      const Position p{pr - pad_, pc - pad_};
      std::int32_t* row = tiles_.data() + (static_cast<std::size_t>(pr) * padded_ + pc) * kTileColumns;
      row[kTileRow] = p.row;
      row[kTileCol] = p.col;
      if (map.in_bounds(p)) {
        const auto& t = map.at(p);
        row[kTileMaterial] = static_cast<std::int32_t>(t.material);
        row[kTileOccupant] = t.occupant;
      } else {
        row[kTileMaterial] = static_cast<std::int32_t>(Material::Lava);
        row[kTileOccupant] = kNoEntity;
      }
    }
  }
  agents.clear();
  npcs.clear();
}

void FlatStateTable::write_tile(const TileMap& map, Position p) {
  const auto& t = map.at(p);
  std::int32_t* row =
      tiles_.data() + (static_cast<std::size_t>(p.row + pad_) * padded_ + (p.col + pad_)) * kTileColumns;
  row[kTileMaterial] = static_cast<std::int32_t>(t.material);
  row[kTileOccupant] = t.occupant;
}

}  // namespace nmmo
