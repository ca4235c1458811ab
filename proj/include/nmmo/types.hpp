#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <string_view>

namespace nmmo {

using EntityId = std::int32_t;
inline constexpr EntityId kNoEntity = 0;

struct Position {
  int row = 0;
  int col = 0;
  bool operator==(const Position&) const = default;
  auto operator<=>(const Position&) const = default;
};

inline int chebyshev(Position a, Position b) {
  return std::max(std::abs(a.row - b.row), std::abs(a.col - b.col));
}
inline int manhattan(Position a, Position b) {
  return std::abs(a.row - b.row) + std::abs(a.col - b.col);
}

enum class Material : std::uint8_t { Grass = 0, Forest = 1, Scrub = 2, Stone = 3, Water = 4, Lava = 5 };
inline constexpr int kMaterialCount = 6;

/// Agents may stand on these. Lava is enterable but kills.
inline constexpr bool is_walkable(Material m) {
  return m == Material::Grass || m == Material::Forest || m == Material::Scrub;
}
inline constexpr bool is_obstacle(Material m) { return m == Material::Stone || m == Material::Water; }

std::string_view material_name(Material m);

enum class Direction : std::uint8_t { North = 0, South = 1, East = 2, West = 3 };
inline constexpr std::array<Direction, 4> kDirections{Direction::North, Direction::South,
                                                      Direction::East, Direction::West};

inline constexpr Position step(Position p, Direction d) {
  switch (d) {
    case Direction::North: return {p.row - 1, p.col};
    case Direction::South: return {p.row + 1, p.col};
    case Direction::East: return {p.row, p.col + 1};
    case Direction::West: return {p.row, p.col - 1};
  }
  return p;
}

enum class CombatStyle : std::uint8_t { Melee = 0, Range = 1, Mage = 2 };
inline constexpr std::array<CombatStyle, 3> kStyles{CombatStyle::Melee, CombatStyle::Range,
                                                    CombatStyle::Mage};

enum class Skill : std::uint8_t {
  Hunting = 0,
  Fishing,
  Constitution,
  Melee,
  Range,
  Mage,
  Defense,
};
inline constexpr int kSkillCount = 7;

inline constexpr Skill style_skill(CombatStyle s) {
  switch (s) {
    case CombatStyle::Melee: return Skill::Melee;
    case CombatStyle::Range: return Skill::Range;
    case CombatStyle::Mage: return Skill::Mage;
  }
  return Skill::Melee;
}

std::string_view skill_name(Skill s);
std::string_view style_name(CombatStyle s);
std::string_view direction_name(Direction d);

enum class Disposition : std::uint8_t { Passive = 0, Neutral = 1, Hostile = 2 };

struct SkillLevel {
  std::int64_t xp = 0;
  int level = 1;
  bool operator==(const SkillLevel&) const = default;
};

struct SkillSet {
  std::array<SkillLevel, kSkillCount> skills{};

  SkillLevel& operator[](Skill s) { return skills[static_cast<std::size_t>(s)]; }
  const SkillLevel& operator[](Skill s) const { return skills[static_cast<std::size_t>(s)]; }
  [[nodiscard]] int level(Skill s) const { return (*this)[s].level; }
  bool operator==(const SkillSet&) const = default;
};

}  // namespace nmmo
