#pragma once

#include <cstdint>
#include <vector>

#include "nmmo/types.hpp"

namespace nmmo {

struct TileState {
  Material material = Material::Grass;
  EntityId occupant = kNoEntity;
  bool operator==(const TileState&) const = default;
};

/// Square grid of tiles, row-major.
class TileMap {
 public:
  TileMap() = default;
  TileMap(int size, std::uint64_t seed, int border_width)
      : size_(size), seed_(seed), border_width_(border_width),
        tiles_(static_cast<std::size_t>(size) * size) {}

  [[nodiscard]] int size() const { return size_; }
  [[nodiscard]] std::uint64_t seed() const { return seed_; }
  [[nodiscard]] int border_width() const { return border_width_; }

  [[nodiscard]] bool in_bounds(Position p) const {
    return p.row >= 0 && p.col >= 0 && p.row < size_ && p.col < size_;
  }
  [[nodiscard]] std::size_t index(Position p) const {
    return static_cast<std::size_t>(p.row) * size_ + p.col;
  }
  [[nodiscard]] Position position(std::size_t idx) const {
    return {static_cast<int>(idx / size_), static_cast<int>(idx % size_)};
  }

  TileState& at(Position p) { return tiles_[index(p)]; }
  [[nodiscard]] const TileState& at(Position p) const { return tiles_[index(p)]; }
  /// Out-of-bounds reads as lava.
  [[nodiscard]] Material material(Position p) const {
    return in_bounds(p) ? tiles_[index(p)].material : Material::Lava;
  }

  [[nodiscard]] const std::vector<TileState>& tiles() const { return tiles_; }
  std::vector<TileState>& tiles() { return tiles_; }
  [[nodiscard]] const std::vector<Position>& spawn_ring() const { return spawn_ring_; }
  std::vector<Position>& spawn_ring() { return spawn_ring_; }

  /// True when p lies in the lava border ring.
  [[nodiscard]] bool in_border(Position p) const {
    return p.row < border_width_ || p.col < border_width_ || p.row >= size_ - border_width_ ||
           p.col >= size_ - border_width_;
  }

  bool operator==(const TileMap&) const = default;

 private:
  int size_ = 0;
  std::uint64_t seed_ = 0;
  int border_width_ = 0;
  std::vector<TileState> tiles_;
  std::vector<Position> spawn_ring_;
};

}  // namespace nmmo
