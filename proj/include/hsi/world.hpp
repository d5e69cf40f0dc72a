// Copyright 2026 The HSI Testbed Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "hsi/geometry.hpp"
#include "hsi/rng.hpp"

namespace hsi {

// Axis-aligned rectangle in meters, closed on both ends.
struct Bounds {
  Vec2 min;
  Vec2 max;
  bool contains(Vec2 p) const noexcept {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
  }
};

// Discrete grid over a continuous plane. Immutable after construction.
class GridWorld {
 public:
  GridWorld(int width, int height, double cell_size, CellSet static_obstacles, Vec2 target);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  double cell_size() const noexcept { return cell_size_; }
  Vec2 target() const noexcept { return target_; }
  const CellSet& static_obstacles() const noexcept { return obstacles_; }
  Bounds bounds() const noexcept { return {{0.0, 0.0}, {width_ * cell_size_, height_ * cell_size_}}; }
  double diagonal() const noexcept;
  std::size_t cell_count() const noexcept { return static_cast<std::size_t>(width_) * height_; }

  bool valid(CellIndex c) const noexcept {
    return c.col >= 0 && c.row >= 0 && c.col < width_ && c.row < height_;
  }
  bool contains(Vec2 p) const noexcept { return bounds().contains(p); }
  bool is_obstacle(CellIndex c) const noexcept { return valid(c) && obstacle_mask_[flat(c)] != 0; }

  // Cells are half-open [col*cs, (col+1)*cs); the max edge maps to the last cell.
  CellIndex cell_of(Vec2 p) const;
  Vec2 cell_center(CellIndex c) const noexcept;
  std::size_t flat(CellIndex c) const noexcept {
    return static_cast<std::size_t>(c.row) * width_ + c.col;
  }

  // 4- or 8-neighborhood, in-bounds only, in a fixed order.
  std::vector<CellIndex> neighbors(CellIndex c, int connectivity = 4) const;

 private:
  int width_;
  int height_;
  double cell_size_;
  CellSet obstacles_;
  std::vector<std::uint8_t> obstacle_mask_;
  Vec2 target_;
};

bool is_blocked(CellIndex cell, const GridWorld& world, const CellSet& marked);

enum class Region : std::uint8_t { NW, NE, SW, SE, Center };

std::string_view region_name(Region r) noexcept;
inline constexpr std::array<Region, 5> kAllRegions{Region::NW, Region::NE, Region::SW, Region::SE,
                                                    Region::Center};

// Five-way partition of the grid: the middle ceil(w/2) x ceil(h/2) block is
// Center and takes priority; the rest split into quadrants.
class RegionMap {
 public:
  explicit RegionMap(const GridWorld& world);

  Region region_of(CellIndex c) const { return labels_.at(static_cast<std::size_t>(c.row) * width_ + c.col); }
  const std::vector<CellIndex>& cells(Region r) const { return cells_[static_cast<std::size_t>(r)]; }
  int center_col_begin() const noexcept { return center_col_begin_; }
  int center_row_begin() const noexcept { return center_row_begin_; }
  int center_cols() const noexcept { return center_cols_; }
  int center_rows() const noexcept { return center_rows_; }

 private:
  int width_;
  std::vector<Region> labels_;
  std::array<std::vector<CellIndex>, 5> cells_;
  int center_col_begin_, center_row_begin_, center_cols_, center_rows_;
};

RegionMap quadrant_regions(const GridWorld& world);

struct WorldConfig {
  int width = 20;
  int height = 20;
  double cell_size = 1.0;
  double obstacle_fraction = 0.06;
  // Square spawn block anchored at the south-west corner, in cells.
  int spawn_extent = 4;
  // When set, overrides sampling.
  bool has_fixed_target = false;
  Vec2 fixed_target;
  // Explicit obstacle list; when non-empty, overrides sampling.
  std::vector<CellIndex> fixed_obstacles;
};

struct SpawnArea {
  int col_begin = 0;
  int row_begin = 0;
  int extent = 4;
  bool contains(CellIndex c) const noexcept {
    return c.col >= col_begin && c.col < col_begin + extent && c.row >= row_begin &&
           c.row < row_begin + extent;
  }
};

SpawnArea spawn_area(const WorldConfig& cfg);

// Samples obstacles (outside the spawn block) and a target cell centre at least
// half the grid diagonal away from the spawn centroid.
GridWorld make_world(const WorldConfig& cfg, RngStream& rng);

}  // namespace hsi
