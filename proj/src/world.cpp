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

#include "hsi/world.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hsi/error.hpp"

namespace hsi {

GridWorld::GridWorld(int width, int height, double cell_size, CellSet static_obstacles, Vec2 target)
    : width_(width), height_(height), cell_size_(cell_size), obstacles_(std::move(static_obstacles)), target_(target) {
  if (width < 1 || height < 1) throw DomainError("grid dimensions must be >= 1");
  if (!(cell_size > 0.0)) throw DomainError("cell_size must be > 0");
  obstacle_mask_.assign(cell_count(), 0);
  for (CellIndex c : obstacles_) {
    if (!valid(c)) {
      throw DomainError("static obstacle (" + std::to_string(c.col) + "," + std::to_string(c.row) +
                        ") outside the grid");
    }
    obstacle_mask_[flat(c)] = 1;
  }
  if (!contains(target_)) throw DomainError("target outside world bounds");
  if (is_obstacle(cell_of(target_))) throw DomainError("target inside a static obstacle");
}

double GridWorld::diagonal() const noexcept {
  const Vec2 ext = bounds().max;
  return std::sqrt(ext.x * ext.x + ext.y * ext.y);
}

CellIndex GridWorld::cell_of(Vec2 p) const {
  if (!contains(p)) throw DomainError("position outside world bounds");
  int col = static_cast<int>(std::floor(p.x / cell_size_));
  int row = static_cast<int>(std::floor(p.y / cell_size_));
  return {std::min(col, width_ - 1), std::min(row, height_ - 1)};
}

Vec2 GridWorld::cell_center(CellIndex c) const noexcept {
  return {(c.col + 0.5) * cell_size_, (c.row + 0.5) * cell_size_};
}

std::vector<CellIndex> GridWorld::neighbors(CellIndex c, int connectivity) const {
  static constexpr int kDx[8] = {0, 1, 0, -1, 1, 1, -1, -1};
  static constexpr int kDy[8] = {1, 0, -1, 0, 1, -1, -1, 1};
  const int n = connectivity == 8 ? 8 : 4;
  std::vector<CellIndex> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    CellIndex nb{c.col + kDx[i], c.row + kDy[i]};
    if (valid(nb)) out.push_back(nb);
  }
  return out;
}

bool is_blocked(CellIndex cell, const GridWorld& world, const CellSet& marked) {
  return world.is_obstacle(cell) || marked.contains(cell);
}

std::string_view region_name(Region r) noexcept {
  switch (r) {
    case Region::NW: return "NW";
    case Region::NE: return "NE";
    case Region::SW: return "SW";
    case Region::SE: return "SE";
    case Region::Center: return "Center";
  }
  return "?";
}

RegionMap::RegionMap(const GridWorld& world) : width_(world.width()) {
  const int w = world.width();
  const int h = world.height();
  if (w < 2 || h < 2) throw DomainError("region map needs a grid of at least 2x2");
  center_cols_ = (w + 1) / 2;
  center_rows_ = (h + 1) / 2;
  center_col_begin_ = (w - center_cols_) / 2;
  center_row_begin_ = (h - center_rows_) / 2;
  labels_.resize(world.cell_count());
  for (int row = 0; row < h; ++row) {
    for (int col = 0; col < w; ++col) {
      Region r;
      const bool in_center = col >= center_col_begin_ && col < center_col_begin_ + center_cols_ &&
                             row >= center_row_begin_ && row < center_row_begin_ + center_rows_;
      if (in_center) {
        r = Region::Center;
      } else {
        // A cell is west/south when its centre lies strictly below the midline.
        const bool west = 2 * col + 1 < w;
        const bool south = 2 * row + 1 < h;
        r = south ? (west ? Region::SW : Region::SE) : (west ? Region::NW : Region::NE);
      }
      labels_[static_cast<std::size_t>(row) * w + col] = r;
      cells_[static_cast<std::size_t>(r)].push_back({col, row});
    }
  }
}

RegionMap quadrant_regions(const GridWorld& world) { return RegionMap(world); }

SpawnArea spawn_area(const WorldConfig& cfg) {
  return {0, 0, std::max(1, std::min({cfg.spawn_extent, cfg.width, cfg.height}))};
}

GridWorld make_world(const WorldConfig& cfg, RngStream& rng) {
  if (cfg.width < 1 || cfg.height < 1 || !(cfg.cell_size > 0.0)) {
    throw ConfigError("world: width/height must be >= 1 and cell_size > 0");
  }
  if (cfg.obstacle_fraction < 0.0 || cfg.obstacle_fraction >= 1.0) {
    throw ConfigError("world: obstacle_fraction must be in [0, 1)");
  }
  const SpawnArea spawn = spawn_area(cfg);
  const double cs = cfg.cell_size;
  const Vec2 spawn_centroid{(spawn.col_begin + spawn.extent * 0.5) * cs, (spawn.row_begin + spawn.extent * 0.5) * cs};
  const double half_diag = 0.5 * std::sqrt(std::pow(cfg.width * cs, 2) + std::pow(cfg.height * cs, 2));

  Vec2 target;
  if (cfg.has_fixed_target) {
    target = cfg.fixed_target;
  } else {
    std::vector<CellIndex> far;
    for (int row = 0; row < cfg.height; ++row) {
      for (int col = 0; col < cfg.width; ++col) {
        const Vec2 c{(col + 0.5) * cs, (row + 0.5) * cs};
        if (distance(c, spawn_centroid) >= half_diag) far.push_back({col, row});
      }
    }
    if (far.empty()) throw ConfigError("world: no target cell is half a diagonal from the spawn area");
    const CellIndex t = far[rng.below(far.size())];
    target = {(t.col + 0.5) * cs, (t.row + 0.5) * cs};
  }

  CellSet obstacles;
  if (!cfg.fixed_obstacles.empty()) {
    obstacles.insert(cfg.fixed_obstacles.begin(), cfg.fixed_obstacles.end());
  } else if (cfg.obstacle_fraction > 0.0) {
    const auto total = static_cast<std::size_t>(cfg.width) * cfg.height;
    const auto wanted = static_cast<std::size_t>(std::lround(cfg.obstacle_fraction * static_cast<double>(total)));
    const CellIndex target_cell{std::min(static_cast<int>(target.x / cs), cfg.width - 1),
                                std::min(static_cast<int>(target.y / cs), cfg.height - 1)};
    std::vector<CellIndex> eligible;
    for (int row = 0; row < cfg.height; ++row) {
      for (int col = 0; col < cfg.width; ++col) {
        const CellIndex c{col, row};
        if (!spawn.contains(c) && c != target_cell) eligible.push_back(c);
      }
    }
    const std::size_t n = std::min(wanted, eligible.size());
    // Partial Fisher-Yates over a fixed-order list.
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = i + rng.below(eligible.size() - i);
      std::swap(eligible[i], eligible[j]);
      obstacles.insert(eligible[i]);
    }
  }
  return GridWorld(cfg.width, cfg.height, cs, std::move(obstacles), target);
}

}  // namespace hsi
