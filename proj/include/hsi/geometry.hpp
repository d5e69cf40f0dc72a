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

#include <cmath>
#include <compare>
#include <cstddef>
#include <functional>
#include <set>

namespace hsi {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2& operator+=(Vec2 o) noexcept { x += o.x; y += o.y; return *this; }
  constexpr Vec2& operator-=(Vec2 o) noexcept { x -= o.x; y -= o.y; return *this; }
  constexpr Vec2& operator*=(double s) noexcept { x *= s; y *= s; return *this; }
  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) noexcept { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) noexcept { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 v) noexcept { return {s * v.x, s * v.y}; }
  friend constexpr Vec2 operator*(Vec2 v, double s) noexcept { return {s * v.x, s * v.y}; }
  friend constexpr bool operator==(Vec2, Vec2) noexcept = default;
};

inline double norm(Vec2 v) noexcept { return std::sqrt(v.x * v.x + v.y * v.y); }
inline double distance(Vec2 a, Vec2 b) noexcept { return norm(a - b); }

// Grid cell address. Row 0 is the southern edge (y grows northwards).
struct CellIndex {
  int col = 0;
  int row = 0;

  friend constexpr auto operator<=>(CellIndex, CellIndex) noexcept = default;
};

// Ordered so iteration (and therefore every hash and serialization) is stable.
using CellSet = std::set<CellIndex>;

}  // namespace hsi

template <>
struct std::hash<hsi::CellIndex> {
  std::size_t operator()(hsi::CellIndex c) const noexcept {
    return std::hash<long long>{}((static_cast<long long>(c.col) << 32) ^ static_cast<unsigned>(c.row));
  }
};
