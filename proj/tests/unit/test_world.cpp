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


#include <doctest.h>

#include <map>
#include <set>

#include "hsi/error.hpp"
#include "hsi/rng.hpp"
#include "hsi/world.hpp"

using namespace hsi;

TEST_SUITE("world") {

TEST_CASE("cell_of uses half-open cells with a closed max edge") {
  GridWorld w(20, 20, 1.0, {}, {10.5, 10.5});
  CHECK(w.cell_of({0.0, 0.0}) == CellIndex{0, 0});
  CHECK(w.cell_of({2.5, 0.1}) == CellIndex{2, 0});
  CHECK(w.cell_of({20.0, 20.0}) == CellIndex{19, 19});
  CHECK(w.cell_of({1.0, 0.999}) == CellIndex{1, 0});
  CHECK_THROWS_AS(w.cell_of({-0.01, 3.0}), DomainError);
  CHECK_THROWS_AS(w.cell_of({3.0, 20.01}), DomainError);

  GridWorld coarse(4, 3, 2.5, {}, {1.0, 1.0});
  CHECK(coarse.cell_of({9.99, 7.4}) == CellIndex{3, 2});
  CHECK(coarse.cell_of({10.0, 7.5}) == CellIndex{3, 2});
}

TEST_CASE("cell centres round-trip") {
  GridWorld w(7, 5, 0.5, {}, {0.25, 0.25});
  for (int r = 0; r < 5; ++r)
    for (int c = 0; c < 7; ++c) CHECK(w.cell_of(w.cell_center({c, r})) == CellIndex{c, r});
}

TEST_CASE("is_blocked is the union of obstacles and marks") {
  GridWorld w(5, 5, 1.0, {{1, 1}}, {4.5, 4.5});
  CHECK(is_blocked({1, 1}, w, {}));
  CHECK(is_blocked({2, 2}, w, {{2, 2}}));
  CHECK_FALSE(is_blocked({3, 3}, w, {{2, 2}}));
}

TEST_CASE("world invariants are enforced") {
  CHECK_THROWS_AS(GridWorld(0, 5, 1.0, {}, {0.5, 0.5}), DomainError);
  CHECK_THROWS_AS(GridWorld(5, 5, 0.0, {}, {0.5, 0.5}), DomainError);
  CHECK_THROWS_AS(GridWorld(5, 5, 1.0, {{5, 0}}, {0.5, 0.5}), DomainError);
  CHECK_THROWS_AS(GridWorld(5, 5, 1.0, {}, {6.0, 0.5}), DomainError);
  CHECK_THROWS_AS(GridWorld(5, 5, 1.0, {{0, 0}}, {0.5, 0.5}), DomainError);
}

TEST_CASE("neighbors stay in bounds") {
  GridWorld w(3, 3, 1.0, {}, {2.5, 2.5});
  CHECK(w.neighbors({0, 0}).size() == 2);
  CHECK(w.neighbors({1, 1}).size() == 4);
  CHECK(w.neighbors({1, 1}, 8).size() == 8);
  CHECK(w.neighbors({2, 1}, 8).size() == 5);
}

TEST_CASE("regions partition the grid with centre priority") {
  // Independent labelling: centre block first, then quadrant by half-planes.
  for (auto [wd, ht] : {std::pair{20, 20}, {2, 2}, {7, 4}, {3, 9}}) {
    GridWorld w(wd, ht, 1.0, {}, {0.5, 0.5});
    RegionMap m = quadrant_regions(w);
    const int cc = (wd + 1) / 2, cr = (ht + 1) / 2;
    const int c0 = (wd - cc) / 2, r0 = (ht - cr) / 2;
    CHECK(m.center_cols() == cc);
    CHECK(m.center_rows() == cr);
    std::size_t total = 0;
    for (Region r : kAllRegions) total += m.cells(r).size();
    CHECK(total == w.cell_count());
    for (int r = 0; r < ht; ++r) {
      for (int c = 0; c < wd; ++c) {
        Region got = m.region_of({c, r});
        if (c >= c0 && c < c0 + cc && r >= r0 && r < r0 + cr) {
          CHECK(got == Region::Center);
          continue;
        }
        CHECK(got != Region::Center);
        // Ties on an odd midline go east / north.
        const bool east = c + 0.5 >= wd / 2.0;
        const bool north = r + 0.5 >= ht / 2.0;
        Region want = north ? (east ? Region::NE : Region::NW) : (east ? Region::SE : Region::SW);
        CHECK(got == want);
      }
    }
  }
  GridWorld w20(20, 20, 1.0, {}, {0.5, 0.5});
  RegionMap m20 = quadrant_regions(w20);
  CHECK(m20.center_col_begin() == 5);
  CHECK(m20.center_row_begin() == 5);
  CHECK(m20.cells(Region::Center).size() == 100);
  CHECK_THROWS_AS(quadrant_regions(GridWorld(1, 1, 1.0, {}, {0.5, 0.5})), DomainError);
}

TEST_CASE("make_world honours spawn exclusion, density and target distance") {
  WorldConfig cfg;
  const SpawnArea spawn = spawn_area(cfg);
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    RngStream rng(seed, "world");
    GridWorld w = make_world(cfg, rng);
    CHECK(w.static_obstacles().size() == 24);  // 6% of 400
    for (CellIndex c : w.static_obstacles()) CHECK_FALSE(spawn.contains(c));
    CHECK_FALSE(w.is_obstacle(w.cell_of(w.target())));
    const Vec2 centroid{spawn.extent / 2.0, spawn.extent / 2.0};
    CHECK(distance(w.target(), centroid) >= w.diagonal() / 2.0);
    RngStream again(seed, "world");
    GridWorld w2 = make_world(cfg, again);
    CHECK(w2.static_obstacles() == w.static_obstacles());
    CHECK(w2.target() == w.target());
  }
}

TEST_CASE("fixed world settings override sampling") {
  WorldConfig cfg;
  cfg.has_fixed_target = true;
  cfg.fixed_target = {12.5, 3.5};
  cfg.fixed_obstacles = {{6, 6}, {7, 7}};
  RngStream rng(3, "world");
  GridWorld w = make_world(cfg, rng);
  CHECK(w.target() == Vec2{12.5, 3.5});
  CHECK(w.static_obstacles() == CellSet{{6, 6}, {7, 7}});
}

}  // TEST_SUITE

TEST_SUITE("rng") {

TEST_CASE("streams are deterministic and independent by name") {
  RngStream a(42, "swarm"), b(42, "swarm"), c(42, "hazards"), d(43, "swarm");
  bool differs_c = false, differs_d = false;
  for (int i = 0; i < 64; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    differs_c |= x != c.next_u64();
    differs_d |= x != d.next_u64();
  }
  CHECK(differs_c);
  CHECK(differs_d);
}

TEST_CASE("uniform and below stay in range and look uniform") {
  RngStream r(7, "test");
  std::map<std::uint64_t, int> counts;
  for (int i = 0; i < 60000; ++i) {
    double u = r.uniform();
    CHECK((u >= 0.0 && u < 1.0));
    counts[r.below(6)]++;
  }
  CHECK(counts.size() == 6);
  for (auto& [k, n] : counts) CHECK(std::abs(n - 10000) < 500);
}

TEST_CASE("addressed draws do not advance the stream") {
  RngStream r(9, "swarm");
  const auto before = r.counter();
  const double u = r.uniform_at(10, 3, 1);
  CHECK(r.counter() == before);
  CHECK(u == r.uniform_at(10, 3, 1));
  CHECK(u != r.uniform_at(10, 3, 2));
}

TEST_CASE("fnv1a64 matches the published test vectors") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

}  // TEST_SUITE
