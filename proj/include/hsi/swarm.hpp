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

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <vector>

#include "hsi/geometry.hpp"
#include "hsi/rng.hpp"
#include "hsi/world.hpp"

namespace hsi {

enum class RobotStatus : std::uint8_t { Active, Deactivated };

// Fixed-capacity ring of recent positions plus whether avoidance blocked the
// move that produced each one.
class StagnationWindow {
 public:
  StagnationWindow() = default;
  explicit StagnationWindow(std::size_t capacity) : positions_(capacity), blocked_(capacity, 0) {}

  void push(Vec2 p, bool blocked) noexcept;
  bool full() const noexcept { return !positions_.empty() && size_ == positions_.size(); }
  std::size_t size() const noexcept { return size_; }
  std::size_t capacity() const noexcept { return positions_.size(); }
  // Largest distance from `from` to any stored position.
  double max_displacement(Vec2 from) const noexcept;
  bool any_blocked() const noexcept;

 private:
  std::vector<Vec2> positions_;
  std::vector<std::uint8_t> blocked_;
  std::size_t head_ = 0;
  std::size_t size_ = 0;
};

struct RobotState {
  int id = 0;
  Vec2 position;
  Vec2 velocity;
  Vec2 pbest_pos;
  double pbest_fitness = 0.0;
  RobotStatus status = RobotStatus::Active;
  StagnationWindow window;

  bool active() const noexcept { return status == RobotStatus::Active; }
};

struct PsoParams {
  int n_robots = 20;
  double w = 0.729;
  double c1 = 1.49445;
  double c2 = 1.49445;
  double vmax = 1.5;         // m/s
  double comm_range = 5.0;   // m
  double dt = 0.1;           // s per tick
  // Ticks between LBEST velocity updates; robots coast on the commanded
  // velocity in between (still avoiding, sensing and taking impulses).
  int pso_period_ticks = 10;
  double power = 100.0;      // source power P
  double d_min = 0.01;       // m
  int trapped_window_ticks = 100;
  double trapped_epsilon = 0.25;  // m

  void validate() const;
};

// Received intensity of the target source: P / max(d, d_min)^2.
double fitness(Vec2 pos, const GridWorld& world, double power, double d_min);

// Best personal best among Active robots within comm_range (self included),
// ties to the lowest id.
Vec2 lbest_of(const RobotState& robot, std::span<const RobotState> swarm, double comm_range);

struct AvoidResult {
  Vec2 position;
  Vec2 velocity;
  bool blocked = false;  // the unconstrained candidate was rejected
};

// Rejects moves into blocked or out-of-bounds cells, falling back to the
// x-only then y-only projection of the move; if both fail the robot holds
// position with zero velocity. A projected move keeps only the velocity
// component along the accepted axis. A robot whose current cell became
// blocked may still move within that cell so it can leave it.
AvoidResult avoid(Vec2 candidate, Vec2 velocity, const RobotState& robot, const GridWorld& world,
                  const CellSet& marked);

// One LBEST update with pre-drawn uniforms r1, r2 and the summed operator
// impulse for this robot. Deactivated robots are returned unchanged.
RobotState step_robot(const RobotState& robot, Vec2 lbest, const PsoParams& params, const GridWorld& world,
                      const CellSet& marked, Vec2 impulse, double r1, double r2);

// Movement on a tick without a velocity update: v' = v + impulse, clamped,
// then the same avoidance / sensing as step_robot.
RobotState coast_robot(const RobotState& robot, const PsoParams& params, const GridWorld& world,
                       const CellSet& marked, Vec2 impulse);

// Deactivates every Active robot standing in a hazardous cell; returns their ids.
std::vector<int> apply_hazards(std::vector<RobotState>& swarm, const CellSet& hazard_cells, const GridWorld& world);

std::set<int> trapped_robots(std::span<const RobotState> swarm, double epsilon);

// Robots placed uniformly in the free cells of the spawn block, at rest,
// with pbest at the spawn position.
std::vector<RobotState> spawn_swarm(const PsoParams& params, const GridWorld& world, const SpawnArea& area,
                                    RngStream& rng);

// Synchronous swarm update: on ticks that are multiples of pso_period_ticks
// every robot's social attractor is taken from the state at the start of the
// tick and r1/r2 are addressed by (tick, id), so the result does not depend on
// update order. Other ticks coast.
void step_swarm(std::vector<RobotState>& swarm, std::int64_t tick, const PsoParams& params, const GridWorld& world,
                const CellSet& marked, const std::map<int, Vec2>& impulses, const RngStream& rng);

double max_pbest_fitness(std::span<const RobotState> swarm) noexcept;

}  // namespace hsi
