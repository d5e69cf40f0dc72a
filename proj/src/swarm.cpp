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

#include "hsi/swarm.hpp"

#include <algorithm>
#include <cmath>

#include "hsi/error.hpp"
#include "hsi/kernels/kernels.hpp"

namespace hsi {

void StagnationWindow::push(Vec2 p, bool blocked) noexcept {
  if (positions_.empty()) return;
  positions_[head_] = p;
  blocked_[head_] = blocked ? 1 : 0;
  head_ = (head_ + 1) % positions_.size();
  size_ = std::min(size_ + 1, positions_.size());
}

double StagnationWindow::max_displacement(Vec2 from) const noexcept {
  double best = 0.0;
  for (std::size_t i = 0; i < size_; ++i) best = std::max(best, distance(from, positions_[i]));
  return best;
}

bool StagnationWindow::any_blocked() const noexcept {
  for (std::size_t i = 0; i < size_; ++i) {
    if (blocked_[i]) return true;
  }
  return false;
}

void PsoParams::validate() const {
  if (n_robots < 1) throw ConfigError("swarm: n_robots must be >= 1");
  if (!(w > 0.0 && w < 1.0)) throw ConfigError("swarm: w must be in (0, 1)");
  if (!(c1 > 0.0 && c2 > 0.0)) throw ConfigError("swarm: c1, c2 must be > 0");
  if (!(vmax > 0.0 && comm_range > 0.0 && d_min > 0.0 && dt > 0.0)) {
    throw ConfigError("swarm: vmax, comm_range, d_min and dt must be > 0");
  }
  if (!(power > 0.0)) throw ConfigError("swarm: power must be > 0");
  if (pso_period_ticks < 1) throw ConfigError("swarm: pso_period_ticks must be >= 1");
  if (trapped_window_ticks < 1 || !(trapped_epsilon > 0.0)) throw ConfigError("swarm: bad trapped-window settings");
}

double fitness(Vec2 pos, const GridWorld& world, double power, double d_min) {
  const Vec2 t = world.target();
  const double dx = pos.x - t.x;
  const double dy = pos.y - t.y;
  const double d = std::max(std::sqrt(dx * dx + dy * dy), d_min);
  return power / (d * d);
}

Vec2 lbest_of(const RobotState& robot, std::span<const RobotState> swarm, double comm_range) {
  const RobotState* best = &robot;
  const double range2 = comm_range * comm_range;
  for (const RobotState& other : swarm) {
    if (!other.active()) continue;
    const Vec2 d = other.position - robot.position;
    if (d.x * d.x + d.y * d.y > range2) continue;
    if (other.pbest_fitness > best->pbest_fitness ||
        (other.pbest_fitness == best->pbest_fitness && other.id < best->id)) {
      best = &other;
    }
  }
  return best->pbest_pos;
}

AvoidResult avoid(Vec2 candidate, Vec2 velocity, const RobotState& robot, const GridWorld& world,
                  const CellSet& marked) {
  const CellIndex here = world.contains(robot.position) ? world.cell_of(robot.position) : CellIndex{-1, -1};
  auto allowed = [&](Vec2 p) {
    if (!world.contains(p)) return false;
    const CellIndex c = world.cell_of(p);
    return c == here || !is_blocked(c, world, marked);
  };
  if (allowed(candidate)) return {candidate, velocity, false};
  const Vec2 x_only{candidate.x, robot.position.y};
  if (allowed(x_only)) return {x_only, {velocity.x, 0.0}, true};
  const Vec2 y_only{robot.position.x, candidate.y};
  if (allowed(y_only)) return {y_only, {0.0, velocity.y}, true};
  return {robot.position, {0.0, 0.0}, true};
}

namespace {

RobotState move_with(const RobotState& robot, Vec2 v, const PsoParams& params, const GridWorld& world,
                     const CellSet& marked) {
  RobotState next = robot;
  const double speed = norm(v);
  if (speed > params.vmax) v *= params.vmax / speed;
  const AvoidResult moved = avoid(robot.position + params.dt * v, v, robot, world, marked);
  next.position = moved.position;
  next.velocity = moved.velocity;
  const double f = fitness(next.position, world, params.power, params.d_min);
  if (f > next.pbest_fitness) {
    next.pbest_fitness = f;
    next.pbest_pos = next.position;
  }
  next.window.push(next.position, moved.blocked);
  return next;
}

}  // namespace

RobotState step_robot(const RobotState& robot, Vec2 lbest, const PsoParams& params, const GridWorld& world,
                      const CellSet& marked, Vec2 impulse, double r1, double r2) {
  if (!robot.active()) return robot;
  const Vec2 v = params.w * robot.velocity + params.c1 * r1 * (robot.pbest_pos - robot.position) +
                 params.c2 * r2 * (lbest - robot.position) + impulse;
  return move_with(robot, v, params, world, marked);
}

RobotState coast_robot(const RobotState& robot, const PsoParams& params, const GridWorld& world,
                       const CellSet& marked, Vec2 impulse) {
  if (!robot.active()) return robot;
  return move_with(robot, robot.velocity + impulse, params, world, marked);
}

std::vector<int> apply_hazards(std::vector<RobotState>& swarm, const CellSet& hazard_cells, const GridWorld& world) {
  std::vector<int> hit;
  for (RobotState& r : swarm) {
    if (!r.active()) continue;
    if (hazard_cells.contains(world.cell_of(r.position))) {
      r.status = RobotStatus::Deactivated;
      r.velocity = {0.0, 0.0};
      hit.push_back(r.id);
    }
  }
  return hit;
}

std::set<int> trapped_robots(std::span<const RobotState> swarm, double epsilon) {
  std::set<int> out;
  for (const RobotState& r : swarm) {
    if (!r.active() || !r.window.full()) continue;
    if (r.window.max_displacement(r.position) < epsilon && r.window.any_blocked()) out.insert(r.id);
  }
  return out;
}

std::vector<RobotState> spawn_swarm(const PsoParams& params, const GridWorld& world, const SpawnArea& area,
                                    RngStream& rng) {
  params.validate();
  const double cs = world.cell_size();
  std::vector<CellIndex> free;
  for (int row = area.row_begin; row < area.row_begin + area.extent; ++row) {
    for (int col = area.col_begin; col < area.col_begin + area.extent; ++col) {
      const CellIndex c{col, row};
      if (world.valid(c) && !world.is_obstacle(c)) free.push_back(c);
    }
  }
  if (free.empty()) throw ConfigError("spawn area has no free cell");
  std::vector<RobotState> swarm;
  swarm.reserve(static_cast<std::size_t>(params.n_robots));
  for (int id = 0; id < params.n_robots; ++id) {
    const CellIndex c = free[rng.below(free.size())];
    RobotState r;
    r.id = id;
    r.position = {(c.col + rng.uniform()) * cs, (c.row + rng.uniform()) * cs};
    r.pbest_pos = r.position;
    r.pbest_fitness = fitness(r.position, world, params.power, params.d_min);
    r.window = StagnationWindow(static_cast<std::size_t>(params.trapped_window_ticks));
    swarm.push_back(std::move(r));
  }
  return swarm;
}

void step_swarm(std::vector<RobotState>& swarm, std::int64_t tick, const PsoParams& params, const GridWorld& world,
                const CellSet& marked, const std::map<int, Vec2>& impulses, const RngStream& rng) {
  const std::size_t n = swarm.size();
  if (tick % params.pso_period_ticks != 0) {
    for (RobotState& r : swarm) {
      const auto imp = impulses.find(r.id);
      r = coast_robot(r, params, world, marked, imp == impulses.end() ? Vec2{} : imp->second);
    }
    return;
  }
  std::vector<double> xs(n), ys(n), d2(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = swarm[i].position.x;
    ys[i] = swarm[i].position.y;
  }
  const double range2 = params.comm_range * params.comm_range;
  std::vector<Vec2> social(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!swarm[i].active()) continue;
    kernels::squared_distances(xs, ys, swarm[i].position, d2);
    std::size_t best = i;
    for (std::size_t j = 0; j < n; ++j) {
      if (!swarm[j].active() || d2[j] > range2) continue;
      const double fj = swarm[j].pbest_fitness;
      const double fb = swarm[best].pbest_fitness;
      if (fj > fb || (fj == fb && swarm[j].id < swarm[best].id)) best = j;
    }
    social[i] = swarm[best].pbest_pos;
  }
  const auto t = static_cast<std::uint64_t>(tick);
  for (std::size_t i = 0; i < n; ++i) {
    RobotState& r = swarm[i];
    if (!r.active()) continue;
    const auto id = static_cast<std::uint64_t>(r.id);
    const auto imp = impulses.find(r.id);
    r = step_robot(r, social[i], params, world, marked, imp == impulses.end() ? Vec2{} : imp->second,
                   rng.uniform_at(t, id, 0), rng.uniform_at(t, id, 1));
  }
}

double max_pbest_fitness(std::span<const RobotState> swarm) noexcept {
  double best = 0.0;
  for (const RobotState& r : swarm) best = std::max(best, r.pbest_fitness);
  return best;
}

}  // namespace hsi
