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
#include <memory>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "hsi/hazards.hpp"
#include "hsi/intervention.hpp"
#include "hsi/metrics.hpp"
#include "hsi/rng.hpp"
#include "hsi/swarm.hpp"
#include "hsi/world.hpp"

namespace hsi {

struct SimParams {
  PsoParams pso;
  SwipeParams swipe;
  NaqMode naq_mode = NaqMode::PrefixMean;
  std::int64_t total_ticks = 3000;
};

struct RejectedAction {
  OperatorAction action;
  std::string reason;
};

struct TickOutput {
  std::int64_t tick = 0;
  std::vector<OperatorAction> applied;
  std::vector<RejectedAction> rejected;
  std::vector<HazardEvent> hazard_events;
  std::vector<AlertMessage> alerts;
  std::vector<int> deactivated;
};

// Full deterministic task state. Copying it yields an independent fork.
class Simulation {
 public:
  Simulation(std::shared_ptr<const GridWorld> world, SimParams params, std::vector<RobotState> swarm,
             HazardField hazards, RngStream swarm_rng);

  // Runs one tick: apply actions -> step hazards -> swipe impulses -> move
  // robots -> deactivate robots in hazardous cells.
  TickOutput advance(std::span<const OperatorAction> actions);

  std::int64_t tick() const noexcept { return tick_; }
  std::int64_t remaining_ticks() const noexcept { return params_.total_ticks - tick_; }
  bool finished() const noexcept { return tick_ >= params_.total_ticks; }
  const GridWorld& world() const noexcept { return *world_; }
  std::shared_ptr<const GridWorld> world_ptr() const noexcept { return world_; }
  const SimParams& params() const noexcept { return params_; }
  const std::vector<RobotState>& swarm() const noexcept { return swarm_; }
  const HazardField& hazards() const noexcept { return hazards_; }
  const CellSet& marked() const noexcept { return marked_; }

  std::set<int> trapped() const { return trapped_robots(swarm_, params_.pso.trapped_epsilon); }
  MetricSample metrics() const;

  // Digest of the canonical state (robots, hazard cells, marked cells, tick).
  std::uint64_t state_digest() const noexcept;

 private:
  std::shared_ptr<const GridWorld> world_;
  SimParams params_;
  std::vector<RobotState> swarm_;
  HazardField hazards_;
  RngStream swarm_rng_;
  CellSet marked_;
  std::int64_t tick_ = 0;
};

// Order-sensitive 64-bit combination used for rolling hashes.
std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) noexcept;

}  // namespace hsi
