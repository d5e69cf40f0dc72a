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

#include "hsi/simulation.hpp"

#include <bit>
#include <map>

namespace hsi {

std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t value) noexcept {
  return splitmix64(seed ^ (value + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2)));
}

Simulation::Simulation(std::shared_ptr<const GridWorld> world, SimParams params, std::vector<RobotState> swarm,
                       HazardField hazards, RngStream swarm_rng)
    : world_(std::move(world)),
      params_(params),
      swarm_(std::move(swarm)),
      hazards_(std::move(hazards)),
      swarm_rng_(swarm_rng) {}

TickOutput Simulation::advance(std::span<const OperatorAction> actions) {
  TickOutput out;
  out.tick = ++tick_;

  std::vector<const Swipe*> swipes;
  for (const OperatorAction& a : actions) {
    if (const auto* s = std::get_if<Swipe>(&a.kind)) {
      swipes.push_back(s);
      out.applied.push_back(a);
    } else if (auto err = apply_mark(a, marked_, *world_)) {
      out.rejected.push_back({a, *err});
    } else {
      out.applied.push_back(a);
    }
  }

  HazardStepResult hz = hazards_.step(tick_, *world_);
  out.hazard_events = std::move(hz.events);
  out.alerts = std::move(hz.alerts);

  std::map<int, Vec2> impulses;
  for (const Swipe* s : swipes) {
    for (const auto& [id, dv] : swipe_impulses(*s, swarm_, params_.swipe)) impulses[id] += dv;
  }

  step_swarm(swarm_, tick_, params_.pso, *world_, marked_, impulses, swarm_rng_);
  out.deactivated = apply_hazards(swarm_, hazards_.active_cells(), *world_);
  return out;
}

MetricSample Simulation::metrics() const {
  return compute_metrics(swarm_, *world_, tick_, params_.naq_mode, static_cast<int>(trapped().size()));
}

std::uint64_t Simulation::state_digest() const noexcept {
  std::uint64_t h = hash_combine(0x5eed5eed5eed5eedULL, static_cast<std::uint64_t>(tick_));
  auto mix_double = [&h](double d) { h = hash_combine(h, std::bit_cast<std::uint64_t>(d)); };
  for (const RobotState& r : swarm_) {
    h = hash_combine(h, static_cast<std::uint64_t>(r.id));
    mix_double(r.position.x);
    mix_double(r.position.y);
    mix_double(r.velocity.x);
    mix_double(r.velocity.y);
    mix_double(r.pbest_pos.x);
    mix_double(r.pbest_pos.y);
    mix_double(r.pbest_fitness);
    h = hash_combine(h, static_cast<std::uint64_t>(r.status));
  }
  auto mix_cells = [&h](const CellSet& cells, std::uint64_t tag) {
    h = hash_combine(h, tag);
    h = hash_combine(h, cells.size());
    for (CellIndex c : cells) {
      h = hash_combine(h, (static_cast<std::uint64_t>(static_cast<std::uint32_t>(c.col)) << 32) |
                              static_cast<std::uint32_t>(c.row));
    }
  };
  mix_cells(hazards_.active_cells(), 0x6861);
  mix_cells(marked_, 0x6d61);
  return h;
}

}  // namespace hsi
