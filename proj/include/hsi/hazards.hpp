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
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hsi/geometry.hpp"
#include "hsi/rng.hpp"
#include "hsi/world.hpp"

namespace hsi {

enum class HazardKind : std::uint8_t { Dis, Mov, Spr };
enum class WalkPolicy : std::uint8_t { RandomWalk, PatrolCycle };
enum class AlertTheme : std::uint8_t { Fire, FallingObjects, Wind, Rockfall };

std::string_view hazard_kind_name(HazardKind k) noexcept;
HazardKind parse_hazard_kind(std::string_view s);
std::string_view walk_policy_name(WalkPolicy p) noexcept;
WalkPolicy parse_walk_policy(std::string_view s);
std::string_view theme_name(AlertTheme t) noexcept;
AlertTheme parse_theme(std::string_view s);
AlertTheme default_theme(HazardKind k) noexcept;

inline constexpr std::int64_t kNeverExpires = std::numeric_limits<std::int64_t>::max();

// All intervals are in ticks.
struct HazardParams {
  // Dis
  std::int64_t dis_interval_ticks = 150;
  int dis_cells_per_event = 3;
  std::int64_t dis_duration_ticks = 300;  // kNeverExpires disables expiry
  // Mov
  int mov_footprint_size = 4;
  std::int64_t mov_step_interval_ticks = 50;
  WalkPolicy mov_walk_policy = WalkPolicy::RandomWalk;
  int mov_patrol_leg_steps = 5;
  // Spr
  std::optional<CellIndex> spr_origin;  // sampled when absent
  std::int64_t spr_spread_interval_ticks = 100;
  double spr_spread_probability = 0.35;
  // Shared
  int connectivity = 4;
  std::int64_t alert_latency_ticks = 0;
  AlertTheme theme = AlertTheme::Fire;

  void validate() const;
};

// One change of the hazardous set. Events with no new cells (Mov steps that
// only vacate, exhausted Dis samples) are still recorded for the log.
struct HazardEvent {
  std::int64_t tick = 0;
  HazardKind kind = HazardKind::Dis;
  std::vector<CellIndex> activated;
  std::vector<CellIndex> cleared;
  bool exhausted = false;  // sampling found no eligible cell
};

struct AlertMessage {
  std::int64_t tick = 0;  // delivery tick
  HazardKind kind = HazardKind::Dis;
  std::vector<CellIndex> cells;
  std::string text;
};

AlertMessage render_alert(const HazardEvent& event, AlertTheme theme);

struct HazardStepResult {
  std::vector<HazardEvent> events;
  std::vector<AlertMessage> alerts;  // due for delivery this tick
};

// The dynamic hazard process for one task. Stepped by a single owner.
class HazardField {
 public:
  // Places the initial footprint (Mov) or origin (Spr); `avoid` cells (the
  // swarm spawn block) are excluded from initial placement only.
  static HazardField create(HazardKind kind, const HazardParams& params, const GridWorld& world, RngStream rng,
                            const SpawnArea& avoid);

  // Applies expiries and any interval events for `tick`. Ticks must be
  // strictly increasing and > 0.
  HazardStepResult step(std::int64_t tick, const GridWorld& world);

  // Event describing the initial placement at tick 0 (empty for Dis).
  const HazardEvent& initial_event() const noexcept { return initial_; }
  // Alerts for the initial placement, queued through the latency buffer.
  std::vector<AlertMessage> take_initial_alerts();

  HazardKind kind() const noexcept { return kind_; }
  const HazardParams& params() const noexcept { return params_; }
  const CellSet& active_cells() const noexcept { return active_; }
  const std::map<CellIndex, std::int64_t>& dis_expiry() const noexcept { return dis_expiry_; }
  const std::vector<CellIndex>& mov_footprint() const noexcept { return mov_footprint_; }
  int mov_heading() const noexcept { return mov_heading_; }
  std::int64_t last_tick() const noexcept { return last_tick_; }

 private:
  HazardField(HazardKind kind, const HazardParams& params, RngStream rng)
      : kind_(kind), params_(params), rng_(rng) {}

  void step_dis(std::int64_t tick, const GridWorld& world, HazardStepResult& out);
  void step_mov(std::int64_t tick, const GridWorld& world, HazardStepResult& out);
  void step_spr(std::int64_t tick, const GridWorld& world, HazardStepResult& out);
  void enqueue_alert(const HazardEvent& ev);

  HazardKind kind_;
  HazardParams params_;
  RngStream rng_;
  CellSet active_;
  std::map<CellIndex, std::int64_t> dis_expiry_;
  std::vector<CellIndex> mov_footprint_;
  int mov_heading_ = 0;
  int mov_leg_progress_ = 0;
  HazardEvent initial_;
  std::deque<AlertMessage> pending_;
  std::int64_t last_tick_ = 0;
};

}  // namespace hsi
