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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hsi/geometry.hpp"
#include "hsi/hazards.hpp"
#include "hsi/rng.hpp"
#include "hsi/swarm.hpp"
#include "hsi/world.hpp"

namespace hsi {

struct MarkCell {
  CellIndex cell;
  friend bool operator==(const MarkCell&, const MarkCell&) = default;
};
struct UnmarkCell {
  CellIndex cell;
  friend bool operator==(const UnmarkCell&, const UnmarkCell&) = default;
};
struct Swipe {
  Vec2 origin;
  Vec2 direction;  // unit vector
  double magnitude = 0.0;  // normalized to [0, 1]
  friend bool operator==(const Swipe&, const Swipe&) = default;
};

struct OperatorAction {
  std::int64_t tick = 0;
  std::variant<MarkCell, UnmarkCell, Swipe> kind;
  friend bool operator==(const OperatorAction&, const OperatorAction&) = default;
};

// Throws DomainError for a non-unit direction or magnitude outside [0, 1].
void validate_swipe(const Swipe& s);
// Builds a Swipe from a gesture vector; magnitude is |vector| / reference_length capped at 1.
Swipe swipe_from_gesture(Vec2 origin, Vec2 vector, double reference_length);

// Applies Mark/Unmark to the marked set. Marking a static obstacle or an
// out-of-grid cell is refused; the returned string is the user-visible
// reason. Swipes are ignored here.
std::optional<std::string> apply_mark(const OperatorAction& action, CellSet& marked, const GridWorld& world);

struct SwipeParams {
  double radius = 3.0;     // m
  double k_impulse = 3.0;  // m/s for a full-strength swipe at its origin
};

// Linear falloff: k * magnitude * direction * (1 - dist / radius) for Active
// robots with dist <= radius.
std::map<int, Vec2> swipe_impulses(const Swipe& swipe, std::span<const RobotState> swarm, const SwipeParams& params);

// Tick ordering for actions that share a tick: marks before swipes, then
// arrival order.
void order_actions(std::vector<OperatorAction>& actions);

enum class PolicyKind : std::uint8_t { Passive, OracleMarker, NoisyMarker, RandomSwiper };

std::string_view policy_name(PolicyKind k) noexcept;
PolicyKind parse_policy(std::string_view s);

struct ScriptedOperatorPolicy {
  PolicyKind kind = PolicyKind::Passive;
  double accuracy = 1.0;              // noisy-marker
  std::int64_t delay_ticks = 0;       // noisy-marker
  std::int64_t swipe_interval_ticks = 100;  // random-swiper

  void validate() const;
};

// Operator-visible state: never carries hazard ground truth.
struct OperatorView {
  std::int64_t tick = 0;
  std::span<const RobotState> robots;
  const CellSet* marked = nullptr;
  std::span<const AlertMessage> new_alerts;
  Bounds bounds;
};

class ScriptedOperator {
 public:
  ScriptedOperator(ScriptedOperatorPolicy policy, RngStream rng);

  std::vector<OperatorAction> act(const OperatorView& view);
  const ScriptedOperatorPolicy& policy() const noexcept { return policy_; }

 private:
  ScriptedOperatorPolicy policy_;
  RngStream rng_;
  std::deque<OperatorAction> delayed_;
};

}  // namespace hsi
