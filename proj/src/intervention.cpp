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

#include "hsi/intervention.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hsi/error.hpp"

namespace hsi {

void validate_swipe(const Swipe& s) {
  if (std::abs(norm(s.direction) - 1.0) > 1e-9) throw DomainError("swipe direction must be a unit vector");
  if (!(s.magnitude >= 0.0 && s.magnitude <= 1.0)) throw DomainError("swipe magnitude must be in [0, 1]");
}

Swipe swipe_from_gesture(Vec2 origin, Vec2 vector, double reference_length) {
  if (!(reference_length > 0.0)) throw DomainError("swipe reference length must be > 0");
  const double len = norm(vector);
  if (len == 0.0) throw DomainError("zero-length swipe");
  return {origin, (1.0 / len) * vector, std::min(1.0, len / reference_length)};
}

std::optional<std::string> apply_mark(const OperatorAction& action, CellSet& marked, const GridWorld& world) {
  if (const auto* m = std::get_if<MarkCell>(&action.kind)) {
    if (!world.valid(m->cell)) return "cell outside the grid";
    if (world.is_obstacle(m->cell)) return "cannot mark a static obstacle";
    marked.insert(m->cell);
  } else if (const auto* u = std::get_if<UnmarkCell>(&action.kind)) {
    if (!world.valid(u->cell)) return "cell outside the grid";
    marked.erase(u->cell);
  }
  return std::nullopt;
}

std::map<int, Vec2> swipe_impulses(const Swipe& swipe, std::span<const RobotState> swarm, const SwipeParams& params) {
  validate_swipe(swipe);
  std::map<int, Vec2> out;
  for (const RobotState& r : swarm) {
    if (!r.active()) continue;
    const double dist = distance(r.position, swipe.origin);
    if (dist > params.radius) continue;
    const double falloff = 1.0 - dist / params.radius;
    out[r.id] += (params.k_impulse * swipe.magnitude * falloff) * swipe.direction;
  }
  return out;
}

void order_actions(std::vector<OperatorAction>& actions) {
  std::stable_sort(actions.begin(), actions.end(), [](const OperatorAction& a, const OperatorAction& b) {
    if (a.tick != b.tick) return a.tick < b.tick;
    const bool sa = std::holds_alternative<Swipe>(a.kind);
    const bool sb = std::holds_alternative<Swipe>(b.kind);
    return !sa && sb;
  });
}

std::string_view policy_name(PolicyKind k) noexcept {
  switch (k) {
    case PolicyKind::Passive: return "passive";
    case PolicyKind::OracleMarker: return "oracle-marker";
    case PolicyKind::NoisyMarker: return "noisy-marker";
    case PolicyKind::RandomSwiper: return "random-swiper";
  }
  return "?";
}

PolicyKind parse_policy(std::string_view s) {
  if (s == "passive") return PolicyKind::Passive;
  if (s == "oracle-marker") return PolicyKind::OracleMarker;
  if (s == "noisy-marker") return PolicyKind::NoisyMarker;
  if (s == "random-swiper") return PolicyKind::RandomSwiper;
  throw ConfigError("unknown operator policy '" + std::string(s) + "'");
}

void ScriptedOperatorPolicy::validate() const {
  if (!(accuracy >= 0.0 && accuracy <= 1.0)) throw ConfigError("operator accuracy must be in [0, 1]");
  if (delay_ticks < 0) throw ConfigError("operator delay must be >= 0");
  if (swipe_interval_ticks < 1) throw ConfigError("operator swipe interval must be >= 1");
}

ScriptedOperator::ScriptedOperator(ScriptedOperatorPolicy policy, RngStream rng) : policy_(policy), rng_(rng) {
  policy_.validate();
}

std::vector<OperatorAction> ScriptedOperator::act(const OperatorView& view) {
  std::vector<OperatorAction> out;
  switch (policy_.kind) {
    case PolicyKind::Passive:
      break;
    case PolicyKind::OracleMarker:
      for (const AlertMessage& a : view.new_alerts) {
        for (CellIndex c : a.cells) out.push_back({view.tick, MarkCell{c}});
      }
      break;
    case PolicyKind::NoisyMarker:
      for (const AlertMessage& a : view.new_alerts) {
        for (CellIndex c : a.cells) {
          if (rng_.uniform() < policy_.accuracy) delayed_.push_back({view.tick + policy_.delay_ticks, MarkCell{c}});
        }
      }
      while (!delayed_.empty() && delayed_.front().tick <= view.tick) {
        out.push_back(delayed_.front());
        out.back().tick = view.tick;
        delayed_.pop_front();
      }
      break;
    case PolicyKind::RandomSwiper:
      if (view.tick > 0 && view.tick % policy_.swipe_interval_ticks == 0) {
        const double angle = rng_.uniform(0.0, 2.0 * std::numbers::pi);
        Swipe s;
        s.origin = {rng_.uniform(view.bounds.min.x, view.bounds.max.x), rng_.uniform(view.bounds.min.y, view.bounds.max.y)};
        s.direction = {std::cos(angle), std::sin(angle)};
        s.magnitude = rng_.uniform();
        out.push_back({view.tick, s});
      }
      break;
  }
  return out;
}

}  // namespace hsi
