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

#include "hsi/hazards.hpp"

#include <algorithm>
#include <array>
#include <iterator>

#include "hsi/error.hpp"

namespace hsi {

namespace {

constexpr std::array<std::array<int, 2>, 8> kDirections{{
    {0, 1}, {1, 0}, {0, -1}, {-1, 0},  // N E S W
    {1, 1}, {1, -1}, {-1, -1}, {-1, 1},
}};
// Patrol legs run E, N, W, S.
constexpr std::array<int, 4> kPatrolLegs{1, 0, 3, 2};

std::string format_cells(const std::vector<CellIndex>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ", ";
    out += "(" + std::to_string(cells[i].col) + "," + std::to_string(cells[i].row) + ")";
  }
  return out;
}

}  // namespace

std::string_view hazard_kind_name(HazardKind k) noexcept {
  switch (k) {
    case HazardKind::Dis: return "Dis";
    case HazardKind::Mov: return "Mov";
    case HazardKind::Spr: return "Spr";
  }
  return "?";
}

HazardKind parse_hazard_kind(std::string_view s) {
  if (s == "Dis" || s == "dis") return HazardKind::Dis;
  if (s == "Mov" || s == "mov") return HazardKind::Mov;
  if (s == "Spr" || s == "spr") return HazardKind::Spr;
  throw ConfigError("unknown hazard kind '" + std::string(s) + "'");
}

std::string_view walk_policy_name(WalkPolicy p) noexcept {
  return p == WalkPolicy::RandomWalk ? "random-walk" : "patrol-cycle";
}

WalkPolicy parse_walk_policy(std::string_view s) {
  if (s == "random-walk") return WalkPolicy::RandomWalk;
  if (s == "patrol-cycle") return WalkPolicy::PatrolCycle;
  throw ConfigError("unknown walk policy '" + std::string(s) + "'");
}

std::string_view theme_name(AlertTheme t) noexcept {
  switch (t) {
    case AlertTheme::Fire: return "fire";
    case AlertTheme::FallingObjects: return "falling-objects";
    case AlertTheme::Wind: return "wind";
    case AlertTheme::Rockfall: return "rockfall";
  }
  return "?";
}

AlertTheme parse_theme(std::string_view s) {
  if (s == "fire") return AlertTheme::Fire;
  if (s == "falling-objects") return AlertTheme::FallingObjects;
  if (s == "wind") return AlertTheme::Wind;
  if (s == "rockfall") return AlertTheme::Rockfall;
  throw ConfigError("unknown alert theme '" + std::string(s) + "'");
}

AlertTheme default_theme(HazardKind k) noexcept {
  switch (k) {
    case HazardKind::Dis: return AlertTheme::Wind;
    case HazardKind::Mov: return AlertTheme::FallingObjects;
    case HazardKind::Spr: return AlertTheme::Fire;
  }
  return AlertTheme::Fire;
}

void HazardParams::validate() const {
  if (dis_interval_ticks < 1 || mov_step_interval_ticks < 1 || spr_spread_interval_ticks < 1) {
    throw ConfigError("hazard intervals must be >= 1 tick");
  }
  if (dis_duration_ticks < 1) throw ConfigError("hazard dis duration must be >= 1 tick");
  if (dis_cells_per_event < 0 || mov_footprint_size < 1 || mov_patrol_leg_steps < 1) {
    throw ConfigError("hazard cell counts out of range");
  }
  if (!(spr_spread_probability >= 0.0 && spr_spread_probability <= 1.0)) {
    throw ConfigError("hazard spread probability must be in [0, 1]");
  }
  if (connectivity != 4 && connectivity != 8) throw ConfigError("hazard connectivity must be 4 or 8");
  if (alert_latency_ticks < 0) throw ConfigError("alert latency must be >= 0");
}

AlertMessage render_alert(const HazardEvent& event, AlertTheme theme) {
  if (event.activated.empty()) throw DomainError("alert requires at least one new hazardous cell");
  std::string noun;
  switch (theme) {
    case AlertTheme::Fire: noun = "Fire"; break;
    case AlertTheme::FallingObjects: noun = "Falling objects"; break;
    case AlertTheme::Wind: noun = "Strong winds"; break;
    case AlertTheme::Rockfall: noun = "Rockfall"; break;
  }
  std::string verb;
  switch (event.kind) {
    case HazardKind::Spr: verb = " reported spreading at "; break;
    case HazardKind::Mov: verb = " reported moving to "; break;
    case HazardKind::Dis: verb = " reported at "; break;
  }
  std::vector<CellIndex> cells = event.activated;
  std::sort(cells.begin(), cells.end());
  AlertMessage msg;
  msg.tick = event.tick;
  msg.kind = event.kind;
  msg.text = noun + verb + (cells.size() == 1 ? "cell " : "cells ") + format_cells(cells);
  msg.cells = std::move(cells);
  return msg;
}

HazardField HazardField::create(HazardKind kind, const HazardParams& params, const GridWorld& world, RngStream rng,
                                const SpawnArea& avoid) {
  params.validate();
  HazardField f(kind, params, rng);
  f.initial_.tick = 0;
  f.initial_.kind = kind;

  auto free_cells = [&]() {
    std::vector<CellIndex> cells;
    for (int row = 0; row < world.height(); ++row) {
      for (int col = 0; col < world.width(); ++col) {
        const CellIndex c{col, row};
        if (!world.is_obstacle(c) && !avoid.contains(c)) cells.push_back(c);
      }
    }
    return cells;
  };

  if (kind == HazardKind::Spr) {
    CellIndex origin;
    if (params.spr_origin) {
      origin = *params.spr_origin;
      if (!world.valid(origin) || world.is_obstacle(origin)) {
        throw ConfigError("spreading hazard origin must be a free in-grid cell");
      }
    } else {
      const auto cells = free_cells();
      if (cells.empty()) throw ConfigError("no free cell for the spreading hazard origin");
      origin = cells[f.rng_.below(cells.size())];
    }
    f.active_.insert(origin);
    f.initial_.activated.push_back(origin);
  } else if (kind == HazardKind::Mov) {
    const auto cells = free_cells();
    if (cells.empty()) throw ConfigError("no free cell for the moving hazard");
    // Grow a connected footprint by picking random frontier cells; a start
    // boxed in by obstacles or the spawn block is redrawn.
    CellSet blob;
    for (int attempt = 0; attempt < 64 && static_cast<int>(blob.size()) < params.mov_footprint_size; ++attempt) {
      blob = {cells[f.rng_.below(cells.size())]};
      while (static_cast<int>(blob.size()) < params.mov_footprint_size) {
        CellSet frontier;
        for (CellIndex c : blob) {
          for (CellIndex nb : world.neighbors(c, 4)) {
            if (!world.is_obstacle(nb) && !avoid.contains(nb) && !blob.contains(nb)) frontier.insert(nb);
          }
        }
        if (frontier.empty()) break;
        auto it = frontier.begin();
        std::advance(it, static_cast<long>(f.rng_.below(frontier.size())));
        blob.insert(*it);
      }
    }
    f.mov_footprint_.assign(blob.begin(), blob.end());
    f.active_ = blob;
    f.initial_.activated = f.mov_footprint_;
    f.mov_heading_ = params.mov_walk_policy == WalkPolicy::PatrolCycle ? kPatrolLegs[0] : 0;
  }
  if (!f.initial_.activated.empty()) f.enqueue_alert(f.initial_);
  return f;
}

void HazardField::enqueue_alert(const HazardEvent& ev) {
  if (ev.activated.empty()) return;
  AlertMessage msg = render_alert(ev, params_.theme);
  msg.tick = ev.tick + params_.alert_latency_ticks;
  pending_.push_back(std::move(msg));
}

std::vector<AlertMessage> HazardField::take_initial_alerts() {
  std::vector<AlertMessage> due;
  while (!pending_.empty() && pending_.front().tick <= 0) {
    due.push_back(std::move(pending_.front()));
    pending_.pop_front();
  }
  return due;
}

HazardStepResult HazardField::step(std::int64_t tick, const GridWorld& world) {
  if (tick <= last_tick_) throw DomainError("hazard ticks must be strictly increasing");
  last_tick_ = tick;
  HazardStepResult out;
  switch (kind_) {
    case HazardKind::Dis: step_dis(tick, world, out); break;
    case HazardKind::Mov: step_mov(tick, world, out); break;
    case HazardKind::Spr: step_spr(tick, world, out); break;
  }
  for (const auto& ev : out.events) enqueue_alert(ev);
  while (!pending_.empty() && pending_.front().tick <= tick) {
    out.alerts.push_back(std::move(pending_.front()));
    pending_.pop_front();
  }
  return out;
}

void HazardField::step_dis(std::int64_t tick, const GridWorld& world, HazardStepResult& out) {
  HazardEvent ev;
  ev.tick = tick;
  ev.kind = HazardKind::Dis;
  for (auto it = dis_expiry_.begin(); it != dis_expiry_.end();) {
    if (it->second <= tick) {
      ev.cleared.push_back(it->first);
      active_.erase(it->first);
      it = dis_expiry_.erase(it);
    } else {
      ++it;
    }
  }
  if (tick % params_.dis_interval_ticks == 0 && params_.dis_cells_per_event > 0) {
    std::vector<CellIndex> eligible;
    for (int row = 0; row < world.height(); ++row) {
      for (int col = 0; col < world.width(); ++col) {
        const CellIndex c{col, row};
        if (!world.is_obstacle(c) && !active_.contains(c)) eligible.push_back(c);
      }
    }
    const auto n = std::min(eligible.size(), static_cast<std::size_t>(params_.dis_cells_per_event));
    if (n == 0) ev.exhausted = true;
    const std::int64_t expiry =
        params_.dis_duration_ticks == kNeverExpires ? kNeverExpires : tick + params_.dis_duration_ticks;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = i + rng_.below(eligible.size() - i);
      std::swap(eligible[i], eligible[j]);
      active_.insert(eligible[i]);
      dis_expiry_[eligible[i]] = expiry;
      ev.activated.push_back(eligible[i]);
    }
  }
  if (!ev.activated.empty() || !ev.cleared.empty() || ev.exhausted) out.events.push_back(std::move(ev));
}

void HazardField::step_mov(std::int64_t tick, const GridWorld& world, HazardStepResult& out) {
  if (tick % params_.mov_step_interval_ticks != 0 || mov_footprint_.empty()) return;
  const int ndirs = params_.connectivity == 8 ? 8 : 4;

  auto shifted = [&](int dir, std::vector<CellIndex>& moved) {
    moved.clear();
    for (CellIndex c : mov_footprint_) {
      const CellIndex n{c.col + kDirections[static_cast<std::size_t>(dir)][0],
                        c.row + kDirections[static_cast<std::size_t>(dir)][1]};
      if (!world.valid(n) || world.is_obstacle(n)) return false;
      moved.push_back(n);
    }
    return true;
  };

  std::vector<CellIndex> moved;
  bool ok = false;
  if (params_.mov_walk_policy == WalkPolicy::RandomWalk) {
    std::vector<int> candidates(static_cast<std::size_t>(ndirs));
    for (int i = 0; i < ndirs; ++i) candidates[static_cast<std::size_t>(i)] = i;
    while (!candidates.empty()) {
      const std::size_t pick = rng_.below(candidates.size());
      const int dir = candidates[pick];
      if (shifted(dir, moved)) {
        mov_heading_ = dir;
        ok = true;
        break;
      }
      candidates.erase(candidates.begin() + static_cast<long>(pick));
    }
  } else {
    for (int attempt = 0; attempt < 4 && !ok; ++attempt) {
      if (shifted(mov_heading_, moved)) {
        ok = true;
        if (++mov_leg_progress_ >= params_.mov_patrol_leg_steps) {
          mov_leg_progress_ = 0;
          const auto leg = std::find(kPatrolLegs.begin(), kPatrolLegs.end(), mov_heading_) - kPatrolLegs.begin();
          mov_heading_ = kPatrolLegs[static_cast<std::size_t>((leg + 1) % 4)];
        }
      } else {
        mov_leg_progress_ = 0;
        const auto leg = std::find(kPatrolLegs.begin(), kPatrolLegs.end(), mov_heading_) - kPatrolLegs.begin();
        mov_heading_ = kPatrolLegs[static_cast<std::size_t>((leg + 1) % 4)];
      }
    }
  }
  if (!ok) return;  // boxed in: the footprint stays put

  CellSet next(moved.begin(), moved.end());
  HazardEvent ev;
  ev.tick = tick;
  ev.kind = HazardKind::Mov;
  std::set_difference(next.begin(), next.end(), active_.begin(), active_.end(), std::back_inserter(ev.activated));
  std::set_difference(active_.begin(), active_.end(), next.begin(), next.end(), std::back_inserter(ev.cleared));
  mov_footprint_ = std::move(moved);
  active_ = std::move(next);
  out.events.push_back(std::move(ev));
}

void HazardField::step_spr(std::int64_t tick, const GridWorld& world, HazardStepResult& out) {
  if (tick % params_.spr_spread_interval_ticks != 0) return;
  CellSet frontier;
  for (CellIndex c : active_) {
    for (CellIndex nb : world.neighbors(c, params_.connectivity)) {
      if (!world.is_obstacle(nb) && !active_.contains(nb)) frontier.insert(nb);
    }
  }
  HazardEvent ev;
  ev.tick = tick;
  ev.kind = HazardKind::Spr;
  for (CellIndex c : frontier) {
    if (rng_.uniform() < params_.spr_spread_probability) ev.activated.push_back(c);
  }
  if (ev.activated.empty()) return;
  active_.insert(ev.activated.begin(), ev.activated.end());
  out.events.push_back(std::move(ev));
}

}  // namespace hsi
