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
#include <filesystem>
#include <optional>
#include <string>

#include "hsi/sagat.hpp"
#include "hsi/serialize.hpp"
#include "hsi/simulation.hpp"
#include "hsi/world.hpp"

namespace hsi {

enum class Attempt : std::uint8_t { A1, A2 };
std::string_view attempt_name(Attempt a) noexcept;
Attempt parse_attempt(std::string_view s);

// Hazard timing in seconds; converted to ticks with the session dt.
struct HazardTiming {
  double dis_interval_s = 15.0;
  int dis_cells_per_event = 3;
  double dis_duration_s = 30.0;  // <= 0 disables expiry
  int mov_footprint_size = 4;
  double mov_step_interval_s = 5.0;
  WalkPolicy mov_walk_policy = WalkPolicy::RandomWalk;
  int mov_patrol_leg_steps = 5;
  std::optional<CellIndex> spr_origin;
  double spr_spread_interval_s = 10.0;
  double spr_spread_probability = 0.35;
  int connectivity = 4;
  double alert_latency_s = 0.0;
  std::optional<AlertTheme> theme;  // defaults by hazard kind

  HazardParams to_params(HazardKind kind, double dt) const;
};

struct MetricsConfig {
  int decimation_ticks = 10;
  NaqMode naq_mode = NaqMode::PrefixMean;
};

struct SessionConfig {
  std::uint64_t seed = 1;
  double task_duration_s = 300.0;
  HazardKind hazard_kind = HazardKind::Spr;
  Attempt attempt = Attempt::A1;
  std::string participant_id = "P01";
  int task_order_index = 0;

  WorldConfig world;
  PsoParams pso;
  SwipeParams swipe;
  HazardTiming hazard;
  PauseConfig pauses;
  ScoringConfig scoring;
  MetricsConfig metrics;
  ScriptedOperatorPolicy policy;
  double respondent_correctness = 0.7;
  QueryBank bank = default_query_bank();

  int state_hash_interval_ticks = 50;
  int snapshot_interval_ticks = 10;

  std::int64_t total_ticks() const;
  SimParams sim_params() const;
  void validate() const;
};

// Canonical form: every field written, query bank embedded.
Json config_to_json(const SessionConfig& c);
// Missing fields take defaults; unknown keys are rejected. "query_bank" may be
// "default", a file path (relative to `base_dir`) or an inline bank object.
SessionConfig config_from_json(const Json& j, const std::filesystem::path& base_dir = {});
SessionConfig load_config(const std::filesystem::path& path);

// Scoring section on its own, for rescoring with a different rubric.
ScoringConfig scoring_from_json(const Json& j);
Json scoring_to_json(const ScoringConfig& s);
ScoringConfig load_scoring(const std::filesystem::path& path);

QueryBank load_query_bank(const std::filesystem::path& path);

}  // namespace hsi
