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

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "hsi/geometry.hpp"
#include "hsi/rng.hpp"
#include "hsi/simulation.hpp"

// Freeze-probe situation-awareness assessment: query bank, ground truth,
// scoring and aggregation.
namespace hsi {

enum class SaLevel : std::uint8_t { L1 = 1, L2 = 2, L3 = 3 };
enum class QueryKind : std::uint8_t { MCQ, CMQ };

std::string_view level_name(SaLevel l) noexcept;
SaLevel parse_level(std::string_view s);
std::string_view query_kind_name(QueryKind k) noexcept;
QueryKind parse_query_kind(std::string_view s);

// Numeric MCQs split [lo, hi] into five equal bins; values outside clamp to
// the edge bins.
struct NumericBins {
  double lo = 0.0;
  double hi = 1.0;
  int bin_of(double v) const noexcept;
  std::vector<std::string> labels() const;
};

struct SagatQuery {
  std::string id;
  SaLevel level = SaLevel::L1;
  int dimension = 1;        // 1..6
  std::string requirement;  // "DimX.Y"
  QueryKind kind = QueryKind::MCQ;
  std::string prompt;
  std::string extractor;
  double horizon_s = 0.0;   // > 0 for L3
  int pause = 1;            // 1-based pause this query belongs to
  std::optional<NumericBins> bins;  // numeric MCQs only
};

// Every requirement of the goal-directed task analysis, in table order.
const std::vector<std::string>& gdta_requirements();

struct QueryBank {
  int version = 1;
  double near_radius_m = 2.0;     // "near the target"
  double stationary_speed = 0.1;  // m/s below which the swarm counts as stationary
  std::vector<SagatQuery> queries;

  // Queries for one pause, in bank order.
  std::vector<const SagatQuery*> for_pause(int pause) const;
  const SagatQuery* find(std::string_view id) const;
  int pause_count() const;
  void validate() const;
};

QueryBank default_query_bank();

// Substantive MCQ options (always five) for a query.
std::vector<std::string> mcq_options(const SagatQuery& q);

struct GroundTruth {
  QueryKind kind = QueryKind::MCQ;
  std::optional<int> correct_option;  // MCQ; empty when the quantity is undefined
  CellSet cells;                      // CMQ
  std::optional<double> value;        // numeric extractors
};

// L1/L2 truths read the frozen state; L3 truths roll an independent copy of
// it forward by the horizon with no operator input. `state` is never mutated.
GroundTruth extract_ground_truth(const SagatQuery& query, const Simulation& state, const QueryBank& bank);

struct IDontKnow {
  friend bool operator==(IDontKnow, IDontKnow) = default;
};
struct NotApplicable {
  friend bool operator==(NotApplicable, NotApplicable) = default;
};
using SagatAnswer = std::variant<int, IDontKnow, CellSet, NotApplicable>;

struct SagatResponse {
  std::string query_id;
  SagatAnswer answer;
  double latency_ms = 0.0;
};

enum class CmqRule : std::uint8_t { F1, ExactMatch };
enum class IdkMode : std::uint8_t { Zero, Exclude };

struct ScoringConfig {
  CmqRule cmq_rule = CmqRule::F1;
  IdkMode idk_mode = IdkMode::Zero;
  friend bool operator==(const ScoringConfig&, const ScoringConfig&) = default;
};

std::string_view cmq_rule_name(CmqRule r) noexcept;
CmqRule parse_cmq_rule(std::string_view s);
std::string_view idk_mode_name(IdkMode m) noexcept;
IdkMode parse_idk_mode(std::string_view s);

// 0..100, or nullopt when "I don't know" is excluded from means.
// MCQ: 100 for the correct option, else 0. CMQ with a non-empty truth:
// 100 * F1(marked, truth) (or all-or-nothing under ExactMatch); with an
// empty truth only Not applicable scores 100.
std::optional<double> score_response(const SagatQuery& query, const SagatAnswer& answer, const GroundTruth& truth,
                                     const ScoringConfig& config = {});

struct ScoredItem {
  std::string query_id;
  SaLevel level = SaLevel::L1;
  int dimension = 1;
  std::optional<double> score;
};

struct SagatReport {
  std::vector<ScoredItem> items;
  std::array<std::optional<double>, 3> level_means;
  std::array<std::optional<double>, 6> dimension_means;
  double overall = 0.0;
};

// Unweighted means per level, per dimension and overall. Throws DomainError
// when no item carries a score.
SagatReport aggregate_sagat(std::span<const ScoredItem> items);

struct PauseWindow {
  double lo_frac = 0.0;
  double hi_frac = 0.0;
};

struct PauseConfig {
  std::vector<PauseWindow> windows{{0.30, 0.45}, {0.65, 0.80}};
  double min_gap_s = 20.0;
};

// One pause per window, drawn uniformly in [lo, hi] * duration. Pauses stay
// min_gap_s away from each other and from the task end; throws ConfigError
// when that cannot be met.
std::vector<std::int64_t> schedule_pauses(double task_duration_s, double dt, const PauseConfig& config,
                                          RngStream& rng);

// Synthetic respondent for headless cohorts: answers correctly with a fixed
// probability, otherwise guesses, says "I don't know", or marks wrong cells.
class ScriptedRespondent {
 public:
  ScriptedRespondent(double correctness, RngStream rng);

  SagatResponse respond(const SagatQuery& query, const GroundTruth& truth, const GridWorld& world);
  // Ratings that rise with correctness for supply/understanding and fall for demand.
  std::array<int, 10> sart_ratings();
  double correctness() const noexcept { return correctness_; }

 private:
  double correctness_;
  RngStream rng_;
};

}  // namespace hsi
