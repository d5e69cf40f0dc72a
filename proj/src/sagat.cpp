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

#include "hsi/sagat.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>

#include "hsi/error.hpp"

namespace hsi {

namespace {

constexpr std::array<std::string_view, 5> kHeadings{"North", "East", "South", "West", "Stationary"};

enum class Category { Cells, Region, Heading, Numeric };

struct ExtractorInfo {
  Category category;
  bool projects;  // needs a forked rollout
};

const std::map<std::string, ExtractorInfo, std::less<>>& extractor_table() {
  static const std::map<std::string, ExtractorInfo, std::less<>> table{
      {"active_robot_cells", {Category::Cells, false}},
      {"target_cell", {Category::Cells, false}},
      {"target_region", {Category::Region, false}},
      {"remaining_time_s", {Category::Numeric, false}},
      {"hazard_cells", {Category::Cells, false}},
      {"marked_cells", {Category::Cells, false}},
      {"deactivated_robot_cells", {Category::Cells, false}},
      {"trapped_robot_cells", {Category::Cells, false}},
      {"centroid_distance_m", {Category::Numeric, false}},
      {"active_near_target_count", {Category::Numeric, false}},
      {"elapsed_time_s", {Category::Numeric, false}},
      {"active_majority_region", {Category::Region, false}},
      {"mean_speed", {Category::Numeric, false}},
      {"mean_heading", {Category::Heading, false}},
      {"active_dispersion_m", {Category::Numeric, false}},
      {"mean_target_distance_m", {Category::Numeric, false}},
      {"deactivated_majority_region_cells", {Category::Cells, false}},
      {"trapped_majority_region_cells", {Category::Cells, false}},
      {"hazard_cell_count", {Category::Numeric, false}},
      {"marked_cell_count", {Category::Numeric, false}},
      {"future_near_target_count", {Category::Numeric, true}},
      {"future_active_robot_cells", {Category::Cells, true}},
      {"future_centroid_distance_m", {Category::Numeric, true}},
      {"time_to_convergence_s", {Category::Numeric, true}},
      {"future_new_hazard_cells", {Category::Numeric, true}},
      {"removable_marked_count", {Category::Numeric, true}},
      {"future_deactivations", {Category::Numeric, true}},
      {"future_trapped_count", {Category::Numeric, true}},
  };
  return table;
}

const ExtractorInfo& extractor_info(std::string_view name) {
  const auto& t = extractor_table();
  auto it = t.find(name);
  if (it == t.end()) throw ConfigError("unknown ground-truth extractor '" + std::string(name) + "'");
  return it->second;
}

std::vector<const RobotState*> active_robots(const Simulation& s) {
  std::vector<const RobotState*> out;
  for (const RobotState& r : s.swarm()) {
    if (r.active()) out.push_back(&r);
  }
  return out;
}

int near_target_count(const Simulation& s, double radius) {
  int n = 0;
  for (const RobotState* r : active_robots(s)) {
    if (distance(r->position, s.world().target()) <= radius) ++n;
  }
  return n;
}

// Region holding the most of the given cells' robots; ties go to the earlier
// region in NW, NE, SW, SE, Center order.
std::optional<Region> majority_region(const GridWorld& world, const std::vector<Vec2>& positions) {
  if (positions.empty()) return std::nullopt;
  const RegionMap regions(world);
  std::array<int, 5> counts{};
  for (Vec2 p : positions) ++counts[static_cast<std::size_t>(regions.region_of(world.cell_of(p)))];
  std::size_t best = 0;
  for (std::size_t i = 1; i < counts.size(); ++i) {
    if (counts[i] > counts[best]) best = i;
  }
  return kAllRegions[best];
}

std::optional<double> numeric_now(std::string_view name, const Simulation& s, const QueryBank& bank) {
  const double dt = s.params().pso.dt;
  const auto active = active_robots(s);
  if (name == "remaining_time_s") return static_cast<double>(s.remaining_ticks()) * dt;
  if (name == "elapsed_time_s") return static_cast<double>(s.tick()) * dt;
  if (name == "active_near_target_count") return near_target_count(s, bank.near_radius_m);
  if (name == "hazard_cell_count") return static_cast<double>(s.hazards().active_cells().size());
  if (name == "marked_cell_count") return static_cast<double>(s.marked().size());
  if (active.empty()) return std::nullopt;
  if (name == "centroid_distance_m") return s.metrics().ca;
  if (name == "mean_speed" || name == "mean_target_distance_m" || name == "active_dispersion_m") {
    Vec2 centroid;
    double speed = 0.0, dist = 0.0;
    for (const RobotState* r : active) {
      centroid += r->position;
      speed += norm(r->velocity);
      dist += distance(r->position, s.world().target());
    }
    const double n = static_cast<double>(active.size());
    if (name == "mean_speed") return speed / n;
    if (name == "mean_target_distance_m") return dist / n;
    centroid *= 1.0 / n;
    double ss = 0.0;
    for (const RobotState* r : active) {
      const Vec2 d = r->position - centroid;
      ss += d.x * d.x + d.y * d.y;
    }
    return std::sqrt(ss / n);
  }
  throw ConfigError("extractor '" + std::string(name) + "' is not numeric");
}

CellSet cells_now(std::string_view name, const Simulation& s) {
  const GridWorld& world = s.world();
  CellSet out;
  auto robot_cells = [&](auto pred) {
    for (const RobotState& r : s.swarm()) {
      if (pred(r)) out.insert(world.cell_of(r.position));
    }
  };
  if (name == "active_robot_cells" || name == "future_active_robot_cells") {
    robot_cells([](const RobotState& r) { return r.active(); });
  } else if (name == "target_cell") {
    out.insert(world.cell_of(world.target()));
  } else if (name == "hazard_cells") {
    out = s.hazards().active_cells();
  } else if (name == "marked_cells") {
    out = s.marked();
  } else if (name == "deactivated_robot_cells") {
    robot_cells([](const RobotState& r) { return !r.active(); });
  } else if (name == "trapped_robot_cells") {
    const auto trapped = s.trapped();
    robot_cells([&](const RobotState& r) { return trapped.contains(r.id); });
  } else if (name == "deactivated_majority_region_cells" || name == "trapped_majority_region_cells") {
    const bool deact = name == "deactivated_majority_region_cells";
    const auto trapped = deact ? std::set<int>{} : s.trapped();
    std::vector<Vec2> positions;
    for (const RobotState& r : s.swarm()) {
      if (deact ? !r.active() : trapped.contains(r.id)) positions.push_back(r.position);
    }
    if (auto region = majority_region(world, positions)) {
      const RegionMap regions(world);
      const auto& cells = regions.cells(*region);
      out.insert(cells.begin(), cells.end());
    }
  } else {
    throw ConfigError("extractor '" + std::string(name) + "' is not a cell extractor");
  }
  return out;
}

std::optional<int> categorical_now(std::string_view name, const Simulation& s, const QueryBank& bank) {
  const GridWorld& world = s.world();
  if (name == "target_region") {
    return static_cast<int>(RegionMap(world).region_of(world.cell_of(world.target())));
  }
  const auto active = active_robots(s);
  if (name == "active_majority_region") {
    std::vector<Vec2> positions;
    for (const RobotState* r : active) positions.push_back(r->position);
    if (auto region = majority_region(world, positions)) return static_cast<int>(*region);
    return std::nullopt;
  }
  if (name == "mean_heading") {
    if (active.empty()) return std::nullopt;
    Vec2 v;
    for (const RobotState* r : active) v += r->velocity;
    v *= 1.0 / static_cast<double>(active.size());
    if (norm(v) < bank.stationary_speed) return 4;
    if (std::abs(v.y) >= std::abs(v.x)) return v.y >= 0.0 ? 0 : 2;
    return v.x >= 0.0 ? 1 : 3;
  }
  throw ConfigError("extractor '" + std::string(name) + "' is not categorical");
}

std::int64_t horizon_ticks(const SagatQuery& q, const Simulation& s) {
  const auto ticks = static_cast<std::int64_t>(std::llround(q.horizon_s / s.params().pso.dt));
  return std::max<std::int64_t>(0, std::min(ticks, s.remaining_ticks()));
}

}  // namespace

std::string_view level_name(SaLevel l) noexcept {
  switch (l) {
    case SaLevel::L1: return "L1";
    case SaLevel::L2: return "L2";
    case SaLevel::L3: return "L3";
  }
  return "?";
}

SaLevel parse_level(std::string_view s) {
  if (s == "L1") return SaLevel::L1;
  if (s == "L2") return SaLevel::L2;
  if (s == "L3") return SaLevel::L3;
  throw ConfigError("unknown SA level '" + std::string(s) + "'");
}

std::string_view query_kind_name(QueryKind k) noexcept { return k == QueryKind::MCQ ? "MCQ" : "CMQ"; }

QueryKind parse_query_kind(std::string_view s) {
  if (s == "MCQ") return QueryKind::MCQ;
  if (s == "CMQ") return QueryKind::CMQ;
  throw ConfigError("unknown query kind '" + std::string(s) + "'");
}

int NumericBins::bin_of(double v) const noexcept {
  const double width = (hi - lo) / 5.0;
  const auto b = static_cast<int>(std::floor((v - lo) / width));
  return std::clamp(b, 0, 4);
}

std::vector<std::string> NumericBins::labels() const {
  std::vector<std::string> out;
  const double width = (hi - lo) / 5.0;
  for (int i = 0; i < 5; ++i) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g to %g", lo + i * width, lo + (i + 1) * width);
    out.emplace_back(buf);
  }
  return out;
}

const std::vector<std::string>& gdta_requirements() {
  static const std::vector<std::string> reqs{
      "Dim1.1", "Dim1.2", "Dim1.3", "Dim1.4", "Dim1.5", "Dim1.6", "Dim2.1", "Dim2.2", "Dim2.3",
      "Dim2.4", "Dim2.5", "Dim2.6", "Dim3.1", "Dim3.2", "Dim3.3", "Dim4.1", "Dim4.2", "Dim4.3",
      "Dim4.4", "Dim5.1", "Dim5.2", "Dim5.3", "Dim6.1", "Dim6.2", "Dim6.3",
  };
  return reqs;
}

std::vector<const SagatQuery*> QueryBank::for_pause(int pause) const {
  std::vector<const SagatQuery*> out;
  for (const SagatQuery& q : queries) {
    if (q.pause == pause) out.push_back(&q);
  }
  return out;
}

const SagatQuery* QueryBank::find(std::string_view id) const {
  for (const SagatQuery& q : queries) {
    if (q.id == id) return &q;
  }
  return nullptr;
}

int QueryBank::pause_count() const {
  int n = 0;
  for (const SagatQuery& q : queries) n = std::max(n, q.pause);
  return n;
}

void QueryBank::validate() const {
  if (queries.empty()) throw ConfigError("query bank is empty");
  if (!(near_radius_m > 0.0) || !(stationary_speed >= 0.0)) throw ConfigError("query bank radii out of range");
  std::set<std::string, std::less<>> ids;
  for (const SagatQuery& q : queries) {
    const std::string where = "query " + q.id + ": ";
    if (!ids.insert(q.id).second) throw ConfigError(where + "duplicate id");
    if (q.dimension < 1 || q.dimension > 6) throw ConfigError(where + "dimension must be 1..6");
    if (q.pause < 1) throw ConfigError(where + "pause must be >= 1");
    if (q.requirement.rfind("Dim" + std::to_string(q.dimension) + ".", 0) != 0) {
      throw ConfigError(where + "requirement tag does not match dimension");
    }
    const ExtractorInfo& info = extractor_info(q.extractor);
    if (info.projects != (q.level == SaLevel::L3)) {
      throw ConfigError(where + "projection extractors belong to L3 and only L3");
    }
    if (q.level == SaLevel::L3 && !(q.horizon_s > 0.0)) throw ConfigError(where + "L3 needs horizon_s > 0");
    if ((info.category == Category::Cells) != (q.kind == QueryKind::CMQ)) {
      throw ConfigError(where + "cell extractors need CMQ, others MCQ");
    }
    if (info.category == Category::Numeric) {
      if (!q.bins || !(q.bins->hi > q.bins->lo)) throw ConfigError(where + "numeric MCQ needs a range lo < hi");
    }
  }
  for (int p = 1; p <= pause_count(); ++p) {
    if (for_pause(p).empty()) throw ConfigError("pause " + std::to_string(p) + " has no queries");
  }
}

QueryBank default_query_bank() {
  QueryBank bank;
  auto add = [&](std::string id, SaLevel level, std::string req, QueryKind kind, std::string extractor,
                 std::string prompt, int pause, std::optional<NumericBins> bins = std::nullopt, double horizon = 0.0) {
    SagatQuery q;
    q.id = std::move(id);
    q.level = level;
    q.requirement = req;
    q.dimension = req[3] - '0';
    q.kind = kind;
    q.extractor = std::move(extractor);
    q.prompt = std::move(prompt);
    q.pause = pause;
    q.bins = bins;
    q.horizon_s = horizon;
    bank.queries.push_back(std::move(q));
  };
  using enum SaLevel;
  using enum QueryKind;
  constexpr double h = 10.0;
  // Pause 1
  add("P1Q01", L1, "Dim1.1", CMQ, "active_robot_cells", "Mark every cell that contains an active robot.", 1);
  add("P1Q02", L1, "Dim1.2", MCQ, "target_region", "In which region is the target?", 1);
  add("P1Q03", L1, "Dim3.1", MCQ, "remaining_time_s", "How many seconds of the task remain?", 1, NumericBins{0, 300});
  add("P1Q04", L1, "Dim4.1", CMQ, "hazard_cells", "Mark every cell that is currently hazardous.", 1);
  add("P1Q05", L2, "Dim1.3", MCQ, "centroid_distance_m",
      "How far (m) is the centre of the active robots from the target?", 1, NumericBins{0, 20});
  add("P1Q06", L2, "Dim1.4", MCQ, "active_near_target_count", "How many active robots are near the target?", 1,
      NumericBins{0, 20});
  add("P1Q07", L2, "Dim1.5", MCQ, "active_majority_region", "In which region are most active robots?", 1);
  add("P1Q08", L2, "Dim2.1", MCQ, "mean_speed", "What is the average speed (m/s) of the active robots?", 1,
      NumericBins{0, 1.5});
  add("P1Q09", L2, "Dim2.2", MCQ, "mean_heading", "In which direction is the swarm mainly moving?", 1);
  add("P1Q10", L2, "Dim5.2", CMQ, "deactivated_majority_region_cells",
      "Mark the region where most deactivated robots are.", 1);
  add("P1Q11", L3, "Dim1.6", MCQ, "future_near_target_count",
      "How many active robots will be near the target in the next few seconds?", 1, NumericBins{0, 20}, h);
  add("P1Q12", L3, "Dim2.5", CMQ, "future_active_robot_cells",
      "Mark the cells the active robots will occupy in a few seconds.", 1, std::nullopt, h);
  add("P1Q13", L3, "Dim4.3", MCQ, "future_new_hazard_cells",
      "How many new hazardous cells might appear in the next few seconds?", 1, NumericBins{0, 10}, h);
  add("P1Q14", L3, "Dim5.3", MCQ, "future_deactivations",
      "How many robots could be deactivated in the next few seconds?", 1, NumericBins{0, 10}, h);
  // Pause 2
  add("P2Q01", L1, "Dim4.2", CMQ, "marked_cells", "Mark the regions you have drawn for the robots to avoid.", 2);
  add("P2Q02", L1, "Dim5.1", CMQ, "deactivated_robot_cells", "Mark every cell containing a deactivated robot.", 2);
  add("P2Q03", L1, "Dim6.1", CMQ, "trapped_robot_cells", "Mark every cell containing a trapped robot.", 2);
  add("P2Q04", L1, "Dim1.2", CMQ, "target_cell", "Mark the cell containing the target.", 2);
  add("P2Q05", L1, "Dim4.1", MCQ, "hazard_cell_count", "How many cells are currently hazardous?", 2,
      NumericBins{0, 40});
  add("P2Q06", L1, "Dim4.2", MCQ, "marked_cell_count", "How many cells have you marked to avoid?", 2,
      NumericBins{0, 20});
  add("P2Q07", L2, "Dim2.3", MCQ, "active_dispersion_m", "How widely (m, RMS) are the active robots spread out?", 2,
      NumericBins{0, 10});
  add("P2Q08", L2, "Dim2.4", MCQ, "mean_target_distance_m",
      "What is the average distance (m) of the active robots to the target?", 2, NumericBins{0, 20});
  add("P2Q09", L2, "Dim3.2", MCQ, "elapsed_time_s", "How many seconds have been spent on the task?", 2,
      NumericBins{0, 300});
  add("P2Q10", L2, "Dim6.2", CMQ, "trapped_majority_region_cells", "Mark the region where most trapped robots are.", 2);
  add("P2Q11", L3, "Dim2.6", MCQ, "future_centroid_distance_m",
      "How far (m) will the centre of the active robots be from the target in a few seconds?", 2, NumericBins{0, 20},
      h);
  add("P2Q12", L3, "Dim3.3", MCQ, "time_to_convergence_s",
      "How many seconds until half the active robots reach the target?", 2, NumericBins{0, 300}, 300.0);
  add("P2Q13", L3, "Dim4.4", MCQ, "removable_marked_count",
      "How many of your marked cells could be removed in the next few seconds?", 2, NumericBins{0, 10}, h);
  add("P2Q14", L3, "Dim6.3", MCQ, "future_trapped_count",
      "How many robots could get trapped in the next few seconds?", 2, NumericBins{0, 10}, h);
  return bank;
}

std::vector<std::string> mcq_options(const SagatQuery& q) {
  if (q.kind != QueryKind::MCQ) return {};
  switch (extractor_info(q.extractor).category) {
    case Category::Region: {
      std::vector<std::string> out;
      for (Region r : kAllRegions) out.emplace_back(region_name(r));
      return out;
    }
    case Category::Heading:
      return {kHeadings.begin(), kHeadings.end()};
    case Category::Numeric:
      return q.bins ? q.bins->labels() : std::vector<std::string>{};
    case Category::Cells:
      break;
  }
  return {};
}

GroundTruth extract_ground_truth(const SagatQuery& query, const Simulation& state, const QueryBank& bank) {
  const ExtractorInfo& info = extractor_info(query.extractor);
  GroundTruth truth;
  truth.kind = query.kind;

  auto from_state = [&](const Simulation& s) {
    switch (info.category) {
      case Category::Cells:
        truth.cells = cells_now(query.extractor, s);
        break;
      case Category::Region:
      case Category::Heading:
        truth.correct_option = categorical_now(query.extractor, s, bank);
        break;
      case Category::Numeric:
        break;
    }
  };
  auto set_numeric = [&](std::optional<double> v) {
    truth.value = v;
    if (v && query.bins) truth.correct_option = query.bins->bin_of(*v);
  };

  if (!info.projects) {
    from_state(state);
    if (info.category == Category::Numeric) set_numeric(numeric_now(query.extractor, state, bank));
    return truth;
  }

  Simulation fork = state;
  const std::int64_t steps = horizon_ticks(query, state);
  const std::string_view name = query.extractor;
  std::size_t new_hazard_cells = 0;
  std::size_t deactivations = 0;
  std::optional<double> converged_after;
  auto converged = [&](const Simulation& s) {
    const auto active = active_robots(s);
    if (active.empty()) return false;
    return 2 * near_target_count(s, bank.near_radius_m) >= static_cast<int>(active.size());
  };
  if (name == "time_to_convergence_s" && converged(fork)) converged_after = 0.0;
  for (std::int64_t i = 0; i < steps; ++i) {
    const TickOutput out = fork.advance({});
    for (const HazardEvent& ev : out.hazard_events) new_hazard_cells += ev.activated.size();
    deactivations += out.deactivated.size();
    if (name == "time_to_convergence_s" && !converged_after && converged(fork)) {
      converged_after = static_cast<double>(i + 1) * fork.params().pso.dt;
      break;
    }
  }

  if (name == "future_active_robot_cells") {
    truth.cells = cells_now(name, fork);
  } else if (name == "future_near_target_count") {
    set_numeric(near_target_count(fork, bank.near_radius_m));
  } else if (name == "future_centroid_distance_m") {
    set_numeric(numeric_now("centroid_distance_m", fork, bank));
  } else if (name == "time_to_convergence_s") {
    set_numeric(converged_after.value_or(static_cast<double>(steps) * state.params().pso.dt));
  } else if (name == "future_new_hazard_cells") {
    set_numeric(static_cast<double>(new_hazard_cells));
  } else if (name == "removable_marked_count") {
    std::size_t n = 0;
    for (CellIndex c : fork.marked()) {
      if (!fork.hazards().active_cells().contains(c)) ++n;
    }
    set_numeric(static_cast<double>(n));
  } else if (name == "future_deactivations") {
    set_numeric(static_cast<double>(deactivations));
  } else if (name == "future_trapped_count") {
    set_numeric(static_cast<double>(fork.trapped().size()));
  }
  return truth;
}

std::string_view cmq_rule_name(CmqRule r) noexcept { return r == CmqRule::F1 ? "f1" : "exact-match"; }

CmqRule parse_cmq_rule(std::string_view s) {
  if (s == "f1") return CmqRule::F1;
  if (s == "exact-match") return CmqRule::ExactMatch;
  throw ConfigError("unknown CMQ rule '" + std::string(s) + "'");
}

std::string_view idk_mode_name(IdkMode m) noexcept { return m == IdkMode::Zero ? "zero" : "exclude"; }

IdkMode parse_idk_mode(std::string_view s) {
  if (s == "zero") return IdkMode::Zero;
  if (s == "exclude") return IdkMode::Exclude;
  throw ConfigError("unknown I-don't-know mode '" + std::string(s) + "'");
}

std::optional<double> score_response(const SagatQuery& query, const SagatAnswer& answer, const GroundTruth& truth,
                                     const ScoringConfig& config) {
  if (query.kind != truth.kind) throw DomainError("ground truth kind does not match query " + query.id);
  if (query.kind == QueryKind::MCQ) {
    if (std::holds_alternative<IDontKnow>(answer)) {
      if (config.idk_mode == IdkMode::Exclude) return std::nullopt;
      return 0.0;
    }
    const int* option = std::get_if<int>(&answer);
    if (option == nullptr) throw DomainError("MCQ " + query.id + " needs an option or I don't know");
    if (*option < 0 || *option > 4) throw DomainError("MCQ option out of range for " + query.id);
    return truth.correct_option && *truth.correct_option == *option ? 100.0 : 0.0;
  }

  const bool na = std::holds_alternative<NotApplicable>(answer);
  const CellSet* marked = std::get_if<CellSet>(&answer);
  if (!na && marked == nullptr) throw DomainError("CMQ " + query.id + " needs marked cells or Not applicable");
  if (truth.cells.empty()) return na ? 100.0 : 0.0;
  if (na || marked->empty()) return 0.0;
  std::size_t hits = 0;
  for (CellIndex c : *marked) hits += truth.cells.contains(c) ? 1 : 0;
  if (config.cmq_rule == CmqRule::ExactMatch) return *marked == truth.cells ? 100.0 : 0.0;
  if (hits == 0) return 0.0;
  const double precision = static_cast<double>(hits) / static_cast<double>(marked->size());
  const double recall = static_cast<double>(hits) / static_cast<double>(truth.cells.size());
  return 100.0 * (2.0 * precision * recall / (precision + recall));
}

namespace {

// Mean over values summed in ascending order, so the result does not depend
// on input order.
std::optional<double> ordered_mean(std::vector<double> v) {
  if (v.empty()) return std::nullopt;
  std::sort(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

SagatReport aggregate_sagat(std::span<const ScoredItem> items) {
  SagatReport report;
  report.items.assign(items.begin(), items.end());
  std::vector<double> all;
  std::array<std::vector<double>, 3> by_level;
  std::array<std::vector<double>, 6> by_dim;
  for (const ScoredItem& it : items) {
    if (it.dimension < 1 || it.dimension > 6) throw DomainError("dimension out of range in " + it.query_id);
    if (!it.score) continue;
    if (*it.score < 0.0 || *it.score > 100.0) throw DomainError("score out of range in " + it.query_id);
    all.push_back(*it.score);
    by_level[static_cast<std::size_t>(it.level) - 1].push_back(*it.score);
    by_dim[static_cast<std::size_t>(it.dimension) - 1].push_back(*it.score);
  }
  auto overall = ordered_mean(all);
  if (!overall) throw DomainError("SAGAT aggregation needs at least one scored response");
  report.overall = *overall;
  for (std::size_t i = 0; i < 3; ++i) report.level_means[i] = ordered_mean(by_level[i]);
  for (std::size_t i = 0; i < 6; ++i) report.dimension_means[i] = ordered_mean(by_dim[i]);
  return report;
}

std::vector<std::int64_t> schedule_pauses(double task_duration_s, double dt, const PauseConfig& config,
                                          RngStream& rng) {
  if (!(task_duration_s > 0.0) || !(dt > 0.0)) throw ConfigError("pause schedule needs positive duration and dt");
  if (config.windows.empty()) throw ConfigError("pause schedule needs at least one window");
  for (const PauseWindow& w : config.windows) {
    if (!(w.lo_frac >= 0.0 && w.lo_frac <= w.hi_frac && w.hi_frac <= 1.0)) {
      throw ConfigError("pause window fractions must satisfy 0 <= lo <= hi <= 1");
    }
  }
  constexpr int kAttempts = 1000;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    std::vector<double> times;
    for (const PauseWindow& w : config.windows) {
      times.push_back(rng.uniform(w.lo_frac, w.hi_frac) * task_duration_s);
    }
    std::vector<double> sorted = times;
    std::sort(sorted.begin(), sorted.end());
    bool ok = sorted.front() >= dt && task_duration_s - sorted.back() >= config.min_gap_s;
    for (std::size_t i = 1; ok && i < sorted.size(); ++i) ok = sorted[i] - sorted[i - 1] >= config.min_gap_s;
    if (!ok) continue;
    std::vector<std::int64_t> ticks;
    for (double t : sorted) ticks.push_back(static_cast<std::int64_t>(std::llround(t / dt)));
    return ticks;
  }
  throw ConfigError("pause windows cannot satisfy the minimum gap constraints");
}

ScriptedRespondent::ScriptedRespondent(double correctness, RngStream rng) : correctness_(correctness), rng_(rng) {
  if (!(correctness >= 0.0 && correctness <= 1.0)) throw ConfigError("respondent correctness must be in [0, 1]");
}

SagatResponse ScriptedRespondent::respond(const SagatQuery& query, const GroundTruth& truth, const GridWorld& world) {
  SagatResponse r;
  r.query_id = query.id;
  r.latency_ms = std::round(1500.0 + 3000.0 * rng_.uniform());
  const bool correct = rng_.uniform() < correctness_;
  if (query.kind == QueryKind::MCQ) {
    if (correct && truth.correct_option) {
      r.answer = *truth.correct_option;
    } else if (correct || rng_.uniform() < 0.25) {
      r.answer = IDontKnow{};
    } else {
      int wrong = static_cast<int>(rng_.below(4));
      if (truth.correct_option && wrong >= *truth.correct_option) ++wrong;
      r.answer = wrong;
    }
    return r;
  }
  if (correct) {
    r.answer = truth.cells.empty() ? SagatAnswer{NotApplicable{}} : SagatAnswer{truth.cells};
    return r;
  }
  CellSet guess;
  for (CellIndex c : truth.cells) {
    if (rng_.uniform() < 0.3) guess.insert(c);
  }
  const auto extra = 1 + rng_.below(2);
  for (std::uint64_t i = 0; i < extra; ++i) {
    guess.insert({static_cast<int>(rng_.below(static_cast<std::uint64_t>(world.width()))),
                  static_cast<int>(rng_.below(static_cast<std::uint64_t>(world.height())))});
  }
  r.answer = guess;
  return r;
}

std::array<int, 10> ScriptedRespondent::sart_ratings() {
  std::array<int, 10> out{};
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double base = i < 3 ? 7.0 - 6.0 * correctness_ : 1.0 + 6.0 * correctness_;
    const double noisy = base + (rng_.uniform() - 0.5) * 2.0;
    out[i] = std::clamp(static_cast<int>(std::lround(noisy)), 1, 7);
  }
  return out;
}

}  // namespace hsi
