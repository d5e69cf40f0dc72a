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

#include "hsi/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "hsi/error.hpp"

namespace hsi {

namespace {

// Reads keys from one JSON object section, rejecting any key never read.
class Section {
 public:
  Section(const Json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) throw ConfigError("section '" + name_ + "' must be an object");
  }

  template <class T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError(where(key) + " has the wrong type");
    }
  }

  template <class E>
  void read_enum(const char* key, E& out, E (*parse)(std::string_view)) {
    std::string s;
    read(key, s);
    if (!s.empty()) out = parse(s);
  }

  const Json* child(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.contains(k)) throw ConfigError("unknown key '" + k + "' in section '" + name_ + "'");
    }
  }

  std::string where(const char* key) const { return "'" + name_ + "." + key + "'"; }

 private:
  const Json& j_;
  std::string name_;
  std::set<std::string, std::less<>> seen_;
};

std::int64_t to_ticks(double seconds, double dt) { return static_cast<std::int64_t>(std::llround(seconds / dt)); }

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

}  // namespace

std::string_view attempt_name(Attempt a) noexcept { return a == Attempt::A1 ? "A1" : "A2"; }

Attempt parse_attempt(std::string_view s) {
  if (s == "A1") return Attempt::A1;
  if (s == "A2") return Attempt::A2;
  throw ConfigError("attempt must be A1 or A2, got '" + std::string(s) + "'");
}

HazardParams HazardTiming::to_params(HazardKind kind, double dt) const {
  HazardParams p;
  p.dis_interval_ticks = to_ticks(dis_interval_s, dt);
  p.dis_cells_per_event = dis_cells_per_event;
  p.dis_duration_ticks = dis_duration_s > 0.0 ? to_ticks(dis_duration_s, dt) : kNeverExpires;
  p.mov_footprint_size = mov_footprint_size;
  p.mov_step_interval_ticks = to_ticks(mov_step_interval_s, dt);
  p.mov_walk_policy = mov_walk_policy;
  p.mov_patrol_leg_steps = mov_patrol_leg_steps;
  p.spr_origin = spr_origin;
  p.spr_spread_interval_ticks = to_ticks(spr_spread_interval_s, dt);
  p.spr_spread_probability = spr_spread_probability;
  p.connectivity = connectivity;
  p.alert_latency_ticks = to_ticks(alert_latency_s, dt);
  p.theme = theme.value_or(default_theme(kind));
  return p;
}

std::int64_t SessionConfig::total_ticks() const { return to_ticks(task_duration_s, pso.dt); }

SimParams SessionConfig::sim_params() const {
  SimParams p;
  p.pso = pso;
  p.swipe = swipe;
  p.naq_mode = metrics.naq_mode;
  p.total_ticks = total_ticks();
  return p;
}

void SessionConfig::validate() const {
  if (!(task_duration_s > 0.0)) throw ConfigError("task_duration_s must be > 0");
  pso.validate();
  const double ticks = task_duration_s / pso.dt;
  if (std::abs(ticks - std::round(ticks)) > 1e-9 * std::max(1.0, ticks)) {
    throw ConfigError("task_duration_s must be a whole number of ticks");
  }
  hazard.to_params(hazard_kind, pso.dt).validate();
  if (hazard.dis_duration_s > 0.0 && to_ticks(hazard.dis_duration_s, pso.dt) < 1) {
    throw ConfigError("hazard.dis_duration_s rounds to zero ticks");
  }
  policy.validate();
  if (!(respondent_correctness >= 0.0 && respondent_correctness <= 1.0)) {
    throw ConfigError("respondent.correctness must be in [0, 1]");
  }
  if (!(swipe.radius > 0.0) || !(swipe.k_impulse >= 0.0)) throw ConfigError("swipe parameters out of range");
  if (metrics.decimation_ticks < 1) throw ConfigError("metrics.decimation_ticks must be >= 1");
  if (state_hash_interval_ticks < 1) throw ConfigError("state_hash_interval_ticks must be >= 1");
  if (snapshot_interval_ticks < 1) throw ConfigError("snapshot_interval_ticks must be >= 1");
  if (task_order_index < 0) throw ConfigError("task_order_index must be >= 0");
  bank.validate();
  if (static_cast<std::size_t>(bank.pause_count()) != pauses.windows.size()) {
    throw ConfigError("query bank pause count does not match the number of pause windows");
  }
}

Json config_to_json(const SessionConfig& c) {
  const WorldConfig& w = c.world;
  Json world{{"width", w.width},
             {"height", w.height},
             {"cell_size", w.cell_size},
             {"obstacle_fraction", w.obstacle_fraction},
             {"spawn_extent", w.spawn_extent}};
  world["target"] = w.has_fixed_target ? to_json(w.fixed_target) : Json(nullptr);
  Json obstacles = Json::array();
  for (CellIndex o : w.fixed_obstacles) obstacles.push_back(to_json(o));
  world["obstacles"] = obstacles;

  const PsoParams& p = c.pso;
  Json swarm{{"n_robots", p.n_robots},
             {"w", p.w},
             {"c1", p.c1},
             {"c2", p.c2},
             {"vmax", p.vmax},
             {"comm_range", p.comm_range},
             {"dt", p.dt},
             {"pso_period_ticks", p.pso_period_ticks},
             {"power", p.power},
             {"d_min", p.d_min},
             {"trapped_window_ticks", p.trapped_window_ticks},
             {"trapped_epsilon", p.trapped_epsilon}};

  const HazardTiming& h = c.hazard;
  Json hazard{{"dis_interval_s", h.dis_interval_s},
              {"dis_cells_per_event", h.dis_cells_per_event},
              {"dis_duration_s", h.dis_duration_s},
              {"mov_footprint_size", h.mov_footprint_size},
              {"mov_step_interval_s", h.mov_step_interval_s},
              {"mov_walk_policy", walk_policy_name(h.mov_walk_policy)},
              {"mov_patrol_leg_steps", h.mov_patrol_leg_steps},
              {"spr_spread_interval_s", h.spr_spread_interval_s},
              {"spr_spread_probability", h.spr_spread_probability},
              {"connectivity", h.connectivity},
              {"alert_latency_s", h.alert_latency_s}};
  hazard["spr_origin"] = h.spr_origin ? to_json(*h.spr_origin) : Json(nullptr);
  hazard["theme"] = h.theme ? Json(theme_name(*h.theme)) : Json(nullptr);

  Json windows = Json::array();
  for (const PauseWindow& pw : c.pauses.windows) windows.push_back(Json::array({pw.lo_frac, pw.hi_frac}));

  return {{"seed", c.seed},
          {"task_duration_s", c.task_duration_s},
          {"hazard_kind", hazard_kind_name(c.hazard_kind)},
          {"attempt", attempt_name(c.attempt)},
          {"participant_id", c.participant_id},
          {"task_order_index", c.task_order_index},
          {"world", world},
          {"swarm", swarm},
          {"hazard", hazard},
          {"pauses", {{"windows", windows}, {"min_gap_s", c.pauses.min_gap_s}}},
          {"scoring", scoring_to_json(c.scoring)},
          {"metrics", {{"decimation_ticks", c.metrics.decimation_ticks},
                       {"naq_mode", naq_mode_name(c.metrics.naq_mode)}}},
          {"swipe", {{"radius", c.swipe.radius}, {"k_impulse", c.swipe.k_impulse}}},
          {"operator", {{"policy", policy_name(c.policy.kind)},
                        {"accuracy", c.policy.accuracy},
                        {"delay_ticks", c.policy.delay_ticks},
                        {"swipe_interval_ticks", c.policy.swipe_interval_ticks}}},
          {"respondent", {{"correctness", c.respondent_correctness}}},
          {"query_bank", to_json(c.bank)},
          {"state_hash_interval_ticks", c.state_hash_interval_ticks},
          {"snapshot_interval_ticks", c.snapshot_interval_ticks}};
}

ScoringConfig scoring_from_json(const Json& j) {
  ScoringConfig s;
  Section sec(j, "scoring");
  sec.read_enum("cmq_rule", s.cmq_rule, parse_cmq_rule);
  sec.read_enum("idk_mode", s.idk_mode, parse_idk_mode);
  sec.finish();
  return s;
}

Json scoring_to_json(const ScoringConfig& s) {
  return {{"cmq_rule", cmq_rule_name(s.cmq_rule)}, {"idk_mode", idk_mode_name(s.idk_mode)}};
}

namespace {

SessionConfig parse_config(const Json& j, const std::filesystem::path& base_dir) {
  SessionConfig c;
  Section top(j, "config");
  top.read("seed", c.seed);
  top.read("task_duration_s", c.task_duration_s);
  top.read_enum("hazard_kind", c.hazard_kind, parse_hazard_kind);
  top.read_enum("attempt", c.attempt, parse_attempt);
  top.read("participant_id", c.participant_id);
  top.read("task_order_index", c.task_order_index);
  top.read("state_hash_interval_ticks", c.state_hash_interval_ticks);
  top.read("snapshot_interval_ticks", c.snapshot_interval_ticks);

  if (const Json* s = top.child("world")) {
    Section sec(*s, "world");
    WorldConfig& w = c.world;
    sec.read("width", w.width);
    sec.read("height", w.height);
    sec.read("cell_size", w.cell_size);
    sec.read("obstacle_fraction", w.obstacle_fraction);
    sec.read("spawn_extent", w.spawn_extent);
    if (const Json* t = sec.child("target"); t && !t->is_null()) {
      w.has_fixed_target = true;
      w.fixed_target = vec_from_json(*t);
    }
    if (const Json* o = sec.child("obstacles")) {
      if (!o->is_array()) throw ConfigError("'world.obstacles' must be an array");
      for (const Json& cell : *o) w.fixed_obstacles.push_back(cell_from_json(cell));
    }
    sec.finish();
  }
  if (const Json* s = top.child("swarm")) {
    Section sec(*s, "swarm");
    PsoParams& p = c.pso;
    sec.read("n_robots", p.n_robots);
    sec.read("w", p.w);
    sec.read("c1", p.c1);
    sec.read("c2", p.c2);
    sec.read("vmax", p.vmax);
    sec.read("comm_range", p.comm_range);
    sec.read("dt", p.dt);
    sec.read("pso_period_ticks", p.pso_period_ticks);
    sec.read("power", p.power);
    sec.read("d_min", p.d_min);
    sec.read("trapped_window_ticks", p.trapped_window_ticks);
    sec.read("trapped_epsilon", p.trapped_epsilon);
    sec.finish();
  }
  if (const Json* s = top.child("hazard")) {
    Section sec(*s, "hazard");
    HazardTiming& h = c.hazard;
    sec.read("dis_interval_s", h.dis_interval_s);
    sec.read("dis_cells_per_event", h.dis_cells_per_event);
    sec.read("dis_duration_s", h.dis_duration_s);
    sec.read("mov_footprint_size", h.mov_footprint_size);
    sec.read("mov_step_interval_s", h.mov_step_interval_s);
    sec.read_enum("mov_walk_policy", h.mov_walk_policy, parse_walk_policy);
    sec.read("mov_patrol_leg_steps", h.mov_patrol_leg_steps);
    sec.read("spr_spread_interval_s", h.spr_spread_interval_s);
    sec.read("spr_spread_probability", h.spr_spread_probability);
    sec.read("connectivity", h.connectivity);
    sec.read("alert_latency_s", h.alert_latency_s);
    if (const Json* o = sec.child("spr_origin"); o && !o->is_null()) h.spr_origin = cell_from_json(*o);
    if (const Json* t = sec.child("theme"); t && !t->is_null()) {
      if (!t->is_string()) throw ConfigError("'hazard.theme' must be a string");
      h.theme = parse_theme(t->get<std::string>());
    }
    sec.finish();
  }
  if (const Json* s = top.child("pauses")) {
    Section sec(*s, "pauses");
    sec.read("min_gap_s", c.pauses.min_gap_s);
    if (const Json* w = sec.child("windows")) {
      if (!w->is_array()) throw ConfigError("'pauses.windows' must be an array");
      c.pauses.windows.clear();
      for (const Json& pw : *w) {
        const Vec2 v = vec_from_json(pw);
        c.pauses.windows.push_back({v.x, v.y});
      }
    }
    sec.finish();
  }
  if (const Json* s = top.child("scoring")) c.scoring = scoring_from_json(*s);
  if (const Json* s = top.child("metrics")) {
    Section sec(*s, "metrics");
    sec.read("decimation_ticks", c.metrics.decimation_ticks);
    sec.read_enum("naq_mode", c.metrics.naq_mode, parse_naq_mode);
    sec.finish();
  }
  if (const Json* s = top.child("swipe")) {
    Section sec(*s, "swipe");
    sec.read("radius", c.swipe.radius);
    sec.read("k_impulse", c.swipe.k_impulse);
    sec.finish();
  }
  if (const Json* s = top.child("operator")) {
    Section sec(*s, "operator");
    sec.read_enum("policy", c.policy.kind, parse_policy);
    sec.read("accuracy", c.policy.accuracy);
    sec.read("delay_ticks", c.policy.delay_ticks);
    sec.read("swipe_interval_ticks", c.policy.swipe_interval_ticks);
    sec.finish();
  }
  if (const Json* s = top.child("respondent")) {
    Section sec(*s, "respondent");
    sec.read("correctness", c.respondent_correctness);
    sec.finish();
  }
  if (const Json* b = top.child("query_bank")) {
    if (b->is_string()) {
      const auto name = b->get<std::string>();
      if (name != "default") c.bank = load_query_bank(base_dir / name);
    } else {
      try {
        c.bank = bank_from_json(*b);
      } catch (const SchemaError& e) {
        throw ConfigError(std::string("query bank: ") + e.what());
      }
    }
  }
  top.finish();
  c.validate();
  return c;
}

}  // namespace

SessionConfig config_from_json(const Json& j, const std::filesystem::path& base_dir) {
  try {
    return parse_config(j, base_dir);
  } catch (const SchemaError& e) {
    throw ConfigError(e.what());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(e.what());
  }
}

SessionConfig load_config(const std::filesystem::path& path) {
  return config_from_json(read_json_file(path), path.parent_path());
}

ScoringConfig load_scoring(const std::filesystem::path& path) {
  const Json j = read_json_file(path);
  // Accept either a bare scoring object or a full config carrying one.
  if (j.is_object() && j.contains("scoring")) return scoring_from_json(j.at("scoring"));
  return scoring_from_json(j);
}

QueryBank load_query_bank(const std::filesystem::path& path) {
  try {
    QueryBank b = bank_from_json(read_json_file(path));
    b.validate();
    return b;
  } catch (const SchemaError& e) {
    throw ConfigError("query bank '" + path.string() + "': " + e.what());
  }
}

}  // namespace hsi
