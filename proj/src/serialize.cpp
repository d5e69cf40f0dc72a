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

#include "hsi/serialize.hpp"

#include "hsi/error.hpp"

namespace hsi {

namespace {

template <class T>
T field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw SchemaError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw SchemaError(std::string("field '") + key + "' has the wrong type");
  }
}

Json opt(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::optional<double> opt_from(const Json& j) {
  if (j.is_null()) return std::nullopt;
  if (!j.is_number()) throw SchemaError("expected a number or null");
  return j.get<double>();
}

}  // namespace

Json to_json(CellIndex c) { return Json::array({c.col, c.row}); }

CellIndex cell_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) {
    throw SchemaError("cell must be [col, row]");
  }
  return {j[0].get<int>(), j[1].get<int>()};
}

Json to_json(const CellSet& cells) {
  Json out = Json::array();
  for (CellIndex c : cells) out.push_back(to_json(c));
  return out;
}

CellSet cells_from_json(const Json& j) {
  if (!j.is_array()) throw SchemaError("cell list must be an array");
  CellSet out;
  for (const Json& c : j) out.insert(cell_from_json(c));
  return out;
}

Json to_json(Vec2 v) { return Json::array({v.x, v.y}); }

Vec2 vec_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw SchemaError("vector must be [x, y]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

Json action_to_json(const OperatorAction& a) {
  return std::visit(
      [](const auto& k) -> Json {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, MarkCell>) {
          return {{"type", "mark"}, {"cell", to_json(k.cell)}};
        } else if constexpr (std::is_same_v<T, UnmarkCell>) {
          return {{"type", "unmark"}, {"cell", to_json(k.cell)}};
        } else {
          return {{"type", "swipe"}, {"origin", to_json(k.origin)}, {"direction", to_json(k.direction)},
                  {"magnitude", k.magnitude}};
        }
      },
      a.kind);
}

OperatorAction action_from_json(const Json& j, std::int64_t tick) {
  const auto type = field<std::string>(j, "type");
  OperatorAction a;
  a.tick = tick;
  if (type == "mark") {
    a.kind = MarkCell{cell_from_json(j.at("cell"))};
  } else if (type == "unmark") {
    a.kind = UnmarkCell{cell_from_json(j.at("cell"))};
  } else if (type == "swipe") {
    if (!j.contains("origin") || !j.contains("direction")) throw SchemaError("swipe needs origin and direction");
    a.kind = Swipe{vec_from_json(j.at("origin")), vec_from_json(j.at("direction")), field<double>(j, "magnitude")};
  } else {
    throw SchemaError("unknown action type '" + type + "'");
  }
  return a;
}

Json answer_to_json(const SagatAnswer& a) {
  return std::visit(
      [](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, int>) {
          return {{"type", "option"}, {"option", v}};
        } else if constexpr (std::is_same_v<T, IDontKnow>) {
          return {{"type", "dont_know"}};
        } else if constexpr (std::is_same_v<T, CellSet>) {
          return {{"type", "cells"}, {"cells", to_json(v)}};
        } else {
          return {{"type", "not_applicable"}};
        }
      },
      a);
}

SagatAnswer answer_from_json(const Json& j) {
  const auto type = field<std::string>(j, "type");
  if (type == "option") return field<int>(j, "option");
  if (type == "dont_know") return IDontKnow{};
  if (type == "cells") {
    if (!j.contains("cells")) throw SchemaError("missing field 'cells'");
    return cells_from_json(j.at("cells"));
  }
  if (type == "not_applicable") return NotApplicable{};
  throw SchemaError("unknown answer type '" + type + "'");
}

Json to_json(const GroundTruth& t) {
  Json j{{"kind", query_kind_name(t.kind)}};
  if (t.kind == QueryKind::CMQ) {
    j["cells"] = to_json(t.cells);
  } else {
    j["option"] = t.correct_option ? Json(*t.correct_option) : Json(nullptr);
    j["value"] = opt(t.value);
  }
  return j;
}

GroundTruth truth_from_json(const Json& j) {
  GroundTruth t;
  try {
    t.kind = parse_query_kind(field<std::string>(j, "kind"));
  } catch (const ConfigError& e) {
    throw SchemaError(e.what());
  }
  if (t.kind == QueryKind::CMQ) {
    if (!j.contains("cells")) throw SchemaError("missing field 'cells'");
    t.cells = cells_from_json(j.at("cells"));
  } else {
    if (!j.contains("option") || !j.contains("value")) throw SchemaError("MCQ truth needs option and value");
    if (!j.at("option").is_null()) t.correct_option = field<int>(j, "option");
    t.value = opt_from(j.at("value"));
  }
  return t;
}

Json to_json(const HazardEvent& e) {
  Json act = Json::array(), clr = Json::array();
  for (CellIndex c : e.activated) act.push_back(to_json(c));
  for (CellIndex c : e.cleared) clr.push_back(to_json(c));
  return {{"kind", hazard_kind_name(e.kind)}, {"activated", act}, {"cleared", clr}, {"exhausted", e.exhausted}};
}

HazardEvent hazard_event_from_json(const Json& j, std::int64_t tick) {
  HazardEvent e;
  e.tick = tick;
  try {
    e.kind = parse_hazard_kind(field<std::string>(j, "kind"));
  } catch (const ConfigError& err) {
    throw SchemaError(err.what());
  }
  for (const char* key : {"activated", "cleared"}) {
    if (!j.contains(key) || !j.at(key).is_array()) throw SchemaError(std::string("missing field '") + key + "'");
  }
  for (const Json& c : j.at("activated")) e.activated.push_back(cell_from_json(c));
  for (const Json& c : j.at("cleared")) e.cleared.push_back(cell_from_json(c));
  e.exhausted = field<bool>(j, "exhausted");
  return e;
}

Json to_json(const AlertMessage& a) {
  Json cells = Json::array();
  for (CellIndex c : a.cells) cells.push_back(to_json(c));
  return {{"kind", hazard_kind_name(a.kind)}, {"cells", cells}, {"text", a.text}};
}

AlertMessage alert_from_json(const Json& j, std::int64_t tick) {
  AlertMessage a;
  a.tick = tick;
  try {
    a.kind = parse_hazard_kind(field<std::string>(j, "kind"));
  } catch (const ConfigError& err) {
    throw SchemaError(err.what());
  }
  if (!j.contains("cells") || !j.at("cells").is_array()) throw SchemaError("missing field 'cells'");
  for (const Json& c : j.at("cells")) a.cells.push_back(cell_from_json(c));
  a.text = field<std::string>(j, "text");
  return a;
}

Json to_json(const MetricSample& m) {
  return {{"all_deactivated", m.all_deactivated}, {"ca", m.ca},
          {"na", m.na},
          {"naq1", m.naq1},
          {"naq2", m.naq2},
          {"active", m.active_count},
          {"deactivated", m.deactivated_count},
          {"trapped", m.trapped_count}};
}

MetricSample metric_from_json(const Json& j, std::int64_t tick) {
  MetricSample m;
  m.tick = tick;
  m.all_deactivated = field<bool>(j, "all_deactivated");
  m.ca = field<double>(j, "ca");
  m.na = field<double>(j, "na");
  m.naq1 = field<double>(j, "naq1");
  m.naq2 = field<double>(j, "naq2");
  m.active_count = field<int>(j, "active");
  m.deactivated_count = field<int>(j, "deactivated");
  m.trapped_count = field<int>(j, "trapped");
  return m;
}

Json robots_to_json(std::span<const RobotState> robots, const std::set<int>& trapped) {
  Json id = Json::array(), x = Json::array(), y = Json::array(), vx = Json::array(), vy = Json::array();
  Json deact = Json::array();
  for (const RobotState& r : robots) {
    id.push_back(r.id);
    x.push_back(r.position.x);
    y.push_back(r.position.y);
    vx.push_back(r.velocity.x);
    vy.push_back(r.velocity.y);
    if (!r.active()) deact.push_back(r.id);
  }
  return {{"id", id}, {"x", x}, {"y", y}, {"vx", vx}, {"vy", vy}, {"deactivated", deact},
          {"trapped", Json(std::vector<int>(trapped.begin(), trapped.end()))}};
}

RobotSnapshotData robots_from_json(const Json& j) {
  const auto id = field<std::vector<int>>(j, "id");
  const auto x = field<std::vector<double>>(j, "x");
  const auto y = field<std::vector<double>>(j, "y");
  const auto vx = field<std::vector<double>>(j, "vx");
  const auto vy = field<std::vector<double>>(j, "vy");
  const auto deact = field<std::vector<int>>(j, "deactivated");
  const auto trapped = field<std::vector<int>>(j, "trapped");
  if (x.size() != id.size() || y.size() != id.size() || vx.size() != id.size() || vy.size() != id.size()) {
    throw SchemaError("robot snapshot columns differ in length");
  }
  const std::set<int> dset(deact.begin(), deact.end());
  RobotSnapshotData out;
  for (std::size_t i = 0; i < id.size(); ++i) {
    out.robots.push_back({id[i], {x[i], y[i]}, {vx[i], vy[i]}, dset.contains(id[i])});
  }
  out.trapped.insert(trapped.begin(), trapped.end());
  return out;
}

Json to_json(const SartScore& s) {
  Json ratings = Json::object();
  for (std::size_t i = 0; i < kSartConstructs.size(); ++i) ratings[std::string(kSartConstructs[i])] = s.ratings[i];
  return {{"ratings", ratings},          {"demand", s.demand}, {"supply", s.supply},
          {"understanding", s.understanding}, {"total", s.total},   {"mean_rating", s.mean_rating}};
}

Json to_json(const SagatReport& r) {
  Json items = Json::array();
  for (const ScoredItem& it : r.items) {
    items.push_back({{"query_id", it.query_id},
                     {"level", level_name(it.level)},
                     {"dimension", it.dimension},
                     {"score", opt(it.score)}});
  }
  Json levels = Json::array(), dims = Json::array();
  for (const auto& m : r.level_means) levels.push_back(opt(m));
  for (const auto& m : r.dimension_means) dims.push_back(opt(m));
  return {{"overall", r.overall}, {"levels", levels}, {"dimensions", dims}, {"items", items}};
}

SagatReport sagat_report_from_json(const Json& j) {
  SagatReport r;
  r.overall = field<double>(j, "overall");
  if (!j.contains("levels") || !j.contains("dimensions") || !j.contains("items")) {
    throw SchemaError("SAGAT report is missing sections");
  }
  const Json& levels = j.at("levels");
  const Json& dims = j.at("dimensions");
  if (!levels.is_array() || levels.size() != 3 || !dims.is_array() || dims.size() != 6) {
    throw SchemaError("SAGAT report needs 3 level and 6 dimension means");
  }
  for (std::size_t i = 0; i < 3; ++i) r.level_means[i] = opt_from(levels[i]);
  for (std::size_t i = 0; i < 6; ++i) r.dimension_means[i] = opt_from(dims[i]);
  for (const Json& it : j.at("items")) {
    ScoredItem s;
    s.query_id = field<std::string>(it, "query_id");
    try {
      s.level = parse_level(field<std::string>(it, "level"));
    } catch (const ConfigError& e) {
      throw SchemaError(e.what());
    }
    s.dimension = field<int>(it, "dimension");
    s.score = opt_from(it.at("score"));
    r.items.push_back(std::move(s));
  }
  return r;
}

Json to_json(const SagatQuery& q) {
  Json j{{"id", q.id},
         {"level", level_name(q.level)},
         {"dimension", q.dimension},
         {"tag", q.requirement},
         {"kind", query_kind_name(q.kind)},
         {"prompt", q.prompt},
         {"extractor", q.extractor},
         {"horizon_s", q.horizon_s},
         {"pause", q.pause}};
  if (q.bins) j["range"] = Json::array({q.bins->lo, q.bins->hi});
  return j;
}

SagatQuery query_from_json(const Json& j) {
  SagatQuery q;
  q.id = field<std::string>(j, "id");
  q.level = parse_level(field<std::string>(j, "level"));
  q.dimension = field<int>(j, "dimension");
  q.requirement = field<std::string>(j, "tag");
  q.kind = parse_query_kind(field<std::string>(j, "kind"));
  q.prompt = field<std::string>(j, "prompt");
  q.extractor = field<std::string>(j, "extractor");
  q.horizon_s = j.value("horizon_s", 0.0);
  q.pause = field<int>(j, "pause");
  if (j.contains("range")) {
    const Vec2 r = vec_from_json(j.at("range"));
    q.bins = NumericBins{r.x, r.y};
  }
  return q;
}

Json to_json(const QueryBank& b) {
  Json qs = Json::array();
  for (const SagatQuery& q : b.queries) qs.push_back(to_json(q));
  return {{"version", b.version},
          {"near_radius_m", b.near_radius_m},
          {"stationary_speed", b.stationary_speed},
          {"queries", qs}};
}

QueryBank bank_from_json(const Json& j) {
  QueryBank b;
  b.version = j.value("version", 1);
  b.near_radius_m = j.value("near_radius_m", b.near_radius_m);
  b.stationary_speed = j.value("stationary_speed", b.stationary_speed);
  if (!j.contains("queries") || !j.at("queries").is_array()) throw SchemaError("query bank needs a queries array");
  for (const Json& q : j.at("queries")) b.queries.push_back(query_from_json(q));
  return b;
}

}  // namespace hsi
