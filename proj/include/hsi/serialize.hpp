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

// JSON encodings shared by the session log and the gateway wire protocol.
#pragma once

#include <json.hpp>

#include "hsi/hazards.hpp"
#include "hsi/intervention.hpp"
#include "hsi/metrics.hpp"
#include "hsi/sagat.hpp"
#include "hsi/sart.hpp"
#include "hsi/swarm.hpp"

namespace hsi {

using Json = nlohmann::json;

Json to_json(CellIndex c);
CellIndex cell_from_json(const Json& j);
Json to_json(const CellSet& cells);
CellSet cells_from_json(const Json& j);
Json to_json(Vec2 v);
Vec2 vec_from_json(const Json& j);

// {"type": "mark"|"unmark"|"swipe", ...}; the tick travels outside the payload.
Json action_to_json(const OperatorAction& a);
OperatorAction action_from_json(const Json& j, std::int64_t tick);

Json answer_to_json(const SagatAnswer& a);
SagatAnswer answer_from_json(const Json& j);

Json to_json(const GroundTruth& t);
GroundTruth truth_from_json(const Json& j);

Json to_json(const HazardEvent& e);
HazardEvent hazard_event_from_json(const Json& j, std::int64_t tick);
Json to_json(const AlertMessage& a);
AlertMessage alert_from_json(const Json& j, std::int64_t tick);

Json to_json(const MetricSample& m);
MetricSample metric_from_json(const Json& j, std::int64_t tick);

// Compact column layout: {"id":[...],"x":[...],"y":[...],"vx":[...],"vy":[...],
// "deactivated":[ids], "trapped":[ids]}.
Json robots_to_json(std::span<const RobotState> robots, const std::set<int>& trapped);
struct RobotRow {
  int id = 0;
  Vec2 position;
  Vec2 velocity;
  bool deactivated = false;
};
struct RobotSnapshotData {
  std::vector<RobotRow> robots;
  std::set<int> trapped;
};
RobotSnapshotData robots_from_json(const Json& j);

Json to_json(const SartScore& s);
Json to_json(const SagatReport& r);
SagatReport sagat_report_from_json(const Json& j);

Json to_json(const SagatQuery& q);
SagatQuery query_from_json(const Json& j);
Json to_json(const QueryBank& b);
QueryBank bank_from_json(const Json& j);

}  // namespace hsi
