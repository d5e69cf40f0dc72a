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
#include <span>
#include <string_view>

#include "hsi/swarm.hpp"
#include "hsi/world.hpp"

namespace hsi {

// How NAQ1/NAQ2 summarise the sorted active-robot distances.
//   PrefixMean:       mean of the nearest ceil(n/4) (NAQ1) / ceil(n/2) (NAQ2).
//   QuartileBoundary: distance of the ceil(n/4)-th / ceil(n/2)-th nearest robot.
enum class NaqMode : std::uint8_t { PrefixMean, QuartileBoundary };

std::string_view naq_mode_name(NaqMode m) noexcept;
NaqMode parse_naq_mode(std::string_view s);

// Task-performance sample. Distances are in meters; lower is better. When no
// robot is active the distance fields are meaningless and all_deactivated is set.
struct MetricSample {
  std::int64_t tick = 0;
  bool all_deactivated = false;
  double ca = 0.0;    // centroid of active robots to target
  double na = 0.0;    // nearest active robot
  double naq1 = 0.0;
  double naq2 = 0.0;
  int active_count = 0;
  int deactivated_count = 0;
  int trapped_count = 0;
};

MetricSample compute_metrics(std::span<const RobotState> swarm, const GridWorld& world, std::int64_t tick,
                             NaqMode mode = NaqMode::PrefixMean, int trapped_count = 0);

}  // namespace hsi
