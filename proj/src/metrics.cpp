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

#include "hsi/metrics.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "hsi/error.hpp"
#include "hsi/kernels/kernels.hpp"

namespace hsi {

std::string_view naq_mode_name(NaqMode m) noexcept {
  return m == NaqMode::PrefixMean ? "prefix-mean" : "quartile-boundary";
}

NaqMode parse_naq_mode(std::string_view s) {
  if (s == "prefix-mean") return NaqMode::PrefixMean;
  if (s == "quartile-boundary") return NaqMode::QuartileBoundary;
  throw ConfigError("unknown NAQ mode '" + std::string(s) + "'");
}

MetricSample compute_metrics(std::span<const RobotState> swarm, const GridWorld& world, std::int64_t tick,
                             NaqMode mode, int trapped_count) {
  MetricSample s;
  s.tick = tick;
  s.trapped_count = trapped_count;
  std::vector<double> xs, ys;
  xs.reserve(swarm.size());
  ys.reserve(swarm.size());
  for (const RobotState& r : swarm) {
    if (r.active()) {
      xs.push_back(r.position.x);
      ys.push_back(r.position.y);
    } else {
      ++s.deactivated_count;
    }
  }
  const std::size_t n = xs.size();
  s.active_count = static_cast<int>(n);
  if (n == 0) {
    s.all_deactivated = true;
    return s;
  }
  const Vec2 target = world.target();
  std::vector<double> dist(n);
  kernels::distances(xs, ys, target, dist);
  std::sort(dist.begin(), dist.end());

  // Summing in sorted order makes the centroid independent of robot order.
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double inv = 1.0 / static_cast<double>(n);
  s.ca = distance({sx * inv, sy * inv}, target);
  s.na = dist.front();

  const std::size_t k1 = (n + 3) / 4;
  const std::size_t k2 = (n + 1) / 2;
  if (mode == NaqMode::PrefixMean) {
    double acc = 0.0;
    for (std::size_t i = 0; i < k2; ++i) {
      acc += dist[i];
      if (i + 1 == k1) s.naq1 = acc / static_cast<double>(k1);
    }
    s.naq2 = acc / static_cast<double>(k2);
  } else {
    s.naq1 = dist[k1 - 1];
    s.naq2 = dist[k2 - 1];
  }
  return s;
}

}  // namespace hsi
