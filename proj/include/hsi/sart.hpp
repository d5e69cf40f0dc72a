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
#include <span>
#include <string_view>

namespace hsi {

// Ten SART constructs, in form order. Ratings are 1 (Low) .. 7 (High).
inline constexpr std::array<std::string_view, 10> kSartConstructs{
    "instability",          "complexity",          "variability",       "arousal",
    "concentration",        "division_of_attention", "spare_capacity",  "information_quantity",
    "information_quality",  "familiarity",
};

struct SartScore {
  std::array<int, 10> ratings{};
  int demand = 0;         // D: instability + complexity + variability, in [3, 21]
  int supply = 0;         // S: arousal + concentration + division + spare capacity, in [4, 28]
  int understanding = 0;  // U: info quantity + info quality + familiarity, in [3, 21]
  int total = 0;          // U - (D - S), in [-14, 46]
  double mean_rating = 0.0;  // plain mean of the ten ratings, reported alongside
};

// Throws DomainError unless there are exactly ten ratings, each in 1..7.
SartScore score_sart(std::span<const int> ratings);

}  // namespace hsi
