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

#include "hsi/sart.hpp"

#include <string>

#include "hsi/error.hpp"

namespace hsi {

SartScore score_sart(std::span<const int> ratings) {
  if (ratings.size() != kSartConstructs.size()) {
    throw DomainError("SART needs exactly 10 ratings, got " + std::to_string(ratings.size()));
  }
  SartScore s;
  int sum = 0;
  for (std::size_t i = 0; i < ratings.size(); ++i) {
    const int r = ratings[i];
    if (r < 1 || r > 7) {
      throw DomainError("SART rating for " + std::string(kSartConstructs[i]) + " out of range 1..7");
    }
    s.ratings[i] = r;
    sum += r;
  }
  s.demand = s.ratings[0] + s.ratings[1] + s.ratings[2];
  s.supply = s.ratings[3] + s.ratings[4] + s.ratings[5] + s.ratings[6];
  s.understanding = s.ratings[7] + s.ratings[8] + s.ratings[9];
  s.total = s.understanding - (s.demand - s.supply);
  s.mean_rating = sum / 10.0;
  return s;
}

}  // namespace hsi
