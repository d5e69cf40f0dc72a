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
#include <string_view>

namespace hsi {

// Counter-based generator: every draw is a pure function of (key, counter),
// so named streams never perturb each other and draws can be addressed
// directly by coordinates such as (tick, robot, k).
class RngStream {
 public:
  RngStream() = default;
  RngStream(std::uint64_t seed, std::string_view name);

  static RngStream from_key(std::uint64_t key, std::uint64_t counter = 0) {
    RngStream s;
    s.key_ = key;
    s.counter_ = counter;
    return s;
  }

  std::uint64_t next_u64() noexcept { return at(counter_++); }
  // Uniform in [0, 1) with 53 bits of resolution.
  double uniform() noexcept { return to_unit(next_u64()); }
  // Uniform integer in [0, n); n must be > 0.
  std::uint64_t below(std::uint64_t n) noexcept;
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  bool bernoulli(double p) noexcept { return uniform() < p; }

  // Addressed draw that does not advance the stream.
  double uniform_at(std::uint64_t a, std::uint64_t b, std::uint64_t c) const noexcept;

  RngStream fork(std::string_view name) const;

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

  static double to_unit(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t at(std::uint64_t counter) const noexcept;

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

}  // namespace hsi
