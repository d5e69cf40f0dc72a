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

#include <algorithm>
#include <cmath>

#include "hsi/kernels/kernels.hpp"

namespace hsi::kernels::scalar {

void squared_distances(const double* xs, const double* ys, std::size_t n, Vec2 p, double* out) noexcept {
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - p.x;
    const double dy = ys[i] - p.y;
    out[i] = dx * dx + dy * dy;
  }
}

void distances(const double* xs, const double* ys, std::size_t n, Vec2 p, double* out) noexcept {
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - p.x;
    const double dy = ys[i] - p.y;
    out[i] = std::sqrt(dx * dx + dy * dy);
  }
}

void inverse_square(const double* xs, const double* ys, std::size_t n, Vec2 source, double power, double d_min,
                    double* out) noexcept {
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - source.x;
    const double dy = ys[i] - source.y;
    const double d = std::max(std::sqrt(dx * dx + dy * dy), d_min);
    out[i] = power / (d * d);
  }
}

double dot(const double* a, const double* b, std::size_t n) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

}  // namespace hsi::kernels::scalar
