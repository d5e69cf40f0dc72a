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

// Compiled with -mavx2 (and without -mfma); only reached after a CPUID check.
#include <immintrin.h>

#include <algorithm>
#include <cmath>

#include "hsi/kernels/kernels.hpp"

namespace hsi::kernels::avx2 {

namespace {

inline __m256d sq_dist(__m256d x, __m256d y, __m256d px, __m256d py) {
  const __m256d dx = _mm256_sub_pd(x, px);
  const __m256d dy = _mm256_sub_pd(y, py);
  return _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
}

}  // namespace

void squared_distances(const double* xs, const double* ys, std::size_t n, Vec2 p, double* out) noexcept {
  const __m256d px = _mm256_set1_pd(p.x);
  const __m256d py = _mm256_set1_pd(p.y);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, sq_dist(_mm256_loadu_pd(xs + i), _mm256_loadu_pd(ys + i), px, py));
  }
  scalar::squared_distances(xs + i, ys + i, n - i, p, out + i);
}

void distances(const double* xs, const double* ys, std::size_t n, Vec2 p, double* out) noexcept {
  const __m256d px = _mm256_set1_pd(p.x);
  const __m256d py = _mm256_set1_pd(p.y);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d2 = sq_dist(_mm256_loadu_pd(xs + i), _mm256_loadu_pd(ys + i), px, py);
    _mm256_storeu_pd(out + i, _mm256_sqrt_pd(d2));
  }
  scalar::distances(xs + i, ys + i, n - i, p, out + i);
}

void inverse_square(const double* xs, const double* ys, std::size_t n, Vec2 source, double power, double d_min,
                    double* out) noexcept {
  const __m256d px = _mm256_set1_pd(source.x);
  const __m256d py = _mm256_set1_pd(source.y);
  const __m256d vp = _mm256_set1_pd(power);
  const __m256d vmin = _mm256_set1_pd(d_min);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d2 = sq_dist(_mm256_loadu_pd(xs + i), _mm256_loadu_pd(ys + i), px, py);
    // Operand order matches std::max(d, d_min) for NaN-free inputs.
    const __m256d d = _mm256_max_pd(_mm256_sqrt_pd(d2), vmin);
    _mm256_storeu_pd(out + i, _mm256_div_pd(vp, _mm256_mul_pd(d, d)));
  }
  scalar::inverse_square(xs + i, ys + i, n - i, source, power, d_min, out + i);
}

double dot(const double* a, const double* b, std::size_t n) noexcept {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, acc);
  double s = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

}  // namespace hsi::kernels::avx2
