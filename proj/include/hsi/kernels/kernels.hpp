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

#include <cstddef>
#include <span>
#include <string_view>

#include "hsi/geometry.hpp"

// Batch arithmetic used by the swarm, metrics and statistics inner loops.
//
// Each kernel has a scalar reference in hsi::kernels::scalar and, on x86-64,
// an AVX2 variant in hsi::kernels::avx2. The free functions in hsi::kernels
// dispatch at runtime. The element-wise kernels use only IEEE add/sub/mul/
// div/sqrt/max (no FMA contraction), so both variants agree bit for bit and
// session logs are identical regardless of which one ran. dot() reassociates
// the sum; it is exact (and therefore identical) for integer-valued inputs
// whose partial sums stay below 2^53.
namespace hsi::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa) noexcept;
bool isa_supported(Isa isa) noexcept;
// Chosen once from CPUID unless HSI_FORCE_SCALAR is set in the environment.
Isa active_isa() noexcept;
// Test hook. Throws DomainError if the ISA is unavailable on this host.
void force_isa(Isa isa);

// out[i] = (xs[i] - p.x)^2 + (ys[i] - p.y)^2
void squared_distances(std::span<const double> xs, std::span<const double> ys, Vec2 p, std::span<double> out);
// out[i] = sqrt((xs[i] - p.x)^2 + (ys[i] - p.y)^2)
void distances(std::span<const double> xs, std::span<const double> ys, Vec2 p, std::span<double> out);
// out[i] = power / max(d_i, d_min)^2 with d_i the distance from (xs[i], ys[i]) to source.
void inverse_square(std::span<const double> xs, std::span<const double> ys, Vec2 source, double power,
                    double d_min, std::span<double> out);
double dot(std::span<const double> a, std::span<const double> b);

namespace scalar {
void squared_distances(const double* xs, const double* ys, std::size_t n, Vec2 p, double* out) noexcept;
void distances(const double* xs, const double* ys, std::size_t n, Vec2 p, double* out) noexcept;
void inverse_square(const double* xs, const double* ys, std::size_t n, Vec2 source, double power, double d_min,
                    double* out) noexcept;
double dot(const double* a, const double* b, std::size_t n) noexcept;
}  // namespace scalar

#if defined(HSI_HAVE_AVX2)
namespace avx2 {
void squared_distances(const double* xs, const double* ys, std::size_t n, Vec2 p, double* out) noexcept;
void distances(const double* xs, const double* ys, std::size_t n, Vec2 p, double* out) noexcept;
void inverse_square(const double* xs, const double* ys, std::size_t n, Vec2 source, double power, double d_min,
                    double* out) noexcept;
double dot(const double* a, const double* b, std::size_t n) noexcept;
}  // namespace avx2
#endif

}  // namespace hsi::kernels
