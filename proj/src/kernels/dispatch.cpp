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

#include <atomic>
#include <cstdlib>
#include <string>

#include "hsi/error.hpp"
#include "hsi/kernels/kernels.hpp"

namespace hsi::kernels {

namespace {

Isa detect() noexcept {
  if (const char* env = std::getenv("HSI_FORCE_SCALAR"); env != nullptr && std::string(env) != "0") {
    return Isa::Scalar;
  }
  return isa_supported(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<Isa>& current() noexcept {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

void check_sizes(std::size_t a, std::size_t b, std::size_t c) {
  if (a != b || a != c) throw DomainError("kernel spans differ in length");
}

}  // namespace

std::string_view isa_name(Isa isa) noexcept { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

bool isa_supported(Isa isa) noexcept {
  if (isa == Isa::Scalar) return true;
#if defined(HSI_HAVE_AVX2)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa active_isa() noexcept { return current().load(std::memory_order_relaxed); }

void force_isa(Isa isa) {
  if (!isa_supported(isa)) throw DomainError("ISA " + std::string(isa_name(isa)) + " not supported on this host");
  current().store(isa, std::memory_order_relaxed);
}

void squared_distances(std::span<const double> xs, std::span<const double> ys, Vec2 p, std::span<double> out) {
  check_sizes(xs.size(), ys.size(), out.size());
#if defined(HSI_HAVE_AVX2)
  if (active_isa() == Isa::Avx2) return avx2::squared_distances(xs.data(), ys.data(), xs.size(), p, out.data());
#endif
  scalar::squared_distances(xs.data(), ys.data(), xs.size(), p, out.data());
}

void distances(std::span<const double> xs, std::span<const double> ys, Vec2 p, std::span<double> out) {
  check_sizes(xs.size(), ys.size(), out.size());
#if defined(HSI_HAVE_AVX2)
  if (active_isa() == Isa::Avx2) return avx2::distances(xs.data(), ys.data(), xs.size(), p, out.data());
#endif
  scalar::distances(xs.data(), ys.data(), xs.size(), p, out.data());
}

void inverse_square(std::span<const double> xs, std::span<const double> ys, Vec2 source, double power,
                    double d_min, std::span<double> out) {
  check_sizes(xs.size(), ys.size(), out.size());
#if defined(HSI_HAVE_AVX2)
  if (active_isa() == Isa::Avx2) {
    return avx2::inverse_square(xs.data(), ys.data(), xs.size(), source, power, d_min, out.data());
  }
#endif
  scalar::inverse_square(xs.data(), ys.data(), xs.size(), source, power, d_min, out.data());
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DomainError("kernel spans differ in length");
#if defined(HSI_HAVE_AVX2)
  if (active_isa() == Isa::Avx2) return avx2::dot(a.data(), b.data(), a.size());
#endif
  return scalar::dot(a.data(), b.data(), a.size());
}

}  // namespace hsi::kernels
