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
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace hsi::stats {

// Quantile by inclusive linear interpolation: position p * (n - 1) in the
// sorted sample (Hyndman-Fan type 7).
double quantile(std::span<const double> x, double p);

struct Summary {
  std::size_t n = 0;
  double median = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double iqr() const noexcept { return q3 - q1; }
};
Summary summarize(std::span<const double> x);

// Mid-ranks (1-based), ties share the mean of their positions.
std::vector<double> midranks(std::span<const double> x);

enum class Method : std::uint8_t { Exact, Approx, Permutation, TApprox, Degenerate };
std::string_view method_name(Method m) noexcept;

struct TestResult {
  double statistic = 0.0;  // W = min(W+, W-)
  double w_plus = 0.0;
  double w_minus = 0.0;
  double p_value = 1.0;
  std::size_t n_effective = 0;
  Method method = Method::Degenerate;
  double median_difference = 0.0;  // median of y - x over all pairs
  Summary x;
  Summary y;
};

inline constexpr std::size_t kExactWilcoxonMax = 20;

// Paired signed-rank test on d = y - x; zero differences are dropped.
TestResult wilcoxon_paired(std::span<const double> x, std::span<const double> y, bool force_approx = false);

enum class Strength : std::uint8_t { Weak, Moderate, Strong };
std::string_view strength_name(Strength s) noexcept;
Strength strength_of(double rho) noexcept;

struct SpearmanOptions {
  std::size_t permutations = 10000;
  std::uint64_t seed = 0x5eed;
  bool t_approx = false;
};

struct SpearmanResult {
  std::size_t n = 0;
  std::optional<double> rho;      // empty when x or y is constant
  std::optional<double> p_value;
  Strength strength = Strength::Weak;
  Method method = Method::Permutation;
};

SpearmanResult spearman(std::span<const double> x, std::span<const double> y, const SpearmanOptions& opts = {});

// Holm step-down adjustment; NaN-free input, output in input order.
std::vector<double> holm_adjust(std::span<const double> p);

}  // namespace hsi::stats
