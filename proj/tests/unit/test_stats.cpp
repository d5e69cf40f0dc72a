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


#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "hsi/error.hpp"
#include "hsi/rng.hpp"
#include "hsi/stats.hpp"

using namespace hsi;
using namespace hsi::stats;

namespace {

// Two-sided exact p by listing all 2^n sign assignments of the absolute ranks.
double brute_wilcoxon_p(const std::vector<double>& d) {
  std::vector<double> nz;
  for (double v : d)
    if (v != 0.0) nz.push_back(v);
  const std::size_t n = nz.size();
  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n; ++i) {
    double less = 0, equal = 0;
    for (std::size_t j = 0; j < n; ++j) {
      less += std::abs(nz[j]) < std::abs(nz[i]);
      equal += std::abs(nz[j]) == std::abs(nz[i]);
    }
    ranks[i] = less + (equal + 1.0) / 2.0;
  }
  double total = 0, wplus = 0;
  for (std::size_t i = 0; i < n; ++i) {
    total += ranks[i];
    if (nz[i] > 0) wplus += ranks[i];
  }
  const double dev = std::abs(wplus - total / 2.0);
  std::size_t hits = 0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    double w = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1) w += ranks[i];
    if (std::abs(w - total / 2.0) >= dev - 1e-9) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(std::size_t{1} << n);
}

double sorted_quantile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double h = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = static_cast<std::size_t>(std::ceil(h));
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

std::vector<double> zeros(std::size_t n) { return std::vector<double>(n, 0.0); }

}  // namespace

TEST_SUITE("stats") {

TEST_CASE("quantiles use inclusive linear interpolation") {
  const std::vector<double> x{7, 1, 3, 5};
  CHECK(quantile(x, 0.0) == 1.0);
  CHECK(quantile(x, 1.0) == 7.0);
  CHECK(quantile(x, 0.5) == 4.0);
  CHECK(quantile(x, 0.25) == 2.5);
  Summary s = summarize(x);
  CHECK(s.iqr() == doctest::Approx(3.0));
  CHECK(quantile(std::vector<double>{42}, 0.75) == 42.0);
  CHECK_THROWS_AS(quantile(std::vector<double>{}, 0.5), DomainError);
  RngStream r(1, "q");
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> v(1 + r.below(30));
    for (double& e : v) e = std::round(r.uniform(0, 100));
    for (double p : {0.25, 0.5, 0.75}) CHECK(quantile(v, p) == doctest::Approx(sorted_quantile(v, p)).epsilon(1e-12));
  }
}

TEST_CASE("mid-ranks") {
  CHECK(midranks(std::vector<double>{1, 2, 2, 3}) == std::vector<double>{1, 2.5, 2.5, 4});
  CHECK(midranks(std::vector<double>{5, 5, 5}) == std::vector<double>{2, 2, 2});
}

TEST_CASE("Wilcoxon worked examples") {
  TestResult a = wilcoxon_paired(zeros(3), std::vector<double>{1, 2, 3});
  CHECK(a.w_minus == 0.0);
  CHECK(a.statistic == 0.0);
  CHECK(a.p_value == 0.25);
  CHECK(a.method == Method::Exact);
  CHECK(a.n_effective == 3);

  TestResult same = wilcoxon_paired(std::vector<double>{1, 2}, std::vector<double>{1, 2});
  CHECK(same.method == Method::Degenerate);
  CHECK(same.p_value == 1.0);

  TestResult tie = wilcoxon_paired(zeros(2), std::vector<double>{1, -1});
  CHECK(tie.statistic == 1.5);
  CHECK(tie.p_value == 1.0);

  TestResult six = wilcoxon_paired(zeros(6), std::vector<double>{1, 2, 3, 4, 5, -6});
  CHECK(six.statistic == 6.0);
  CHECK(six.p_value == doctest::Approx(0.4375).epsilon(1e-12));

  TestResult drop = wilcoxon_paired(std::vector<double>{1, 1, 1, 1}, std::vector<double>{1, 2, 3, 4});
  CHECK(drop.n_effective == 3);
  CHECK(drop.p_value == 0.25);

  CHECK_THROWS_AS(wilcoxon_paired(zeros(2), zeros(3)), DomainError);
  CHECK_THROWS_AS(wilcoxon_paired(zeros(0), zeros(0)), DomainError);
}

TEST_CASE("exact Wilcoxon equals brute-force enumeration") {
  RngStream r(2024, "wilcoxon");
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + r.below(12);
    std::vector<double> d(n);
    for (double& v : d) v = static_cast<double>(static_cast<int>(r.below(11)) - 5);
    TestResult t = wilcoxon_paired(zeros(n), d);
    if (t.method == Method::Degenerate) continue;
    CHECK(t.p_value == doctest::Approx(brute_wilcoxon_p(d)).epsilon(1e-12));
  }
}

TEST_CASE("normal approximation matches a reference implementation") {
  std::vector<double> d;
  for (int i = 1; i <= 25; ++i) d.push_back((i % 3 == 0 ? -1 : 1) * (i % 7 + 1));
  TestResult t = wilcoxon_paired(zeros(d.size()), d);
  CHECK(t.method == Method::Approx);
  CHECK(t.statistic == 106.5);
  CHECK(t.p_value == doctest::Approx(0.134429747708166).epsilon(1e-9));
  // Forced approximation on a small sample stays close to the exact value.
  TestResult f = wilcoxon_paired(zeros(12), std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8, -9, 10, 11, 12}, true);
  CHECK(f.method == Method::Approx);
  CHECK(f.p_value < 0.05);
}

TEST_CASE("Spearman examples") {
  auto r = spearman(std::vector<double>{1, 2, 3}, std::vector<double>{10, 20, 30});
  CHECK(*r.rho == 1.0);
  CHECK(r.strength == Strength::Strong);
  CHECK(*spearman(std::vector<double>{1, 2, 3}, std::vector<double>{3, 2, 1}).rho == -1.0);
  // Hand oracle: ranks [1, 2.5, 2.5, 4] vs [1, 2, 3, 4] give 4.5 / sqrt(4.5 * 5).
  auto t = spearman(std::vector<double>{1, 2, 2, 3}, std::vector<double>{1, 2, 3, 4});
  CHECK(*t.rho == doctest::Approx(4.5 / std::sqrt(22.5)).epsilon(1e-12));
  auto c = spearman(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3});
  CHECK_FALSE(c.rho.has_value());
  CHECK_FALSE(c.p_value.has_value());
  CHECK_THROWS_AS(spearman(std::vector<double>{1, 2}, std::vector<double>{1, 2}), DomainError);
}

TEST_CASE("Spearman p-values") {
  // n = 3: two of the six orderings are perfectly (anti)monotone.
  auto r = spearman(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2, 3});
  CHECK(*r.p_value == doctest::Approx(1.0 / 3.0).epsilon(0.03));
  const std::vector<double> x{3, 1, 4, 1, 5, 9, 2, 6}, y{2, 7, 1, 8, 2, 8, 1, 8};
  auto t = spearman(x, y, {10000, 1, true});
  CHECK(t.method == Method::TApprox);
  CHECK(*t.rho == doctest::Approx(0.19885368120992467).epsilon(1e-12));
  CHECK(*t.p_value == doctest::Approx(0.6368617833253285).epsilon(1e-9));
  auto p1 = spearman(x, y, {10000, 7});
  auto p2 = spearman(x, y, {20000, 7});
  CHECK(std::abs(*p1.p_value - *p2.p_value) < 0.01);
  CHECK(*spearman(x, y, {500, 3}).p_value == *spearman(x, y, {500, 3}).p_value);
}

TEST_CASE("Spearman is invariant to increasing affine maps") {
  RngStream r(5, "affine");
  std::vector<double> x(15), y(15), z(15);
  for (std::size_t i = 0; i < 15; ++i) {
    x[i] = r.uniform(0, 10);
    y[i] = std::round(r.uniform(0, 5));
    z[i] = 3.0 * y[i] + 7.0;
  }
  CHECK(*spearman(x, y).rho == doctest::Approx(*spearman(x, z).rho).epsilon(1e-12));
}

TEST_CASE("strength thresholds") {
  CHECK(strength_of(0.7) == Strength::Strong);
  CHECK(strength_of(-0.75) == Strength::Strong);
  CHECK(strength_of(0.5) == Strength::Moderate);
  CHECK(strength_of(0.69) == Strength::Moderate);
  CHECK(strength_of(0.49) == Strength::Weak);
}

TEST_CASE("Holm adjustment") {
  auto a = holm_adjust(std::vector<double>{0.01, 0.04, 0.03, 0.5});
  CHECK(a[0] == doctest::Approx(0.04));
  CHECK(a[2] == doctest::Approx(0.09));
  CHECK(a[1] == doctest::Approx(0.09));
  CHECK(a[3] == doctest::Approx(0.5));
}

}  // TEST_SUITE
