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

#include "hsi/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "hsi/error.hpp"
#include "hsi/kernels/kernels.hpp"
#include "hsi/rng.hpp"

namespace hsi::stats {

double quantile(std::span<const double> x, double p) {
  if (x.empty()) throw DomainError("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("quantile probability must be in [0, 1]");
  std::vector<double> s(x.begin(), x.end());
  std::sort(s.begin(), s.end());
  const double h = p * static_cast<double>(s.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, s.size() - 1);
  return s[lo] + (h - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

Summary summarize(std::span<const double> x) {
  Summary s;
  s.n = x.size();
  if (x.empty()) return s;
  s.median = quantile(x, 0.5);
  s.q1 = quantile(x, 0.25);
  s.q3 = quantile(x, 0.75);
  return s;
}

std::vector<double> midranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

std::string_view method_name(Method m) noexcept {
  switch (m) {
    case Method::Exact: return "exact";
    case Method::Approx: return "approx";
    case Method::Permutation: return "permutation";
    case Method::TApprox: return "t-approx";
    case Method::Degenerate: return "degenerate";
  }
  return "?";
}

namespace {

void check_values(std::span<const double> x, const char* what) {
  for (double v : x) {
    if (!std::isfinite(v)) throw DomainError(std::string(what) + " contains a non-finite value");
  }
}

// Exact two-sided p: share of the 2^n sign assignments whose min(W+, W-) is
// at most the observed W. Works on doubled ranks so tied mid-ranks stay integral.
double exact_signed_rank_p(const std::vector<std::int64_t>& doubled_ranks, std::int64_t w2) {
  std::int64_t total = 0;
  for (auto r : doubled_ranks) total += r;
  std::vector<double> count(static_cast<std::size_t>(total) + 1, 0.0);
  count[0] = 1.0;
  std::int64_t reach = 0;
  for (auto r : doubled_ranks) {
    for (std::int64_t s = reach; s >= 0; --s) {
      if (count[static_cast<std::size_t>(s)] != 0.0) count[static_cast<std::size_t>(s + r)] += count[static_cast<std::size_t>(s)];
    }
    reach += r;
  }
  double hits = 0.0;
  for (std::int64_t s = 0; s <= total; ++s) {
    if (s <= w2 || total - s <= w2) hits += count[static_cast<std::size_t>(s)];
  }
  return std::ldexp(hits, -static_cast<int>(doubled_ranks.size()));
}

}  // namespace

TestResult wilcoxon_paired(std::span<const double> x, std::span<const double> y, bool force_approx) {
  if (x.size() != y.size()) throw DomainError("paired samples differ in length");
  if (x.empty()) throw DomainError("paired test needs at least one pair");
  check_values(x, "x");
  check_values(y, "y");
  TestResult r;
  r.x = summarize(x);
  r.y = summarize(y);

  std::vector<double> d, absd;
  for (std::size_t i = 0; i < x.size(); ++i) d.push_back(y[i] - x[i]);
  r.median_difference = quantile(d, 0.5);
  std::vector<double> nz;
  for (double v : d) {
    if (v != 0.0) nz.push_back(v);
  }
  r.n_effective = nz.size();
  if (nz.empty()) {
    r.method = Method::Degenerate;
    r.p_value = 1.0;
    return r;
  }
  for (double v : nz) absd.push_back(std::abs(v));
  const std::vector<double> ranks = midranks(absd);
  std::vector<std::int64_t> doubled;
  std::int64_t wplus2 = 0, total2 = 0;
  for (std::size_t i = 0; i < nz.size(); ++i) {
    const auto r2 = static_cast<std::int64_t>(std::llround(2.0 * ranks[i]));
    doubled.push_back(r2);
    total2 += r2;
    if (nz[i] > 0.0) wplus2 += r2;
  }
  const std::int64_t w2 = std::min(wplus2, total2 - wplus2);
  r.w_plus = static_cast<double>(wplus2) / 2.0;
  r.w_minus = static_cast<double>(total2 - wplus2) / 2.0;
  r.statistic = static_cast<double>(w2) / 2.0;

  const std::size_t n = nz.size();
  if (n <= kExactWilcoxonMax && !force_approx) {
    r.method = Method::Exact;
    r.p_value = std::min(1.0, exact_signed_rank_p(doubled, w2));
    return r;
  }
  // Normal approximation with tie and continuity corrections.
  const double nn = static_cast<double>(n);
  const double mean = nn * (nn + 1.0) / 4.0;
  double tie = 0.0;
  std::vector<double> sorted = absd;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    tie += t * t * t - t;
    i = j;
  }
  const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie / 48.0;
  r.method = Method::Approx;
  if (var <= 0.0) {
    r.p_value = 1.0;
    return r;
  }
  const double z = std::max(0.0, std::abs(r.w_plus - mean) - 0.5) / std::sqrt(var);
  r.p_value = std::min(1.0, std::erfc(z / std::sqrt(2.0)));
  return r;
}

std::string_view strength_name(Strength s) noexcept {
  switch (s) {
    case Strength::Weak: return "weak";
    case Strength::Moderate: return "moderate";
    case Strength::Strong: return "strong";
  }
  return "?";
}

Strength strength_of(double rho) noexcept {
  const double a = std::abs(rho);
  if (a >= 0.7) return Strength::Strong;
  if (a >= 0.5) return Strength::Moderate;
  return Strength::Weak;
}

SpearmanResult spearman(std::span<const double> x, std::span<const double> y, const SpearmanOptions& opts) {
  if (x.size() != y.size()) throw DomainError("correlated samples differ in length");
  if (x.size() < 3) throw DomainError("Spearman correlation needs at least 3 pairs");
  check_values(x, "x");
  check_values(y, "y");
  SpearmanResult res;
  res.n = x.size();
  res.method = opts.t_approx ? Method::TApprox : Method::Permutation;

  // Doubled mid-ranks are integers, so every sum below is exact.
  std::vector<double> rx = midranks(x), ry = midranks(y);
  for (double& v : rx) v *= 2.0;
  for (double& v : ry) v *= 2.0;
  const double n = static_cast<double>(res.n);
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < res.n; ++i) {
    sx += rx[i];
    sy += ry[i];
  }
  const double sxx = n * kernels::dot(rx, rx) - sx * sx;
  const double syy = n * kernels::dot(ry, ry) - sy * sy;
  if (sxx == 0.0 || syy == 0.0) return res;
  const double sxy = n * kernels::dot(rx, ry) - sx * sy;
  const double rho = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  res.rho = rho;
  res.strength = strength_of(rho);

  if (opts.t_approx) {
    if (std::abs(rho) >= 1.0) {
      res.p_value = 0.0;
    } else {
      const double t = rho * std::sqrt((n - 2.0) / (1.0 - rho * rho));
      const boost::math::students_t dist(n - 2.0);
      res.p_value = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))));
    }
    return res;
  }

  if (opts.permutations == 0) throw DomainError("permutation count must be positive");
  RngStream rng(opts.seed, "spearman-permutation");
  std::vector<double> perm = ry;
  const double observed = std::abs(sxy);
  std::size_t extreme = 0;
  for (std::size_t k = 0; k < opts.permutations; ++k) {
    for (std::size_t i = perm.size() - 1; i > 0; --i) {
      std::swap(perm[i], perm[static_cast<std::size_t>(rng.below(i + 1))]);
    }
    const double s = std::abs(n * kernels::dot(rx, perm) - sx * sy);
    if (s >= observed) ++extreme;
  }
  res.p_value = static_cast<double>(extreme + 1) / static_cast<double>(opts.permutations + 1);
  return res;
}

std::vector<double> holm_adjust(std::span<const double> p) {
  std::vector<std::size_t> order(p.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p[a] < p[b]; });
  std::vector<double> out(p.size());
  double running = 0.0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const double adj = std::min(1.0, static_cast<double>(p.size() - k) * p[order[k]]);
    running = std::max(running, adj);
    out[order[k]] = running;
  }
  return out;
}

}  // namespace hsi::stats
