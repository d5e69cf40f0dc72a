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

// Acceptance gate. Prints one PASS/FAIL line per criterion; with an argument,
// runs only the named criterion. Exit status is nonzero when any line fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <future>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hsi/cohort.hpp"
#include "hsi/config.hpp"
#include "hsi/error.hpp"
#include "hsi/gateway.hpp"
#include "hsi/hazards.hpp"
#include "hsi/metrics.hpp"
#include "hsi/sagat.hpp"
#include "hsi/sart.hpp"
#include "hsi/session.hpp"
#include "hsi/stats.hpp"
#include "hsi/swarm.hpp"
#include "hsi/world.hpp"

using namespace hsi;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---------------------------------------------------------------------------

Outcome pso_convergence() {
  int converged = 0, monotone = 0;
  double worst_na = 0.0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    WorldConfig wc;
    wc.obstacle_fraction = 0.0;
    RngStream wr(seed, "world");
    const GridWorld world = make_world(wc, wr);
    PsoParams p;
    RngStream sr(seed, "spawn");
    std::vector<RobotState> swarm = spawn_swarm(p, world, spawn_area(wc), sr);
    const RngStream rng(seed, "swarm");
    const CellSet none;
    bool mono = true;
    double best = max_pbest_fitness(swarm);
    for (std::int64_t t = 1; t <= 3000; ++t) {
      step_swarm(swarm, t, p, world, none, {}, rng);
      const double b = max_pbest_fitness(swarm);
      if (b < best) mono = false;
      best = b;
    }
    const MetricSample m = compute_metrics(swarm, world, 3000);
    worst_na = std::max(worst_na, m.na);
    converged += m.na < 2.0 * world.cell_size();
    monotone += mono;
  }
  return {converged >= 48 && monotone == 50,
          fmt("%d/50 runs end with NA < 2 cells (worst %.3f m); pbest monotone in %d/50", converged, worst_na,
              monotone)};
}

Outcome fitness_exactness() {
  RngStream r(7, "fitness");
  const GridWorld world(20, 20, 1.0, {}, {10.5, 10.5});
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double power = r.uniform(1.0, 1000.0);
    const double d = i < 10 ? r.uniform(0.0, 0.01) : r.uniform(0.0, 15.0);
    const double th = r.uniform(0.0, 2.0 * M_PI);
    const Vec2 pos{10.5 + d * std::cos(th), 10.5 + d * std::sin(th)};
    const double dd = std::hypot(pos.x - 10.5, pos.y - 10.5);
    const double m = std::max(dd, 0.01);
    const double want = power / (m * m);
    worst = std::max(worst, std::abs(fitness(pos, world, power, 0.01) - want) / want);
  }
  return {worst <= 1e-12, fmt("worst relative error %.2e over 100 pairs", worst)};
}

Outcome sart_exactness() {
  int bad = 0, lo = 100, hi = -100;
  for (int d = 1; d <= 7; ++d) {
    for (int s = 1; s <= 7; ++s) {
      for (int u = 1; u <= 7; ++u) {
        const std::vector<int> ratings{d, d, d, s, s, s, s, u, u, u};
        const SartScore sc = score_sart(ratings);
        const int want = 3 * u - (3 * d - 4 * s);
        bad += sc.total != want || sc.demand != 3 * d || sc.supply != 4 * s || sc.understanding != 3 * u;
        lo = std::min(lo, sc.total);
        hi = std::max(hi, sc.total);
      }
    }
  }
  const int min_total = score_sart(std::vector<int>{7, 7, 7, 1, 1, 1, 1, 1, 1, 1}).total;
  const int max_total = score_sart(std::vector<int>{1, 1, 1, 7, 7, 7, 7, 7, 7, 7}).total;
  return {bad == 0 && lo == -14 && hi == 46 && min_total == -14 && max_total == 46,
          fmt("%d/343 mismatches; observed range [%d, %d]", bad, lo, hi)};
}

Outcome sagat_aggregation() {
  RngStream r(11, "sagat");
  std::mt19937_64 shuffler(11);
  double worst_overall = 0.0, worst_perm = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<ScoredItem> items(1 + r.below(28));
    for (std::size_t i = 0; i < items.size(); ++i) {
      items[i].query_id = "Q" + std::to_string(i);
      items[i].level = static_cast<SaLevel>(1 + r.below(3));
      items[i].dimension = 1 + static_cast<int>(r.below(6));
      if (i == 0 || r.uniform() < 0.85) items[i].score = r.uniform() < 0.5 ? 100.0 * r.uniform() : 100.0 * r.below(2);
    }
    double sum = 0.0;
    int n = 0;
    for (const auto& it : items) {
      if (it.score) {
        sum += *it.score;
        ++n;
      }
    }
    const SagatReport a = aggregate_sagat(items);
    worst_overall = std::max(worst_overall, std::abs(a.overall - sum / n));
    std::shuffle(items.begin(), items.end(), shuffler);
    const SagatReport b = aggregate_sagat(items);
    for (std::size_t l = 0; l < 3; ++l) {
      if (a.level_means[l].has_value() != b.level_means[l].has_value()) worst_perm = 1e9;
      if (a.level_means[l]) worst_perm = std::max(worst_perm, std::abs(*a.level_means[l] - *b.level_means[l]));
    }
    for (std::size_t d = 0; d < 6; ++d) {
      if (a.dimension_means[d].has_value() != b.dimension_means[d].has_value()) worst_perm = 1e9;
      if (a.dimension_means[d]) {
        worst_perm = std::max(worst_perm, std::abs(*a.dimension_means[d] - *b.dimension_means[d]));
      }
    }
  }

  const QueryBank bank = default_query_bank();
  const SagatQuery* cmq = nullptr;
  for (const auto& q : bank.queries) {
    if (q.kind == QueryKind::CMQ) {
      cmq = &q;
      break;
    }
  }
  double worst_f1 = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    // Cells drawn from a 6x6 corner so the sets overlap often.
    bool m[6][6] = {}, t[6][6] = {};
    CellSet marked, truth;
    const auto nm = r.below(10), nt = 1 + r.below(9);
    for (std::uint64_t k = 0; k < nm; ++k) {
      const int c = static_cast<int>(r.below(6)), w = static_cast<int>(r.below(6));
      m[c][w] = true;
      marked.insert({c, w});
    }
    for (std::uint64_t k = 0; k < nt; ++k) {
      const int c = static_cast<int>(r.below(6)), w = static_cast<int>(r.below(6));
      t[c][w] = true;
      truth.insert({c, w});
    }
    int both = 0, nmark = 0, ntruth = 0;
    for (int c = 0; c < 6; ++c) {
      for (int w = 0; w < 6; ++w) {
        both += m[c][w] && t[c][w];
        nmark += m[c][w];
        ntruth += t[c][w];
      }
    }
    const double want = 100.0 * 2.0 * both / (nmark + ntruth);
    GroundTruth g;
    g.kind = QueryKind::CMQ;
    g.cells = truth;
    const auto got = score_response(*cmq, SagatAnswer{marked}, g, {CmqRule::F1, IdkMode::Zero});
    worst_f1 = std::max(worst_f1, got ? std::abs(*got - want) : 1e9);
  }
  return {worst_overall <= 1e-12 && worst_perm <= 1e-12 && worst_f1 <= 1e-12,
          fmt("overall error %.1e, permutation drift %.1e (200 sets); F1 error %.1e (500 pairs)", worst_overall,
              worst_perm, worst_f1)};
}

Outcome metrics_oracle() {
  RngStream r(13, "metrics");
  double worst = 0.0;
  int order_violations = 0, flag_errors = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Vec2 target{r.uniform(0.0, 20.0), r.uniform(0.0, 20.0)};
    const GridWorld world(20, 20, 1.0, {}, target);
    std::vector<RobotState> swarm(1 + r.below(30));
    for (std::size_t i = 0; i < swarm.size(); ++i) {
      swarm[i].id = static_cast<int>(i);
      swarm[i].position = {r.uniform(0.0, 20.0), r.uniform(0.0, 20.0)};
      if (r.uniform() < 0.3) swarm[i].status = RobotStatus::Deactivated;
    }
    std::vector<double> d;
    double cx = 0.0, cy = 0.0;
    for (const auto& rb : swarm) {
      if (!rb.active()) continue;
      d.push_back(std::hypot(rb.position.x - target.x, rb.position.y - target.y));
      cx += rb.position.x;
      cy += rb.position.y;
    }
    const MetricSample s = compute_metrics(swarm, world, trial, NaqMode::PrefixMean);
    if (d.empty()) {
      flag_errors += !s.all_deactivated;
      continue;
    }
    flag_errors += s.all_deactivated;
    std::sort(d.begin(), d.end());
    const std::size_t n = d.size(), k1 = (n + 3) / 4, k2 = (n + 1) / 2;
    const double naq1 = std::accumulate(d.begin(), d.begin() + k1, 0.0) / k1;
    const double naq2 = std::accumulate(d.begin(), d.begin() + k2, 0.0) / k2;
    const double ca = std::hypot(cx / n - target.x, cy / n - target.y);
    for (double e : {s.ca - ca, s.na - d[0], s.naq1 - naq1, s.naq2 - naq2}) worst = std::max(worst, std::abs(e));
    order_violations += !(s.na <= s.naq1 && s.naq1 <= s.naq2);
  }
  return {worst <= 1e-9 && order_violations == 0 && flag_errors == 0,
          fmt("worst error %.1e over 1000 swarms; %d ordering violations", worst, order_violations)};
}

Outcome hazard_invariants() {
  int violations = 0;
  std::string first;
  auto fail = [&](const std::string& what) {
    if (violations++ == 0) first = what;
  };
  for (HazardKind kind : {HazardKind::Dis, HazardKind::Mov, HazardKind::Spr}) {
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
      WorldConfig wc;
      RngStream wr(seed, "world");
      const GridWorld world = make_world(wc, wr);
      const HazardParams p = HazardTiming{}.to_params(kind, 0.1);
      HazardField f = HazardField::create(kind, p, world, RngStream(seed, "hazards"), spawn_area(wc));
      // Cell set rebuilt from the event stream, plus the activation tick of each Dis cell.
      CellSet from_events;
      std::map<CellIndex, std::int64_t> activated_at;
      for (CellIndex c : f.initial_event().activated) from_events.insert(c);
      const std::size_t mov_size = f.active_cells().size();
      CellSet prev = f.active_cells();
      const std::string tag = std::string(hazard_kind_name(kind)) + " seed " + std::to_string(seed);
      for (std::int64_t t = 1; t <= 3000; ++t) {
        const HazardStepResult out = f.step(t, world);
        std::set<CellIndex> cleared_now;
        for (const HazardEvent& e : out.events) {
          for (CellIndex c : e.cleared) {
            from_events.erase(c);
            cleared_now.insert(c);
          }
          for (CellIndex c : e.activated) {
            from_events.insert(c);
            activated_at[c] = t;
          }
        }
        const CellSet& now = f.active_cells();
        if (now != from_events) fail(tag + ": events disagree with the active set");
        for (CellIndex c : now) {
          if (world.is_obstacle(c)) fail(tag + ": hazard on a static obstacle");
        }
        if (kind == HazardKind::Spr && !std::includes(now.begin(), now.end(), prev.begin(), prev.end())) {
          fail(tag + ": spreading set shrank");
        }
        if (kind == HazardKind::Mov && (now.size() != mov_size || mov_size != 4u)) fail(tag + ": footprint size changed");
        if (kind == HazardKind::Dis) {
          for (CellIndex c : cleared_now) {
            if (t - activated_at.at(c) != p.dis_duration_ticks && !(activated_at.at(c) == t)) {
              fail(tag + ": cell cleared before its duration");
            }
          }
          for (const auto& [c, at] : activated_at) {
            if (at + p.dis_duration_ticks == t && at != t && !cleared_now.contains(c)) {
              fail(tag + ": cell outlived its duration");
            }
          }
        }
        prev = now;
      }
    }
  }
  return {violations == 0, violations == 0 ? std::string("300 runs x 3000 ticks, no violations")
                                            : fmt("%d violations; first: %s", violations, first.c_str())};
}

SessionConfig scripted_config(std::uint64_t seed) {
  SessionConfig c;
  c.seed = seed;
  c.hazard_kind = static_cast<HazardKind>(seed % 3);
  c.participant_id = "P" + std::to_string(seed);
  switch (seed % 4) {
    case 0: c.policy.kind = PolicyKind::Passive; break;
    case 1: c.policy.kind = PolicyKind::OracleMarker; break;
    case 2:
      c.policy.kind = PolicyKind::NoisyMarker;
      c.policy.accuracy = 0.6;
      c.policy.delay_ticks = 5;
      break;
    default: c.policy.kind = PolicyKind::RandomSwiper; c.policy.swipe_interval_ticks = 40; break;
  }
  return c;
}

std::vector<std::string> scripted_log(const SessionConfig& c) {
  std::ostringstream log;
  run_scripted_session(c, log);
  std::istringstream in(log.str());
  return read_lines(in);
}

Outcome deactivation_semantics() {
  int logs = 0, snapshots = 0, violations = 0, deaths = 0;
  std::string first;
  auto fail = [&](const std::string& what) {
    if (violations++ == 0) first = what;
  };
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    SessionConfig c = scripted_config(seed);
    // Faster hazards so more robots die.
    c.hazard.spr_spread_probability = 0.6;
    c.hazard.dis_cells_per_event = 6;
    const std::vector<std::string> lines = scripted_log(c);
    const GridWorld grid(c.world.width, c.world.height, c.world.cell_size, {}, {0.0, 0.0});
    CellSet hazard;
    std::map<int, Vec2> dead;  // id -> frozen position
    ++logs;
    for (const std::string& line : lines) {
      const LogRecord rec = parse_record(line);
      if (rec.type == "HazardEvent") {
        for (const Json& j : rec.payload.at("cleared")) hazard.erase({j[0].get<int>(), j[1].get<int>()});
        for (const Json& j : rec.payload.at("activated")) hazard.insert({j[0].get<int>(), j[1].get<int>()});
      } else if (rec.type == "RobotSnapshot") {
        ++snapshots;
        const Json& p = rec.payload;
        std::set<int> deact;
        for (const Json& id : p.at("deactivated")) deact.insert(id.get<int>());
        const std::string at = " (seed " + std::to_string(seed) + ", tick " + std::to_string(rec.tick) + ")";
        for (std::size_t i = 0; i < p.at("id").size(); ++i) {
          const int id = p["id"][i].get<int>();
          const Vec2 pos{p["x"][i].get<double>(), p["y"][i].get<double>()};
          const bool in_hazard = hazard.contains(grid.cell_of(pos));
          if (in_hazard && !deact.contains(id)) fail("active robot in a hazardous cell" + at);
          if (dead.contains(id) && !deact.contains(id)) fail("deactivated robot came back" + at);
          if (dead.contains(id) && !(dead[id] == pos)) fail("deactivated robot moved" + at);
          if (!dead.contains(id) && deact.contains(id)) {
            if (!in_hazard) fail("robot deactivated outside any hazard" + at);
            dead[id] = pos;
          }
        }
      }
    }
    deaths += static_cast<int>(dead.size());
  }
  // A run set with no deaths would pass vacuously.
  if (deaths == 0) fail("no robot was deactivated in any log");
  return {violations == 0, violations == 0 ? fmt("%d logs, %d snapshots, %d deactivations, no violations", logs,
                                                 snapshots, deaths)
                                            : fmt("%d violations; first: %s", violations, first.c_str())};
}

Outcome replay_determinism() {
  int reproduced = 0, flips = 0, detected = 0;
  std::size_t hashes = 0;
  std::string miss;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const std::vector<std::string> lines = scripted_log(scripted_config(seed));
    const std::size_t want = std::count_if(lines.begin(), lines.end(),
                                           [](const std::string& l) { return parse_record(l).type == "StateHash"; });
    try {
      const ReplayResult r = replay_log(lines);
      if (r.complete && r.hashes_checked == want) ++reproduced;
      hashes += r.hashes_checked;
    } catch (const std::exception&) {
    }

    std::string bytes;
    for (const auto& l : lines) bytes += l + "\n";
    RngStream r(seed, "flips");
    std::vector<std::size_t> positions{0, bytes.size() - 1, bytes.size() - 2};
    for (int k = 0; k < 9; ++k) positions.push_back(r.below(bytes.size()));
    for (std::size_t pos : positions) {
      std::string tampered = bytes;
      tampered[pos] = static_cast<char>(static_cast<unsigned char>(tampered[pos]) ^ (1 + r.below(255)));
      std::istringstream in(tampered);
      ++flips;
      try {
        const ReplayResult rr = replay_log(in);
        if (!rr.complete) ++detected;  // reported as an unfinished log
        else if (miss.empty()) miss = fmt("seed %llu byte %zu", static_cast<unsigned long long>(seed), pos);
      } catch (const std::exception&) {
        ++detected;
      }
    }
  }
  return {reproduced == 20 && detected == flips,
          fmt("%d/20 sessions reproduce all %zu state hashes; %d/%d byte flips detected%s%s", reproduced, hashes,
              detected, flips, miss.empty() ? "" : "; missed ", miss.c_str())};
}

double enumerate_wilcoxon(const std::vector<double>& d) {
  std::vector<double> a;
  for (double v : d) {
    if (v != 0.0) a.push_back(v);
  }
  const std::size_t n = a.size();
  // Mid-ranks of |d| by sorting.
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](auto i, auto j) { return std::abs(a[i]) < std::abs(a[j]); });
  std::vector<double> rank(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && std::abs(a[idx[j]]) == std::abs(a[idx[i]])) ++j;
    for (std::size_t k = i; k < j; ++k) rank[idx[k]] = (i + 1 + j) / 2.0;
    i = j;
  }
  const double total = n * (n + 1) / 2.0;
  double wplus = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] > 0) wplus += rank[i];
  }
  const double observed = std::min(wplus, total - wplus);
  std::size_t extreme = 0;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    double w = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1) w += rank[i];
    }
    extreme += std::min(w, total - w) <= observed + 1e-9;
  }
  return static_cast<double>(extreme) / static_cast<double>(std::size_t{1} << n);
}

Outcome wilcoxon_oracle() {
  RngStream r(17, "wilcoxon");
  int checked = 0, mismatches = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + r.below(12);
    std::vector<double> x(n, 0.0), d(n);
    for (double& v : d) v = trial % 2 ? r.uniform(-5.0, 5.0) : static_cast<double>(static_cast<int>(r.below(9)) - 4);
    const stats::TestResult t = stats::wilcoxon_paired(x, d);
    if (t.method == stats::Method::Degenerate) continue;  // every difference was zero
    ++checked;
    const double want = enumerate_wilcoxon(d);
    const double err = std::abs(t.p_value - want);
    worst = std::max(worst, err);
    mismatches += t.method != stats::Method::Exact || err > 1e-12;
  }
  const double p123 = stats::wilcoxon_paired(std::vector<double>{0, 0, 0}, std::vector<double>{1, 2, 3}).p_value;
  return {mismatches == 0 && checked >= 150 && p123 == 0.25,
          fmt("%d/%d vectors match enumeration (worst %.1e); d=[1,2,3] gives p=%.17g", checked - mismatches, checked,
              worst, p123)};
}

Outcome spearman_checks() {
  RngStream r(19, "spearman");
  int monotone_ok = 0;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(3 + r.below(30)), y(x.size()), z(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = r.uniform(-10.0, 10.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
      y[i] = std::exp(x[i] / 3.0) + 2.0;
      z[i] = -x[i] * x[i] * x[i];
    }
    const auto up = stats::spearman(x, y), down = stats::spearman(x, z);
    monotone_ok += up.rho && down.rho && *up.rho == 1.0 && *down.rho == -1.0;
  }
  // Mid-ranks of x are [1, 2.5, 2.5, 4]; y ranks are [1, 2, 3, 4]; both means are 2.5.
  const double sxy = (-1.5) * (-1.5) + 0.0 * (-0.5) + 0.0 * 0.5 + 1.5 * 1.5;
  const double sxx = 1.5 * 1.5 * 2, syy = 1.5 * 1.5 * 2 + 0.5 * 0.5 * 2;
  const double tie_want = sxy / std::sqrt(sxx * syy);
  const double tie = *stats::spearman(std::vector<double>{1, 2, 2, 3}, std::vector<double>{1, 2, 3, 4}).rho;
  const double tie_err = std::abs(tie - tie_want);

  double drift = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> x(8 + r.below(20)), y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      x[i] = r.uniform();
      y[i] = 0.3 * x[i] + r.uniform();
    }
    const auto a = stats::spearman(x, y, {10000, 100 + static_cast<std::uint64_t>(trial), false});
    const auto b = stats::spearman(x, y, {20000, 200 + static_cast<std::uint64_t>(trial), false});
    drift = std::max(drift, std::abs(*a.p_value - *b.p_value));
  }
  return {monotone_ok == 50 && tie_err <= 1e-12 && drift <= 0.01,
          fmt("monotone %d/50; tie case error %.1e; max p drift 10k vs 20k permutations %.4f", monotone_ok, tie_err,
              drift)};
}

Outcome pipeline() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / fmt("hsi_acceptance_%llu", static_cast<unsigned long long>(
                                                                                  std::random_device{}()));
  fs::create_directories(dir);
  SyntheticCohortOptions opts;
  opts.participants = 30;
  generate_synthetic_cohort(dir, SessionConfig{}, opts);
  const CohortTable cohort = build_cohort(dir);
  const ExperimentReport rep = experiment_reports(cohort);
  fs::remove_all(dir);
  const ReportRow* row = rep.find("spearman", "M_A2_all", "S_SAGAT", "CA");
  if (row == nullptr) return {false, "no M_A2_all S_SAGAT vs CA row in the report"};
  std::string others;
  for (const char* scope : {"S_Dis_A2", "S_Mov_A2", "S_Spr_A2"}) {
    if (const ReportRow* o = rep.find("spearman", scope, "S_SAGAT", "CA")) {
      others += fmt("; %s rho %.3f p %.4f", scope, o->statistic, o->p_value);
    }
  }
  return {row->p_value < 0.05 && row->statistic < -0.5,
          fmt("M_A2_all S_SAGAT vs CA: n %zu rho %.3f p %.4f%s", row->n, row->statistic, row->p_value,
              others.c_str())};
}

// Every [c,r] and (c,r) spelling of a cell, as it would appear in a frame.
std::vector<std::string> spellings(CellIndex c) {
  return {fmt("[%d,%d]", c.col, c.row), fmt("(%d,%d)", c.col, c.row), fmt("(%d, %d)", c.col, c.row)};
}

Outcome information_barrier() {
  using namespace std::chrono_literals;
  int traces = 0, frames = 0, leaks = 0, echo_errors = 0;
  std::string first;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    SessionConfig c = scripted_config(seed);
    Listener listener("127.0.0.1", 0);
    std::ostringstream log;
    GatewayOptions gopts;
    gopts.time_scale = 0.0;
    auto fut = std::async(std::launch::async, [&] { return serve(c, listener, log, gopts, 10s); });
    ConsoleTrace trace;
    {
      FramedSocket sock = FramedSocket::connect("127.0.0.1", listener.port());
      ScriptedConsoleOptions copts;
      copts.mark_alerts = seed % 2 == 1;
      trace = run_scripted_console(sock, copts);
      sock.shutdown();
    }
    fut.get();
    std::istringstream in(log.str());
    CellSet truth;
    for (const std::string& line : read_lines(in)) {
      const LogRecord rec = parse_record(line);
      if (rec.type != "HazardEvent") continue;
      for (const Json& j : rec.payload.at("activated")) truth.insert({j[0].get<int>(), j[1].get<int>()});
    }
    ++traces;
    CellSet alerted;
    for (const std::string& frame : trace.frames) {
      ++frames;
      Json j = Json::parse(frame);
      if (j.contains("alerts")) {
        for (const Json& a : j["alerts"]) {
          for (const Json& cell : a.at("cells")) alerted.insert({cell[0].get<int>(), cell[1].get<int>()});
        }
        j.erase("alerts");
      }
      if (j.contains("marked")) {
        // The echo of the operator's own marks; it may only hold cells the
        // console learned from alerts.
        for (const Json& cell : j["marked"]) {
          echo_errors += !alerted.contains({cell[0].get<int>(), cell[1].get<int>()});
        }
        j.erase("marked");
      }
      const std::string rest = j.dump();
      for (CellIndex cell : truth) {
        for (const std::string& s : spellings(cell)) {
          if (rest.find(s) != std::string::npos) {
            if (leaks++ == 0) first = s + " in " + rest.substr(0, 80);
          }
        }
      }
    }
  }
  return {leaks == 0 && echo_errors == 0 && traces == 10,
          leaks == 0 && echo_errors == 0
              ? fmt("%d traces, %d frames scanned, no ground-truth cells outside alerts", traces, frames)
              : fmt("%d leaks, %d echo errors; first: %s", leaks, echo_errors, first.c_str())};
}

struct Criterion {
  const char* name;
  Outcome (*run)();
};

const Criterion kCriteria[] = {
    {"pso-convergence", pso_convergence},
    {"fitness-exactness", fitness_exactness},
    {"sart-exactness", sart_exactness},
    {"sagat-aggregation", sagat_aggregation},
    {"metrics-oracle", metrics_oracle},
    {"hazard-invariants", hazard_invariants},
    {"deactivation-semantics", deactivation_semantics},
    {"replay-determinism", replay_determinism},
    {"wilcoxon-oracle", wilcoxon_oracle},
    {"spearman", spearman_checks},
    {"pipeline-end-to-end", pipeline},
    {"information-barrier", information_barrier},
};

}  // namespace

int main(int argc, char** argv) {
  const std::string only = argc > 1 ? argv[1] : "";
  int failed = 0, ran = 0;
  for (const Criterion& c : kCriteria) {
    if (!only.empty() && only != c.name) continue;
    ++ran;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s  %-23s %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  if (ran == 0) {
    std::fprintf(stderr, "unknown criterion: %s\n", only.c_str());
    return 2;
  }
  return failed == 0 ? 0 : 1;
}
