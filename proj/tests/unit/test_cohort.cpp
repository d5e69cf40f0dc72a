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
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hsi/cohort.hpp"
#include "hsi/error.hpp"
#include "hsi/session.hpp"

using namespace hsi;
namespace fs = std::filesystem;

namespace {

CohortRow row(std::string pid, HazardKind k, Attempt a, double ca, double sagat = 50.0) {
  CohortRow r;
  r.participant_id = std::move(pid);
  r.hazard = k;
  r.attempt = a;
  r.ca = r.na = r.naq1 = r.naq2 = ca;
  r.s_sagat = sagat;
  r.levels = {sagat, sagat, sagat};
  r.s_sart = 10.0;
  return r;
}

std::string pid(int i) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "S%03d", i);
  return buf;
}

fs::path scratch(const char* name) {
  const fs::path d = fs::temp_directory_path() / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_SUITE("cohort") {

TEST_CASE("one row per participant-task") {
  CohortTable t;
  for (int p = 1; p <= 31; ++p)
    for (HazardKind k : {HazardKind::Dis, HazardKind::Mov, HazardKind::Spr})
      for (Attempt a : {Attempt::A1, Attempt::A2}) t.add(row(pid(p), k, a, 3.0));
  CHECK(t.rows.size() == 186);
  CHECK(t.participants().size() == 31);
  CHECK_THROWS_AS(t.add(row(pid(4), HazardKind::Mov, Attempt::A2, 1.0)), IngestionError);
}

TEST_CASE("A2 projections") {
  CohortTable t;
  t.add(row("P1", HazardKind::Dis, Attempt::A2, 2.0));
  t.add(row("P1", HazardKind::Mov, Attempt::A2, 4.0));
  t.add(row("P1", HazardKind::Spr, Attempt::A2, 6.0));
  t.add(row("P1", HazardKind::Spr, Attempt::A1, 100.0));
  const auto m = m_a2_all(t, "CA");
  REQUIRE(m.size() == 1);
  CHECK(m[0].value == 4.0);
  const auto s = s_hazard_a2(t, HazardKind::Mov, "CA");
  REQUIRE(s.size() == 1);
  CHECK(s[0].value == 4.0);
  CHECK(column_value(t.rows[0], "L2") == 50.0);
  CHECK_FALSE(column_value(t.rows[0], "D").has_value());
}

TEST_CASE("empty cohorts are refused") {
  const fs::path d = scratch("hsi_cohort_empty");
  CohortTable t = build_cohort(d);
  CHECK(t.rows.empty());
  CHECK_THROWS_AS(experiment_reports(t), IngestionError);
  CHECK_THROWS_AS(build_cohort(d / "missing"), IngestionError);
  fs::remove_all(d);
}

TEST_CASE("a planted improvement is detected") {
  CohortTable t;
  for (int p = 1; p <= 10; ++p) {
    const double a1 = 5.0 + p;
    t.add(row(pid(p), HazardKind::Dis, Attempt::A1, a1));
    t.add(row(pid(p), HazardKind::Dis, Attempt::A2, a1 - 1.0));
  }
  const ExperimentReport r = experiment_reports(t);
  const ReportRow* ca = r.find("wilcoxon", "Dis", "CA");
  REQUIRE(ca != nullptr);
  CHECK(ca->direction == "decrease");
  CHECK(ca->p_value == doctest::Approx(2.0 / 1024.0));
  CHECK(ca->significant);
  CHECK(ca->a1->median == 10.5);
  CHECK(ca->a2->median == 9.5);
  const ReportRow* sagat = r.find("wilcoxon", "Dis", "S_SAGAT");
  REQUIRE(sagat != nullptr);
  CHECK(sagat->method == "degenerate");
  CHECK_FALSE(sagat->significant);
}

TEST_CASE("a planted monotone SA-TP relation gives rho = -1") {
  CohortTable t;
  for (int p = 1; p <= 8; ++p) {
    for (HazardKind k : {HazardKind::Dis, HazardKind::Mov, HazardKind::Spr}) {
      const double ca = p + 0.1 * static_cast<int>(k);
      t.add(row(pid(p), k, Attempt::A2, ca, 100.0 - 7.0 * ca));
    }
  }
  const ExperimentReport r = experiment_reports(t);
  for (const char* scope : {"M_A2_all", "S_Mov_A2"}) {
    const ReportRow* c = r.find("spearman", scope, "S_SAGAT", "CA");
    REQUIRE(c != nullptr);
    CHECK(c->statistic == -1.0);
    CHECK(c->strength == "strong");
    CHECK(c->significant);
  }
  // S_SART is constant across participants: flagged, not tabulated
  CHECK(r.find("spearman", "M_A2_all", "S_SART", "CA") == nullptr);
  CHECK(std::any_of(r.notices.begin(), r.notices.end(),
                    [](const std::string& n) { return n.find("S_SART") != std::string::npos; }));
}

TEST_CASE("small cohorts skip tests with a notice") {
  CohortTable t;
  for (int p = 1; p <= 2; ++p) {
    t.add(row(pid(p), HazardKind::Spr, Attempt::A1, p));
    t.add(row(pid(p), HazardKind::Spr, Attempt::A2, p + 1.0));
  }
  const ExperimentReport r = experiment_reports(t);
  CHECK(r.rows.empty());
  CHECK_FALSE(r.notices.empty());
  const std::string text = render_text(r);
  CHECK(text.find("n=2 < 3") != std::string::npos);
}

TEST_CASE("CSV layout is fixed") {
  CohortTable t;
  for (int p = 1; p <= 5; ++p) {
    t.add(row(pid(p), HazardKind::Spr, Attempt::A1, p));
    t.add(row(pid(p), HazardKind::Spr, Attempt::A2, p * 0.5, 20.0 * p));
  }
  const std::string csv = render_csv(experiment_reports(t));
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == kCsvHeader);
  const auto commas = std::count(line.begin(), line.end(), ',');
  int rows = 0;
  while (std::getline(in, line)) {
    CHECK(std::count(line.begin(), line.end(), ',') == commas);
    ++rows;
  }
  CHECK(rows > 0);
}

TEST_CASE("rows from logs, with worst-case imputation") {
  SessionConfig c;
  c.seed = 31;
  c.participant_id = "S007";
  c.hazard_kind = HazardKind::Spr;
  c.attempt = Attempt::A2;
  c.hazard.spr_spread_probability = 1.0;
  c.hazard.spr_spread_interval_s = 0.1;
  std::ostringstream out;
  run_scripted_session(c, out);
  std::istringstream in(out.str());
  const auto lines = read_lines(in);
  const CohortRow r = cohort_row_from_log(lines, "x.jsonl");
  CHECK(r.participant_id == "S007");
  CHECK(r.attempt == Attempt::A2);
  CHECK(r.all_deactivated);
  CHECK(r.ca == doctest::Approx(std::hypot(20.0, 20.0)));
  CHECK(r.s_sagat.has_value());
  CHECK(r.s_sart.has_value());

  const std::vector<std::string> partial(lines.begin(), lines.end() - 1);
  CHECK_THROWS_AS(cohort_row_from_log(partial), IngestionError);
  CHECK_THROWS_AS(cohort_row_from_log(std::vector<std::string>{}), IngestionError);
}

TEST_CASE("synthetic cohort end to end") {
  const fs::path d = scratch("hsi_cohort_synth");
  SyntheticCohortOptions o;
  o.participants = 3;
  const auto files = generate_synthetic_cohort(d, SessionConfig{}, o);
  CHECK(files.size() == 18);
  const CohortTable t = build_cohort(d);
  CHECK(t.rows.size() == 18);
  for (const auto& p : t.participants()) {
    for (HazardKind k : {HazardKind::Dis, HazardKind::Mov, HazardKind::Spr}) {
      const CohortRow* a1 = t.find(p, k, Attempt::A1);
      const CohortRow* a2 = t.find(p, k, Attempt::A2);
      REQUIRE(a1 != nullptr);
      REQUIRE(a2 != nullptr);
    }
  }
  const ExperimentReport r = experiment_reports(t);
  CHECK(r.cohort_rows == 18);
  CHECK(r.find("wilcoxon", "Spr", "CA") != nullptr);
  // duplicate participant-task files are rejected
  fs::copy_file(files.front(), d / "zz_copy.jsonl");
  CHECK_THROWS_AS(build_cohort(d), IngestionError);
  fs::remove_all(d);
}

}  // TEST_SUITE
