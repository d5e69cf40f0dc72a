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

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hsi/config.hpp"
#include "hsi/stats.hpp"

namespace hsi {

struct CohortRow {
  std::string participant_id;
  HazardKind hazard = HazardKind::Dis;
  Attempt attempt = Attempt::A1;
  int task_order_index = 0;
  double ca = 0.0;
  double na = 0.0;
  double naq1 = 0.0;
  double naq2 = 0.0;
  bool all_deactivated = false;  // TP imputed to the grid diagonal
  std::optional<double> s_sagat;
  std::array<std::optional<double>, 3> levels;
  std::array<std::optional<double>, 6> dimensions;
  std::optional<double> s_sart;
  std::optional<double> demand;
  std::optional<double> supply;
  std::optional<double> understanding;
  std::optional<std::array<int, 10>> sart_ratings;
  std::string source;
};

// Column names: CA NA NAQ1 NAQ2 S_SAGAT L1 L2 L3 Dim1..Dim6 S_SART D S U.
const std::vector<std::string>& tp_columns();
const std::vector<std::string>& sa_columns();
std::optional<double> column_value(const CohortRow& row, std::string_view column);

struct CohortTable {
  std::vector<CohortRow> rows;

  // Rejects a second row for the same (participant, hazard, attempt).
  void add(CohortRow row);
  std::vector<std::string> participants() const;
  const CohortRow* find(std::string_view participant, HazardKind hazard, Attempt attempt) const;
};

// One row from a finished session log; the report is taken from SessionEnd.
CohortRow cohort_row_from_log(std::span<const std::string> lines, std::string source = {});
// Reads every *.jsonl file under `dir` in name order.
CohortTable build_cohort(const std::filesystem::path& dir);

struct Projected {
  std::string participant_id;
  double value = 0.0;
};
// Per-participant mean over that participant's A2 rows (M_A2_all).
std::vector<Projected> m_a2_all(const CohortTable& t, std::string_view column);
// The participant's single A2 row for one hazard (S_Hazard_A2).
std::vector<Projected> s_hazard_a2(const CohortTable& t, HazardKind hazard, std::string_view column);

struct ReportOptions {
  stats::SpearmanOptions spearman;
  bool holm = false;  // multiple-comparison correction, off by default
  double alpha = 0.05;
};

struct ReportRow {
  std::string section;  // "wilcoxon" | "spearman"
  std::string scope;    // hazard name, "M_A2_all" or "S_<hazard>_A2"
  std::string variable;
  std::string other;
  std::size_t n = 0;
  std::optional<stats::Summary> a1;
  std::optional<stats::Summary> a2;
  double statistic = 0.0;
  double p_value = 1.0;
  double p_adjusted = 1.0;
  std::string method;
  std::string strength;   // spearman only
  std::string direction;  // wilcoxon: increase/decrease/none
  bool significant = false;
};

struct ExperimentReport {
  std::vector<ReportRow> rows;
  std::vector<std::string> notices;
  std::size_t cohort_rows = 0;
  std::size_t imputed_rows = 0;

  const ReportRow* find(std::string_view section, std::string_view scope, std::string_view variable,
                        std::string_view other = {}) const;
};

ExperimentReport experiment_reports(const CohortTable& cohort, const ReportOptions& opts = {});

std::string render_text(const ExperimentReport& r);
// Columns: section,scope,variable,other,n,a1_median,a1_q1,a1_q3,a2_median,a2_q1,
// a2_q3,statistic,p_value,p_adjusted,method,strength,direction,significant
std::string render_csv(const ExperimentReport& r);
inline constexpr std::string_view kCsvHeader =
    "section,scope,variable,other,n,a1_median,a1_q1,a1_q3,a2_median,a2_q1,a2_q3,statistic,p_value,p_adjusted,"
    "method,strength,direction,significant";

struct SyntheticCohortOptions {
  int participants = 30;
  std::uint64_t seed = 2024;
  double accuracy_lo = 0.05;
  double accuracy_hi = 0.95;
  std::int64_t delay_ticks = 0;
};

// Scripted participants: each draws one accuracy used both by its
// noisy-marker policy and its SAGAT respondent, then runs three hazards in two
// attempts. Writes one log per participant-task into `dir`.
std::vector<std::filesystem::path> generate_synthetic_cohort(const std::filesystem::path& dir,
                                                             const SessionConfig& base,
                                                             const SyntheticCohortOptions& opts);

}  // namespace hsi
