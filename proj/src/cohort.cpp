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

#include "hsi/cohort.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>

#include "hsi/error.hpp"
#include "hsi/session.hpp"

namespace hsi {

const std::vector<std::string>& tp_columns() {
  static const std::vector<std::string> cols{"CA", "NA", "NAQ1", "NAQ2"};
  return cols;
}

const std::vector<std::string>& sa_columns() {
  static const std::vector<std::string> cols{"S_SAGAT", "L1",   "L2",   "L3",   "Dim1", "Dim2", "Dim3", "Dim4",
                                             "Dim5",    "Dim6", "S_SART", "D", "S",    "U"};
  return cols;
}

std::optional<double> column_value(const CohortRow& row, std::string_view c) {
  if (c == "CA") return row.ca;
  if (c == "NA") return row.na;
  if (c == "NAQ1") return row.naq1;
  if (c == "NAQ2") return row.naq2;
  if (c == "S_SAGAT") return row.s_sagat;
  if (c == "S_SART") return row.s_sart;
  if (c == "D") return row.demand;
  if (c == "S") return row.supply;
  if (c == "U") return row.understanding;
  if (c.size() == 2 && c[0] == 'L' && c[1] >= '1' && c[1] <= '3') return row.levels[static_cast<std::size_t>(c[1] - '1')];
  if (c.size() == 4 && c.substr(0, 3) == "Dim" && c[3] >= '1' && c[3] <= '6') {
    return row.dimensions[static_cast<std::size_t>(c[3] - '1')];
  }
  throw DomainError("unknown cohort column '" + std::string(c) + "'");
}

void CohortTable::add(CohortRow row) {
  if (find(row.participant_id, row.hazard, row.attempt) != nullptr) {
    throw IngestionError("duplicate participant-task (" + row.participant_id + ", " +
                         std::string(hazard_kind_name(row.hazard)) + ", " + std::string(attempt_name(row.attempt)) +
                         ")" + (row.source.empty() ? "" : " in " + row.source));
  }
  rows.push_back(std::move(row));
}

std::vector<std::string> CohortTable::participants() const {
  std::vector<std::string> out;
  for (const CohortRow& r : rows) out.push_back(r.participant_id);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

const CohortRow* CohortTable::find(std::string_view participant, HazardKind hazard, Attempt attempt) const {
  for (const CohortRow& r : rows) {
    if (r.participant_id == participant && r.hazard == hazard && r.attempt == attempt) return &r;
  }
  return nullptr;
}

CohortRow cohort_row_from_log(std::span<const std::string> lines, std::string source) {
  const std::string where = source.empty() ? std::string("log") : source;
  if (lines.empty()) throw IngestionError(where + " is empty");
  SessionConfig config;
  SessionReport report;
  try {
    config = log_config(lines);
    const LogRecord end = parse_record(lines.back());
    if (end.type != "SessionEnd") throw IngestionError(where + " has no SessionEnd record");
    report = report_from_json(end.payload.at("report"));
  } catch (const SchemaError& e) {
    throw IngestionError(where + ": " + e.what());
  } catch (const ConfigError& e) {
    throw IngestionError(where + ": " + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw IngestionError(where + ": " + e.what());
  }
  if (!report.complete) throw IngestionError(where + " is an incomplete session");

  CohortRow row;
  row.participant_id = config.participant_id;
  row.hazard = config.hazard_kind;
  row.attempt = config.attempt;
  row.task_order_index = config.task_order_index;
  row.source = std::move(source);
  const MetricSample& m = report.final_metrics;
  row.all_deactivated = m.all_deactivated;
  if (m.all_deactivated) {
    const double worst = std::hypot(config.world.width * config.world.cell_size,
                                    config.world.height * config.world.cell_size);
    row.ca = row.na = row.naq1 = row.naq2 = worst;
  } else {
    row.ca = m.ca;
    row.na = m.na;
    row.naq1 = m.naq1;
    row.naq2 = m.naq2;
  }
  if (report.sagat) {
    row.s_sagat = report.sagat->overall;
    row.levels = report.sagat->level_means;
    row.dimensions = report.sagat->dimension_means;
  }
  if (report.sart) {
    row.s_sart = report.sart->total;
    row.demand = report.sart->demand;
    row.supply = report.sart->supply;
    row.understanding = report.sart->understanding;
    row.sart_ratings = report.sart->ratings;
  }
  return row;
}

CohortTable build_cohort(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw IngestionError("'" + dir.string() + "' is not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".jsonl") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  CohortTable t;
  for (const auto& f : files) {
    std::ifstream in(f);
    if (!in) throw IngestionError("cannot open '" + f.string() + "'");
    const auto lines = read_lines(in);
    t.add(cohort_row_from_log(lines, f.filename().string()));
  }
  return t;
}

namespace {

double sorted_mean(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

std::vector<Projected> m_a2_all(const CohortTable& t, std::string_view column) {
  std::vector<Projected> out;
  for (const std::string& p : t.participants()) {
    std::vector<double> vals;
    bool missing = false;
    for (const CohortRow& r : t.rows) {
      if (r.participant_id != p || r.attempt != Attempt::A2) continue;
      if (auto v = column_value(r, column)) {
        vals.push_back(*v);
      } else {
        missing = true;
      }
    }
    if (!vals.empty() && !missing) out.push_back({p, sorted_mean(vals)});
  }
  return out;
}

std::vector<Projected> s_hazard_a2(const CohortTable& t, HazardKind hazard, std::string_view column) {
  std::vector<Projected> out;
  for (const std::string& p : t.participants()) {
    if (const CohortRow* r = t.find(p, hazard, Attempt::A2)) {
      if (auto v = column_value(*r, column)) out.push_back({p, *v});
    }
  }
  return out;
}

const ReportRow* ExperimentReport::find(std::string_view section, std::string_view scope, std::string_view variable,
                                        std::string_view other) const {
  for (const ReportRow& r : rows) {
    if (r.section == section && r.scope == scope && r.variable == variable && (other.empty() || r.other == other)) {
      return &r;
    }
  }
  return nullptr;
}

namespace {

std::vector<HazardKind> hazards_present(const CohortTable& t) {
  std::vector<HazardKind> out;
  for (HazardKind k : {HazardKind::Dis, HazardKind::Mov, HazardKind::Spr}) {
    if (std::any_of(t.rows.begin(), t.rows.end(), [k](const CohortRow& r) { return r.hazard == k; })) out.push_back(k);
  }
  return out;
}

void correlate(ExperimentReport& rep, const std::string& scope,
               const std::function<std::vector<Projected>(std::string_view)>& project, const ReportOptions& opts) {
  for (const std::string& sa : sa_columns()) {
    const auto xs = project(sa);
    for (const std::string& tp : tp_columns()) {
      const auto ys = project(tp);
      std::map<std::string, double> ymap;
      for (const Projected& p : ys) ymap[p.participant_id] = p.value;
      std::vector<double> x, y;
      for (const Projected& p : xs) {
        if (auto it = ymap.find(p.participant_id); it != ymap.end()) {
          x.push_back(p.value);
          y.push_back(it->second);
        }
      }
      if (x.size() < 3) {
        rep.notices.push_back("skipped spearman " + scope + " " + sa + " vs " + tp + ": n=" +
                              std::to_string(x.size()) + " < 3");
        continue;
      }
      const stats::SpearmanResult s = stats::spearman(x, y, opts.spearman);
      if (!s.rho) {
        rep.notices.push_back("undefined spearman " + scope + " " + sa + " vs " + tp + ": constant input");
        continue;
      }
      ReportRow row;
      row.section = "spearman";
      row.scope = scope;
      row.variable = sa;
      row.other = tp;
      row.n = s.n;
      row.statistic = *s.rho;
      row.p_value = *s.p_value;
      row.method = std::string(stats::method_name(s.method));
      row.strength = std::string(stats::strength_name(s.strength));
      rep.rows.push_back(std::move(row));
    }
  }
}

}  // namespace

ExperimentReport experiment_reports(const CohortTable& cohort, const ReportOptions& opts) {
  if (cohort.rows.empty()) throw IngestionError("cohort is empty; nothing to analyze");
  ExperimentReport rep;
  rep.cohort_rows = cohort.rows.size();
  for (const CohortRow& r : cohort.rows) rep.imputed_rows += r.all_deactivated ? 1 : 0;
  const auto hazards = hazards_present(cohort);
  const auto participants = cohort.participants();

  // (a) attempt comparisons per hazard
  std::vector<std::string> columns = tp_columns();
  columns.insert(columns.end(), sa_columns().begin(), sa_columns().end());
  for (HazardKind k : hazards) {
    const std::string scope(hazard_kind_name(k));
    for (const std::string& c : columns) {
      std::vector<double> a1, a2;
      for (const std::string& p : participants) {
        const CohortRow* r1 = cohort.find(p, k, Attempt::A1);
        const CohortRow* r2 = cohort.find(p, k, Attempt::A2);
        if (r1 == nullptr || r2 == nullptr) continue;
        const auto v1 = column_value(*r1, c);
        const auto v2 = column_value(*r2, c);
        if (v1 && v2) {
          a1.push_back(*v1);
          a2.push_back(*v2);
        }
      }
      if (a1.size() < 3) {
        rep.notices.push_back("skipped wilcoxon " + scope + " " + c + ": n=" + std::to_string(a1.size()) + " < 3");
        continue;
      }
      const stats::TestResult t = stats::wilcoxon_paired(a1, a2);
      ReportRow row;
      row.section = "wilcoxon";
      row.scope = scope;
      row.variable = c;
      row.other = "A1 vs A2";
      row.n = a1.size();
      row.a1 = t.x;
      row.a2 = t.y;
      row.statistic = t.statistic;
      row.p_value = t.p_value;
      row.method = std::string(stats::method_name(t.method));
      row.direction = t.w_plus > t.w_minus ? "increase" : t.w_plus < t.w_minus ? "decrease" : "none";
      rep.rows.push_back(std::move(row));
    }
  }

  // (b) SA vs TP correlations
  correlate(rep, "M_A2_all", [&](std::string_view c) { return m_a2_all(cohort, c); }, opts);
  for (HazardKind k : hazards) {
    correlate(rep, "S_" + std::string(hazard_kind_name(k)) + "_A2",
              [&, k](std::string_view c) { return s_hazard_a2(cohort, k, c); }, opts);
  }

  // (c) significance, optionally Holm-adjusted within each section and scope
  std::map<std::pair<std::string, std::string>, std::vector<std::size_t>> families;
  for (std::size_t i = 0; i < rep.rows.size(); ++i) families[{rep.rows[i].section, rep.rows[i].scope}].push_back(i);
  for (const auto& [key, idx] : families) {
    std::vector<double> p;
    for (std::size_t i : idx) p.push_back(rep.rows[i].p_value);
    const std::vector<double> adj = opts.holm ? stats::holm_adjust(p) : p;
    for (std::size_t j = 0; j < idx.size(); ++j) {
      rep.rows[idx[j]].p_adjusted = adj[j];
      rep.rows[idx[j]].significant = adj[j] < opts.alpha;
    }
  }
  if (rep.imputed_rows > 0) {
    rep.notices.push_back(std::to_string(rep.imputed_rows) +
                          " participant-task(s) ended with every robot deactivated; TP set to the grid diagonal");
  }
  return rep;
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string p_text(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, p < 0.001 ? "%.2e" : "%.4f", p);
  return buf;
}

std::string summary_text(const std::optional<stats::Summary>& s) {
  if (!s) return "";
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.2f (IQR %.2f-%.2f)", s->median, s->q1, s->q3);
  return buf;
}

}  // namespace

std::string render_text(const ExperimentReport& r) {
  std::ostringstream out;
  out << "Cohort: " << r.cohort_rows << " participant-tasks";
  if (r.imputed_rows > 0) out << " (" << r.imputed_rows << " all-deactivated, TP imputed)";
  out << "\n";

  std::string current;
  for (const ReportRow& row : r.rows) {
    if (row.section != "wilcoxon") continue;
    if (row.scope != current) {
      current = row.scope;
      out << "\nWilcoxon paired tests, A1 vs A2, hazard " << current << "\n";
      out << std::left << std::setw(9) << "variable" << std::setw(4) << "n" << std::setw(28) << "A1 median"
          << std::setw(28) << "A2 median" << std::setw(9) << "W" << std::setw(11) << "p" << std::setw(8)
          << "method" << std::setw(10) << "change" << "sig\n";
    }
    out << std::left << std::setw(9) << row.variable << std::setw(4) << row.n << std::setw(28) << summary_text(row.a1)
        << std::setw(28) << summary_text(row.a2) << std::setw(9) << num(row.statistic) << std::setw(11)
        << p_text(row.p_adjusted) << std::setw(8) << row.method << std::setw(10) << row.direction
        << (row.significant ? "*" : "") << "\n";
  }
  current.clear();
  for (const ReportRow& row : r.rows) {
    if (row.section != "spearman") continue;
    if (row.scope != current) {
      current = row.scope;
      out << "\nSpearman correlations, " << current << "\n";
      out << std::left << std::setw(9) << "SA" << std::setw(6) << "TP" << std::setw(4) << "n" << std::setw(11)
          << "rho" << std::setw(11) << "p" << std::setw(10) << "strength" << "sig\n";
    }
    out << std::left << std::setw(9) << row.variable << std::setw(6) << row.other << std::setw(4) << row.n
        << std::setw(11) << num(row.statistic) << std::setw(11) << p_text(row.p_adjusted) << std::setw(10)
        << row.strength << (row.significant ? "*" : "") << "\n";
  }
  if (!r.notices.empty()) {
    out << "\nNotices\n";
    for (const std::string& n : r.notices) out << "  " << n << "\n";
  }
  return out.str();
}

std::string render_csv(const ExperimentReport& r) {
  std::ostringstream out;
  out << kCsvHeader << "\n";
  auto sum = [](const std::optional<stats::Summary>& s) {
    if (!s) return std::string(",,");
    return num(s->median) + "," + num(s->q1) + "," + num(s->q3);
  };
  for (const ReportRow& row : r.rows) {
    out << row.section << "," << row.scope << "," << row.variable << "," << row.other << "," << row.n << ","
        << sum(row.a1) << "," << sum(row.a2) << "," << num(row.statistic) << "," << num(row.p_value) << ","
        << num(row.p_adjusted) << "," << row.method << "," << row.strength << "," << row.direction << ","
        << (row.significant ? "true" : "false") << "\n";
  }
  for (const std::string& n : r.notices) {
    std::string text = n;
    std::replace(text.begin(), text.end(), ',', ';');
    out << "notice,,," << text << std::string(14, ',') << "\n";
  }
  return out.str();
}

std::vector<std::filesystem::path> generate_synthetic_cohort(const std::filesystem::path& dir,
                                                             const SessionConfig& base,
                                                             const SyntheticCohortOptions& opts) {
  if (opts.participants < 1) throw ConfigError("synthetic cohort needs at least one participant");
  if (!(opts.accuracy_lo >= 0.0 && opts.accuracy_lo <= opts.accuracy_hi && opts.accuracy_hi <= 1.0)) {
    throw ConfigError("accuracy range must satisfy 0 <= lo <= hi <= 1");
  }
  std::filesystem::create_directories(dir);
  RngStream rng(opts.seed, "synthetic-cohort");
  std::vector<std::filesystem::path> written;
  const std::array<HazardKind, 3> kinds{HazardKind::Dis, HazardKind::Mov, HazardKind::Spr};
  for (int p = 0; p < opts.participants; ++p) {
    char pid[16];
    std::snprintf(pid, sizeof pid, "S%03d", p + 1);
    const double accuracy = rng.uniform(opts.accuracy_lo, opts.accuracy_hi);
    std::array<HazardKind, 3> order1 = kinds, order2 = kinds;
    for (std::size_t i = 2; i > 0; --i) std::swap(order1[i], order1[rng.below(i + 1)]);
    do {
      for (std::size_t i = 2; i > 0; --i) std::swap(order2[i], order2[rng.below(i + 1)]);
    } while (order2 == order1);
    int index = 0;
    for (Attempt attempt : {Attempt::A1, Attempt::A2}) {
      for (HazardKind k : attempt == Attempt::A1 ? order1 : order2) {
        SessionConfig c = base;
        c.seed = rng.next_u64();
        c.participant_id = pid;
        c.hazard_kind = k;
        c.attempt = attempt;
        c.task_order_index = index++;
        c.policy.kind = PolicyKind::NoisyMarker;
        c.policy.accuracy = accuracy;
        c.policy.delay_ticks = opts.delay_ticks;
        c.respondent_correctness = accuracy;
        const auto path = dir / (std::string(pid) + "_" + std::string(hazard_kind_name(k)) + "_" +
                                 std::string(attempt_name(attempt)) + ".jsonl");
        std::ofstream out(path);
        if (!out) throw IngestionError("cannot write '" + path.string() + "'");
        run_scripted_session(c, out);
        written.push_back(path);
      }
    }
  }
  return written;
}

}  // namespace hsi
