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
#include <functional>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hsi/config.hpp"
#include "hsi/sagat.hpp"
#include "hsi/sart.hpp"
#include "hsi/simulation.hpp"

namespace hsi {

inline constexpr int kLogSchemaVersion = 1;

// Thrown by an operator source when its console goes away.
class OperatorDisconnected : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SessionPhase : std::uint8_t { Live, Pause, Sart, Done };
std::string_view phase_name(SessionPhase p) noexcept;

// Where operator input comes from. Calls arrive on the session loop thread in
// tick order.
class OperatorSource {
 public:
  virtual ~OperatorSource() = default;
  virtual void begin(const Simulation& sim, std::span<const AlertMessage> initial_alerts);
  // Actions to apply while advancing to `tick`.
  virtual std::vector<OperatorAction> drain(std::int64_t tick) = 0;
  virtual void observe(const Simulation& sim, const TickOutput& out);
  virtual void pause_begin(int pause, std::span<const SagatQuery* const> queries);
  // `index` is 1-based within the pause.
  virtual SagatResponse answer(const SagatQuery& query, int index, const GroundTruth& truth,
                               const GridWorld& world) = 0;
  virtual void pause_end(int pause);
  virtual std::optional<std::array<int, 10>> sart() = 0;
  virtual void end(const Json& session_end);
};

// Scripted operator policy plus scripted SAGAT/SART respondent. Actions
// chosen after tick t are applied while advancing to t + 1.
class ScriptedSource : public OperatorSource {
 public:
  explicit ScriptedSource(const SessionConfig& config);
  void begin(const Simulation& sim, std::span<const AlertMessage> initial_alerts) override;
  std::vector<OperatorAction> drain(std::int64_t tick) override;
  void observe(const Simulation& sim, const TickOutput& out) override;
  SagatResponse answer(const SagatQuery& query, int index, const GroundTruth& truth,
                       const GridWorld& world) override;
  std::optional<std::array<int, 10>> sart() override;

 private:
  void react(const Simulation& sim, std::int64_t tick, std::span<const AlertMessage> alerts);

  ScriptedOperator operator_;
  ScriptedRespondent respondent_;
  std::vector<OperatorAction> pending_;
};

struct SessionReport {
  bool complete = false;
  std::int64_t final_tick = 0;
  MetricSample final_metrics;
  std::optional<SagatReport> sagat;  // absent when nothing was scored
  std::optional<SartScore> sart;
  int deactivated_count = 0;
  int trapped_count = 0;
  std::vector<std::int64_t> pause_ticks;
  int answers = 0;
  std::optional<double> mean_answer_latency_ms;
  ScoringConfig scoring;
};

Json report_to_json(const SessionReport& r);
SessionReport report_from_json(const Json& j);

// Receives finished log lines (without the trailing newline).
using LogSink = std::function<void(std::int64_t tick, const std::string& line)>;

struct SessionResult {
  SessionReport report;
  std::int64_t final_tick = 0;
  std::uint64_t final_hash = 0;
  std::uint64_t chain = 0;
};

// Runs one participant-task. The config is round-tripped through its JSON
// form first so a replay sees exactly the values a live run saw.
SessionResult run_session(const SessionConfig& config, OperatorSource& source, const LogSink& sink);

// Convenience wrappers writing a JSONL log.
SessionResult run_session(const SessionConfig& config, OperatorSource& source, std::ostream& log);
SessionResult run_scripted_session(const SessionConfig& config, std::ostream& log);

struct ReplayResult {
  bool complete = false;
  std::int64_t final_tick = 0;
  std::uint64_t final_hash = 0;
  std::size_t hashes_checked = 0;
  std::size_t lines_checked = 0;
};

// Re-executes the session from the header and the logged operator input and
// compares every regenerated line. Throws IntegrityError naming the first
// divergent tick.
ReplayResult replay_log(std::span<const std::string> lines);
ReplayResult replay_log(std::istream& in);

// Recomputes the report from logged answers, truths, SART ratings and the
// final snapshot under `scoring`; the simulation is not re-run.
SessionReport rescore_log(std::span<const std::string> lines, const ScoringConfig& scoring);
SessionReport rescore_log(std::span<const std::string> lines);  // original rubric

std::vector<std::string> read_lines(std::istream& in);

// Parsed view of one log record.
struct LogRecord {
  std::int64_t tick = 0;
  std::string type;
  Json payload;
};
LogRecord parse_record(const std::string& line);
// Header config of a log.
SessionConfig log_config(std::span<const std::string> lines);

}  // namespace hsi
