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

#include "hsi/session.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <deque>
#include <istream>
#include <map>
#include <ostream>

#include "hsi/error.hpp"

namespace hsi {

std::string_view phase_name(SessionPhase p) noexcept {
  switch (p) {
    case SessionPhase::Live: return "live";
    case SessionPhase::Pause: return "pause";
    case SessionPhase::Sart: return "sart";
    case SessionPhase::Done: return "done";
  }
  return "?";
}

void OperatorSource::begin(const Simulation&, std::span<const AlertMessage>) {}
void OperatorSource::observe(const Simulation&, const TickOutput&) {}
void OperatorSource::pause_begin(int, std::span<const SagatQuery* const>) {}
void OperatorSource::pause_end(int) {}
void OperatorSource::end(const Json&) {}

ScriptedSource::ScriptedSource(const SessionConfig& config)
    : operator_(config.policy, RngStream(config.seed, "policy")),
      respondent_(config.respondent_correctness, RngStream(config.seed, "respondent")) {}

void ScriptedSource::react(const Simulation& sim, std::int64_t tick, std::span<const AlertMessage> alerts) {
  OperatorView view;
  view.tick = tick;
  view.robots = sim.swarm();
  view.marked = &sim.marked();
  view.new_alerts = alerts;
  view.bounds = sim.world().bounds();
  auto acts = operator_.act(view);
  pending_.insert(pending_.end(), acts.begin(), acts.end());
}

void ScriptedSource::begin(const Simulation& sim, std::span<const AlertMessage> initial_alerts) {
  react(sim, 0, initial_alerts);
}

std::vector<OperatorAction> ScriptedSource::drain(std::int64_t tick) {
  std::vector<OperatorAction> out;
  out.swap(pending_);
  for (OperatorAction& a : out) a.tick = tick;
  return out;
}

void ScriptedSource::observe(const Simulation& sim, const TickOutput& out) { react(sim, out.tick, out.alerts); }

SagatResponse ScriptedSource::answer(const SagatQuery& query, int, const GroundTruth& truth,
                                     const GridWorld& world) {
  return respondent_.respond(query, truth, world);
}

std::optional<std::array<int, 10>> ScriptedSource::sart() { return respondent_.sart_ratings(); }

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

constexpr std::uint64_t kChainSeed = 0x6873692d6c6f6721ULL;

class LogWriter {
 public:
  explicit LogWriter(const LogSink& sink) : sink_(sink) {}

  void emit(std::int64_t tick, std::string_view type, Json payload) {
    Json rec{{"tick", tick}, {"type", type}, {"payload", std::move(payload)}};
    const std::string line = rec.dump();
    sink_(tick, line);
    chain_ = hash_combine(chain_, fnv1a64(line));
  }

  std::uint64_t chain() const noexcept { return chain_; }

 private:
  const LogSink& sink_;
  std::uint64_t chain_ = kChainSeed;
};

struct LoggedAnswer {
  const SagatQuery* query = nullptr;
  SagatAnswer answer;
  GroundTruth truth;
  double latency_ms = 0.0;
};

struct ReportInputs {
  bool complete = false;
  std::int64_t final_tick = 0;
  std::vector<LoggedAnswer> answers;
  std::optional<std::array<int, 10>> sart;
  RobotSnapshotData final_snapshot;
  std::vector<std::int64_t> pause_ticks;
};

double sorted_sum(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

SessionReport build_report(const ReportInputs& in, const GridWorld& world, const SessionConfig& config,
                           const ScoringConfig& scoring) {
  SessionReport r;
  r.complete = in.complete;
  r.final_tick = in.final_tick;
  r.scoring = scoring;
  r.pause_ticks = in.pause_ticks;

  std::vector<RobotState> robots;
  for (const RobotRow& row : in.final_snapshot.robots) {
    RobotState s;
    s.id = row.id;
    s.position = row.position;
    s.velocity = row.velocity;
    s.status = row.deactivated ? RobotStatus::Deactivated : RobotStatus::Active;
    robots.push_back(s);
  }
  r.trapped_count = static_cast<int>(in.final_snapshot.trapped.size());
  r.final_metrics = compute_metrics(robots, world, in.final_tick, config.metrics.naq_mode, r.trapped_count);
  r.deactivated_count = r.final_metrics.deactivated_count;

  std::vector<ScoredItem> items;
  std::vector<double> latencies;
  bool any_scored = false;
  for (const LoggedAnswer& a : in.answers) {
    ScoredItem it;
    it.query_id = a.query->id;
    it.level = a.query->level;
    it.dimension = a.query->dimension;
    it.score = score_response(*a.query, a.answer, a.truth, scoring);
    any_scored = any_scored || it.score.has_value();
    items.push_back(std::move(it));
    latencies.push_back(a.latency_ms);
  }
  r.answers = static_cast<int>(items.size());
  if (any_scored) r.sagat = aggregate_sagat(items);
  if (!latencies.empty()) r.mean_answer_latency_ms = sorted_sum(latencies) / static_cast<double>(latencies.size());
  if (in.sart) r.sart = score_sart(*in.sart);
  return r;
}

Json opt_json(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

Json report_to_json(const SessionReport& r) {
  Json metrics = to_json(r.final_metrics);
  Json pauses = Json::array();
  for (auto t : r.pause_ticks) pauses.push_back(t);
  return {{"complete", r.complete},
          {"final_tick", r.final_tick},
          {"metrics", metrics},
          {"sagat", r.sagat ? to_json(*r.sagat) : Json(nullptr)},
          {"sart", r.sart ? to_json(*r.sart) : Json(nullptr)},
          {"deactivated", r.deactivated_count},
          {"trapped", r.trapped_count},
          {"pause_ticks", pauses},
          {"answers", r.answers},
          {"mean_answer_latency_ms", opt_json(r.mean_answer_latency_ms)},
          {"scoring", scoring_to_json(r.scoring)}};
}

SessionReport report_from_json(const Json& j) {
  try {
    SessionReport r;
    r.complete = j.at("complete").get<bool>();
    r.final_tick = j.at("final_tick").get<std::int64_t>();
    r.final_metrics = metric_from_json(j.at("metrics"), r.final_tick);
    if (!j.at("sagat").is_null()) r.sagat = sagat_report_from_json(j.at("sagat"));
    if (!j.at("sart").is_null()) {
      std::array<int, 10> ratings{};
      const Json& rj = j.at("sart").at("ratings");
      for (std::size_t i = 0; i < kSartConstructs.size(); ++i) {
        ratings[i] = rj.at(std::string(kSartConstructs[i])).get<int>();
      }
      r.sart = score_sart(ratings);
    }
    r.deactivated_count = j.at("deactivated").get<int>();
    r.trapped_count = j.at("trapped").get<int>();
    r.pause_ticks = j.at("pause_ticks").get<std::vector<std::int64_t>>();
    r.answers = j.at("answers").get<int>();
    if (!j.at("mean_answer_latency_ms").is_null()) {
      r.mean_answer_latency_ms = j.at("mean_answer_latency_ms").get<double>();
    }
    r.scoring = scoring_from_json(j.at("scoring"));
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed session report: ") + e.what());
  } catch (const ConfigError& e) {
    throw SchemaError(std::string("malformed session report: ") + e.what());
  } catch (const DomainError& e) {
    throw SchemaError(std::string("malformed session report: ") + e.what());
  }
}

SessionResult run_session(const SessionConfig& input, OperatorSource& source, const LogSink& sink) {
  input.validate();
  const SessionConfig config = config_from_json(Json::parse(config_to_json(input).dump()));
  const std::uint64_t seed = config.seed;

  LogWriter log(sink);
  log.emit(0, "Header", {{"schema", kLogSchemaVersion}, {"config", config_to_json(config)}});

  RngStream world_rng(seed, "world");
  auto world = std::make_shared<const GridWorld>(make_world(config.world, world_rng));
  const SpawnArea area = spawn_area(config.world);
  HazardField hazards = HazardField::create(config.hazard_kind, config.hazard.to_params(config.hazard_kind, config.pso.dt),
                                            *world, RngStream(seed, "hazards"), area);
  const std::vector<AlertMessage> initial_alerts = hazards.take_initial_alerts();
  RngStream spawn_rng(seed, "spawn");
  std::vector<RobotState> swarm = spawn_swarm(config.pso, *world, area, spawn_rng);
  Simulation sim(world, config.sim_params(), std::move(swarm), std::move(hazards), RngStream(seed, "swarm"));

  RngStream pause_rng(seed, "pauses");
  const std::vector<std::int64_t> pause_ticks =
      schedule_pauses(config.task_duration_s, config.pso.dt, config.pauses, pause_rng);

  ReportInputs inputs;
  std::int64_t last_snapshot = -1, last_metric = -1, last_hash = -1;

  auto emit_snapshot = [&] {
    Json robots = robots_to_json(sim.swarm(), sim.trapped());
    inputs.final_snapshot = robots_from_json(Json::parse(robots.dump()));
    log.emit(sim.tick(), "RobotSnapshot", std::move(robots));
    last_snapshot = sim.tick();
  };
  auto emit_metric = [&] {
    log.emit(sim.tick(), "MetricSample", to_json(sim.metrics()));
    last_metric = sim.tick();
  };
  auto emit_hash = [&] {
    log.emit(sim.tick(), "StateHash", {{"state", hex64(sim.state_digest())}, {"chain", hex64(log.chain())}});
    last_hash = sim.tick();
  };

  if (!sim.hazards().initial_event().activated.empty()) {
    log.emit(0, "HazardEvent", to_json(sim.hazards().initial_event()));
  }
  for (const AlertMessage& a : initial_alerts) log.emit(0, "Alert", to_json(a));
  emit_metric();
  emit_snapshot();
  emit_hash();

  SessionPhase phase = SessionPhase::Live;
  std::size_t next_pause = 0;
  try {
    source.begin(sim, initial_alerts);
    const std::int64_t total = sim.params().total_ticks;
    while (!sim.finished()) {
      const std::int64_t t = sim.tick() + 1;
      std::vector<OperatorAction> actions = source.drain(t);
      for (OperatorAction& a : actions) a.tick = t;
      order_actions(actions);
      const TickOutput out = sim.advance(actions);

      for (const OperatorAction& a : out.applied) {
        log.emit(t, "Action", {{"action", action_to_json(a)}, {"accepted", true}});
      }
      for (const RejectedAction& r : out.rejected) {
        log.emit(t, "Action", {{"action", action_to_json(r.action)}, {"accepted", false}, {"reason", r.reason}});
      }
      for (const HazardEvent& e : out.hazard_events) log.emit(t, "HazardEvent", to_json(e));
      for (const AlertMessage& a : out.alerts) log.emit(t, "Alert", to_json(a));
      source.observe(sim, out);

      if (t % config.metrics.decimation_ticks == 0 || t == total) emit_metric();
      if (t % config.snapshot_interval_ticks == 0 || !out.deactivated.empty() || t == total) emit_snapshot();
      if (t % config.state_hash_interval_ticks == 0 || t == total) emit_hash();

      if (next_pause < pause_ticks.size() && pause_ticks[next_pause] == t) {
        const int pause = static_cast<int>(next_pause) + 1;
        phase = SessionPhase::Pause;
        inputs.pause_ticks.push_back(t);
        const auto queries = config.bank.for_pause(pause);
        Json ids = Json::array();
        for (const SagatQuery* q : queries) ids.push_back(q->id);
        log.emit(t, "PauseBegin", {{"pause", pause}, {"queries", ids}});
        source.pause_begin(pause, queries);
        for (std::size_t i = 0; i < queries.size(); ++i) {
          const SagatQuery& q = *queries[i];
          const GroundTruth truth = extract_ground_truth(q, sim, config.bank);
          SagatResponse resp = source.answer(q, static_cast<int>(i) + 1, truth, *world);
          if (resp.query_id != q.id) throw DomainError("answer for " + resp.query_id + " while " + q.id + " is open");
          const auto score = score_response(q, resp.answer, truth, config.scoring);
          log.emit(t, "SagatAnswer", {{"pause", pause},
                                      {"index", i + 1},
                                      {"query_id", q.id},
                                      {"answer", answer_to_json(resp.answer)},
                                      {"latency_ms", resp.latency_ms},
                                      {"truth", to_json(truth)},
                                      {"score", opt_json(score)}});
          inputs.answers.push_back({&q, resp.answer, truth, resp.latency_ms});
        }
        log.emit(t, "PauseEnd", {{"pause", pause}});
        source.pause_end(pause);
        phase = SessionPhase::Live;
        ++next_pause;
      }
    }
    phase = SessionPhase::Sart;
    if (auto ratings = source.sart()) {
      score_sart(*ratings);
      log.emit(sim.tick(), "SartSubmission", {{"ratings", *ratings}});
      inputs.sart = ratings;
    }
    phase = SessionPhase::Done;
    inputs.complete = true;
  } catch (const OperatorDisconnected&) {
    inputs.complete = false;
    if (last_metric != sim.tick()) emit_metric();
    if (last_snapshot != sim.tick()) emit_snapshot();
    if (last_hash != sim.tick()) emit_hash();
  }

  inputs.final_tick = sim.tick();
  SessionResult result;
  result.report = build_report(inputs, *world, config, config.scoring);
  result.final_tick = sim.tick();
  result.final_hash = sim.state_digest();
  Json end{{"complete", inputs.complete},
           {"phase", phase_name(phase)},
           {"report", report_to_json(result.report)},
           {"chain", hex64(log.chain())}};
  log.emit(sim.tick(), "SessionEnd", end);
  result.chain = log.chain();
  source.end(end);
  return result;
}

SessionResult run_session(const SessionConfig& config, OperatorSource& source, std::ostream& out) {
  LogSink sink = [&out](std::int64_t, const std::string& line) { out << line << '\n'; };
  SessionResult r = run_session(config, source, sink);
  out.flush();
  return r;
}

SessionResult run_scripted_session(const SessionConfig& config, std::ostream& log) {
  ScriptedSource source(config);
  return run_session(config, source, log);
}

std::vector<std::string> read_lines(std::istream& in) {
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) lines.push_back(std::move(line));
  }
  return lines;
}

LogRecord parse_record(const std::string& line) {
  Json j;
  try {
    j = Json::parse(line);
  } catch (const nlohmann::json::exception&) {
    throw SchemaError("log line is not valid JSON");
  }
  if (!j.is_object() || j.size() != 3 || !j.contains("tick") || !j.contains("type") || !j.contains("payload") ||
      !j.at("tick").is_number_integer() || !j.at("type").is_string()) {
    throw SchemaError("log line is not a {tick, type, payload} record");
  }
  return {j.at("tick").get<std::int64_t>(), j.at("type").get<std::string>(), j.at("payload")};
}

namespace {

std::vector<LogRecord> parse_all(std::span<const std::string> lines) {
  std::vector<LogRecord> recs;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    try {
      recs.push_back(parse_record(lines[i]));
    } catch (const SchemaError& e) {
      throw SchemaError("line " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  if (recs.empty()) throw SchemaError("log is empty");
  const LogRecord& h = recs.front();
  if (h.type != "Header") throw SchemaError("log does not start with a Header record");
  if (!h.payload.contains("schema") || h.payload.at("schema") != kLogSchemaVersion) {
    throw SchemaError("unsupported log schema version");
  }
  if (!h.payload.contains("config")) throw SchemaError("header carries no config");
  return recs;
}

// Signals that a truncated log has been fully consumed.
struct ReplayExhausted {};

class ReplaySource : public OperatorSource {
 public:
  ReplaySource(const std::vector<LogRecord>& recs) {
    for (const LogRecord& r : recs) {
      if (r.type == "Action") {
        actions_[r.tick].push_back(action_from_json(r.payload.at("action"), r.tick));
      } else if (r.type == "SagatAnswer") {
        SagatResponse resp;
        resp.query_id = r.payload.at("query_id").get<std::string>();
        resp.answer = answer_from_json(r.payload.at("answer"));
        resp.latency_ms = r.payload.at("latency_ms").get<double>();
        answers_.push_back(std::move(resp));
      } else if (r.type == "SartSubmission") {
        sart_ = r.payload.at("ratings").get<std::array<int, 10>>();
      } else if (r.type == "SessionEnd") {
        ended_ = true;
        aborted_ = !r.payload.at("complete").get<bool>();
        abort_phase_ = r.payload.at("phase").get<std::string>();
        end_tick_ = r.tick;
      }
    }
  }

  std::vector<OperatorAction> drain(std::int64_t tick) override {
    if (aborted_ && abort_phase_ == phase_name(SessionPhase::Live) && tick == end_tick_ + 1) {
      throw OperatorDisconnected("log ends here");
    }
    auto it = actions_.find(tick);
    if (it == actions_.end()) return {};
    return it->second;
  }

  SagatResponse answer(const SagatQuery& query, int, const GroundTruth&, const GridWorld&) override {
    if (answers_.empty()) throw OperatorDisconnected("no more logged answers");
    SagatResponse r = std::move(answers_.front());
    answers_.pop_front();
    if (r.query_id != query.id) throw IntegrityError("logged answer for " + r.query_id + " where " + query.id + " was asked", -1);
    return r;
  }

  std::optional<std::array<int, 10>> sart() override {
    // A finished log without a submission means the form was declined.
    if (!sart_ && (!ended_ || aborted_)) throw OperatorDisconnected("no logged SART submission");
    return sart_;
  }

 private:
  std::map<std::int64_t, std::vector<OperatorAction>> actions_;
  std::deque<SagatResponse> answers_;
  std::optional<std::array<int, 10>> sart_;
  bool ended_ = false;
  bool aborted_ = false;
  std::string abort_phase_;
  std::int64_t end_tick_ = 0;
};

}  // namespace

ReplayResult replay_log(std::span<const std::string> lines) {
  std::vector<LogRecord> recs;
  try {
    recs = parse_all(lines);
  } catch (const SchemaError& e) {
    throw IntegrityError(std::string("unreadable log: ") + e.what(), 0);
  }
  SessionConfig config;
  try {
    config = config_from_json(recs.front().payload.at("config"));
  } catch (const ConfigError& e) {
    throw IntegrityError(std::string("header config rejected: ") + e.what(), 0);
  }
  const bool has_end = std::any_of(recs.begin(), recs.end(), [](const LogRecord& r) { return r.type == "SessionEnd"; });

  std::optional<ReplaySource> source;
  try {
    source.emplace(recs);
  } catch (const std::exception& e) {
    throw IntegrityError(std::string("malformed input record: ") + e.what(), 0);
  }

  ReplayResult result;
  std::size_t index = 0;
  LogSink sink = [&](std::int64_t tick, const std::string& line) {
    if (index >= lines.size()) {
      if (!has_end) throw ReplayExhausted{};
      throw IntegrityError("replay produced records past the end of the log", tick);
    }
    if (line != lines[index]) {
      throw IntegrityError("record " + std::to_string(index + 1) + " diverges from the replay", recs[index].tick);
    }
    if (recs[index].type == "StateHash") ++result.hashes_checked;
    ++index;
  };

  try {
    SessionResult r = run_session(config, *source, sink);
    result.complete = r.report.complete;
    result.final_tick = r.final_tick;
    result.final_hash = r.final_hash;
  } catch (const ReplayExhausted&) {
    result.complete = false;
    result.final_tick = recs.back().tick;
  } catch (const IntegrityError& e) {
    if (e.tick() >= 0) throw;
    throw IntegrityError(e.what(), index < recs.size() ? recs[index].tick : recs.back().tick);
  } catch (const DomainError& e) {
    throw IntegrityError(std::string("replay rejected logged input: ") + e.what(),
                         index < recs.size() ? recs[index].tick : recs.back().tick);
  }
  if (index != lines.size()) {
    throw IntegrityError("log has records the replay did not produce", recs[index].tick);
  }
  result.lines_checked = index;
  return result;
}

ReplayResult replay_log(std::istream& in) {
  const auto lines = read_lines(in);
  return replay_log(lines);
}

SessionConfig log_config(std::span<const std::string> lines) {
  const auto recs = parse_all(lines.first(std::min<std::size_t>(lines.size(), 1)));
  return config_from_json(recs.front().payload.at("config"));
}

SessionReport rescore_log(std::span<const std::string> lines, const ScoringConfig& scoring) {
  const std::vector<LogRecord> recs = parse_all(lines);
  const SessionConfig config = config_from_json(recs.front().payload.at("config"));
  RngStream world_rng(config.seed, "world");
  const GridWorld world = make_world(config.world, world_rng);

  ReportInputs in;
  bool ended = false;
  try {
    for (const LogRecord& r : recs) {
      if (r.type == "SagatAnswer") {
        const auto id = r.payload.at("query_id").get<std::string>();
        const SagatQuery* q = config.bank.find(id);
        if (q == nullptr) throw SchemaError("answer for unknown query " + id);
        in.answers.push_back({q, answer_from_json(r.payload.at("answer")), truth_from_json(r.payload.at("truth")),
                              r.payload.at("latency_ms").get<double>()});
      } else if (r.type == "SartSubmission") {
        in.sart = r.payload.at("ratings").get<std::array<int, 10>>();
      } else if (r.type == "RobotSnapshot") {
        in.final_snapshot = robots_from_json(r.payload);
      } else if (r.type == "PauseBegin") {
        in.pause_ticks.push_back(r.tick);
      } else if (r.type == "SessionEnd") {
        ended = true;
        in.complete = r.payload.at("complete").get<bool>();
        in.final_tick = r.tick;
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("malformed record: ") + e.what());
  }
  if (!ended || !in.complete) throw IntegrityError("log is incomplete; rescoring needs a finished session", recs.back().tick);
  return build_report(in, world, config, scoring);
}

SessionReport rescore_log(std::span<const std::string> lines) {
  return rescore_log(lines, log_config(lines).scoring);
}

}  // namespace hsi
