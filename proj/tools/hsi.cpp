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

// hsi: command-line front end for sessions, replay, rescoring and analysis.
#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "hsi/cohort.hpp"
#include "hsi/error.hpp"
#include "hsi/gateway.hpp"
#include "hsi/session.hpp"

namespace fs = std::filesystem;
using namespace hsi;

namespace {

enum Exit : int { kOk = 0, kFailure = 1, kConfig = 2, kIntegrity = 3, kIngestion = 4 };

// Relative output paths land under $HSI_LOG_DIR when it is set.
fs::path log_path(const std::string& p) {
  fs::path path(p);
  if (path.is_relative()) {
    if (const char* dir = std::getenv("HSI_LOG_DIR"); dir != nullptr && *dir != '\0') path = fs::path(dir) / path;
  }
  return path;
}

std::vector<std::string> read_log(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open log '" + path.string() + "'");
  return read_lines(in);
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IngestionError("cannot write '" + path.string() + "'");
  return out;
}

SessionConfig config_or_default(const std::string& path) {
  return path.empty() ? SessionConfig{} : load_config(path);
}

void print_report_summary(const SessionReport& r) {
  std::cout << "complete: " << (r.complete ? "yes" : "no") << "  final tick: " << r.final_tick << "\n";
  const MetricSample& m = r.final_metrics;
  if (m.all_deactivated) {
    std::cout << "TP: every robot deactivated\n";
  } else {
    std::cout << "TP: CA " << m.ca << "  NA " << m.na << "  NAQ1 " << m.naq1 << "  NAQ2 " << m.naq2 << "\n";
  }
  std::cout << "robots: " << m.active_count << " active, " << m.deactivated_count << " deactivated, "
            << r.trapped_count << " trapped\n";
  if (r.sagat) std::cout << "SAGAT: " << r.sagat->overall << " over " << r.answers << " answers\n";
  if (r.sart) {
    std::cout << "SART: " << r.sart->total << " (D " << r.sart->demand << ", S " << r.sart->supply << ", U "
              << r.sart->understanding << ")\n";
  } else {
    std::cout << "SART: absent\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Human-swarm interaction testbed"};
  app.require_subcommand(1);

  std::string config_path, out_path, log_file, scoring_path, logs_dir, listen = "127.0.0.1:7878", operator_kind = "policy";
  std::optional<std::uint64_t> seed;
  double time_scale = 1.0;
  bool holm = false, t_approx = false;
  std::size_t permutations = 10000;
  int participants = 30;
  std::uint64_t cohort_seed = 2024;

  auto* run = app.add_subcommand("run", "Run one participant-task and write its log");
  run->add_option("--config", config_path, "Session config (JSON); defaults when omitted");
  run->add_option("--operator", operator_kind, "policy or gateway")->check(CLI::IsMember({"policy", "gateway"}));
  run->add_option("--seed", seed, "Override the config seed");
  run->add_option("--out", out_path, "Log file (JSONL)")->required();
  run->add_option("--listen", listen, "Gateway endpoint host:port (gateway operator)");
  run->add_option("--time-scale", time_scale, "Gateway pacing; 1 = wall clock, 0 = unpaced");

  auto* serve_cmd = app.add_subcommand("serve", "Serve one session to one console over TCP");
  serve_cmd->add_option("--config", config_path, "Session config (JSON)");
  serve_cmd->add_option("--listen", listen, "host:port");
  serve_cmd->add_option("--out", out_path, "Log file (JSONL)")->required();
  serve_cmd->add_option("--time-scale", time_scale, "1 = wall clock, 0 = unpaced");

  auto* replay = app.add_subcommand("replay", "Re-execute a log and verify every state hash");
  replay->add_option("--log", log_file, "Log file")->required();

  auto* rescore = app.add_subcommand("rescore", "Recompute a report under another scoring rubric");
  rescore->add_option("--log", log_file, "Log file")->required();
  rescore->add_option("--scoring", scoring_path, "Scoring config (JSON); the logged rubric when omitted");
  rescore->add_option("--out", out_path, "Write the report JSON here");

  auto* analyze = app.add_subcommand("analyze", "Cohort statistics over a directory of logs");
  analyze->add_option("--logs", logs_dir, "Directory of *.jsonl logs (default $HSI_LOG_DIR)");
  analyze->add_option("--out", out_path, "report.txt or report.csv")->required();
  analyze->add_flag("--holm", holm, "Holm-adjust p-values within each table");
  analyze->add_flag("--t-approx", t_approx, "Spearman p from the t distribution instead of permutations");
  analyze->add_option("--permutations", permutations, "Spearman permutation count");

  auto* synth = app.add_subcommand("synth", "Generate a scripted synthetic cohort of logs");
  synth->add_option("--config", config_path, "Base session config");
  synth->add_option("--out", out_path, "Output directory")->required();
  synth->add_option("--participants", participants, "Number of participants");
  synth->add_option("--seed", cohort_seed, "Cohort seed");

  auto* bank = app.add_subcommand("bank", "Write the default SAGAT query bank");
  bank->add_option("--out", out_path, "Output file")->required();

  auto* defaults = app.add_subcommand("defaults", "Write the default session config");
  defaults->add_option("--out", out_path, "Output file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed() || serve_cmd->parsed()) {
      SessionConfig config = config_or_default(config_path);
      if (seed) config.seed = *seed;
      const fs::path path = log_path(out_path);
      std::ofstream out = open_out(path);
      SessionResult result;
      if (run->parsed() && operator_kind == "policy") {
        result = run_scripted_session(config, out);
      } else {
        const auto [host, port] = parse_endpoint(listen);
        Listener listener(host, port);
        std::cerr << "waiting for a console on " << host << ":" << listener.port() << "\n";
        GatewayOptions opts;
        opts.time_scale = time_scale;
        result = serve(config, listener, out, opts).session;
      }
      std::cout << "log: " << path.string() << "\n";
      print_report_summary(result.report);
      return result.report.complete ? kOk : kFailure;
    }
    if (replay->parsed()) {
      const auto lines = read_log(log_path(log_file));
      const ReplayResult r = replay_log(lines);
      std::cout << (r.complete ? "complete" : "incomplete") << " log, " << r.lines_checked << " records and "
                << r.hashes_checked << " state hashes verified, final tick " << r.final_tick << "\n";
      return r.complete ? kOk : kFailure;
    }
    if (rescore->parsed()) {
      const auto lines = read_log(log_path(log_file));
      const SessionReport r = scoring_path.empty() ? rescore_log(lines) : rescore_log(lines, load_scoring(scoring_path));
      if (!out_path.empty()) {
        std::ofstream out = open_out(out_path);
        out << report_to_json(r).dump(2) << "\n";
      }
      print_report_summary(r);
      return kOk;
    }
    if (analyze->parsed()) {
      fs::path dir = logs_dir;
      if (dir.empty()) {
        const char* env = std::getenv("HSI_LOG_DIR");
        if (env == nullptr || *env == '\0') throw IngestionError("no --logs directory and HSI_LOG_DIR is unset");
        dir = env;
      }
      const CohortTable cohort = build_cohort(dir);
      ReportOptions opts;
      opts.holm = holm;
      opts.spearman.t_approx = t_approx;
      opts.spearman.permutations = permutations;
      const ExperimentReport rep = experiment_reports(cohort, opts);
      const fs::path out = out_path;
      std::ofstream f = open_out(out);
      f << (out.extension() == ".csv" ? render_csv(rep) : render_text(rep));
      std::cout << "analyzed " << rep.cohort_rows << " participant-tasks into " << out.string() << "\n";
      return kOk;
    }
    if (synth->parsed()) {
      SyntheticCohortOptions opts;
      opts.participants = participants;
      opts.seed = cohort_seed;
      const auto files = generate_synthetic_cohort(log_path(out_path), config_or_default(config_path), opts);
      std::cout << "wrote " << files.size() << " logs\n";
      return kOk;
    }
    if (bank->parsed()) {
      std::ofstream out = open_out(out_path);
      out << to_json(default_query_bank()).dump(2) << "\n";
      return kOk;
    }
    if (defaults->parsed()) {
      Json j = config_to_json(SessionConfig{});
      j["query_bank"] = "default";
      std::ofstream out = open_out(out_path);
      out << j.dump(2) << "\n";
      return kOk;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfig;
  } catch (const IntegrityError& e) {
    std::cerr << "integrity error at tick " << e.tick() << ": " << e.what() << "\n";
    return kIntegrity;
  } catch (const IngestionError& e) {
    std::cerr << "ingestion error: " << e.what() << "\n";
    return kIngestion;
  } catch (const SchemaError& e) {
    std::cerr << "schema error: " << e.what() << "\n";
    return kIngestion;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kOk;
}
