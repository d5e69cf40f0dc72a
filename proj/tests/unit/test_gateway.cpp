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

#include <future>
#include <mutex>
#include <sstream>
#include <thread>

#include "hsi/error.hpp"
#include "hsi/gateway.hpp"

using namespace hsi;
using namespace std::chrono_literals;

namespace {

// Records everything the gateway sends.
struct Outbox {
  std::mutex mu;
  std::vector<Json> messages;
  SendFn fn() {
    return [this](const Json& m, bool) {
      std::lock_guard lock(mu);
      messages.push_back(m);
    };
  }
  Json last() {
    std::lock_guard lock(mu);
    return messages.empty() ? Json() : messages.back();
  }
  std::string last_reason() { return last().value("reason", ""); }
};

Json hello() { return {{"type", "Hello"}, {"version", kProtocolVersion}}; }

struct Served {
  ServeResult result;
  ConsoleTrace trace;
  std::vector<std::string> log;
};

Served serve_once(const SessionConfig& c, const ScriptedConsoleOptions& console = {}) {
  Listener listener("127.0.0.1", 0);
  std::ostringstream log;
  GatewayOptions opts;
  opts.time_scale = 0.0;
  auto fut = std::async(std::launch::async, [&] { return serve(c, listener, log, opts, 10s); });
  FramedSocket sock = FramedSocket::connect("127.0.0.1", listener.port());
  Served s;
  s.trace = run_scripted_console(sock, console);
  sock.shutdown();
  s.result = fut.get();
  std::istringstream in(log.str());
  s.log = read_lines(in);
  return s;
}

}  // namespace

TEST_SUITE("gateway") {

TEST_CASE("frames round-trip and split across reads") {
  const Json a{{"type", "Mark"}, {"cell", {1, 2}}};
  const Json b{{"type", "Hello"}, {"version", 1}};
  const std::string bytes = encode_frame(a) + encode_frame(b);
  const std::string body = a.dump();
  REQUIRE(body.size() < 256);
  CHECK(bytes.substr(0, 4) == std::string("\0\0\0", 3) + static_cast<char>(body.size()));
  std::string buf = bytes.substr(0, 7);
  CHECK(decode_frames(buf).empty());
  buf += bytes.substr(7);
  auto frames = decode_frames(buf);
  REQUIRE(frames.size() == 2);
  CHECK(Json::parse(frames[0]) == a);
  CHECK(Json::parse(frames[1]) == b);
  CHECK(buf.empty());
  std::string huge("\x7f\xff\xff\xff", 4);
  CHECK_THROWS_AS(decode_frames(huge), SchemaError);
}

TEST_CASE("endpoints") {
  CHECK(parse_endpoint("127.0.0.1:7000") == std::pair<std::string, std::uint16_t>{"127.0.0.1", 7000});
  CHECK_THROWS_AS(parse_endpoint("localhost"), ConfigError);
  CHECK_THROWS_AS(parse_endpoint("h:99999"), ConfigError);
}

TEST_CASE("handshake rules") {
  Outbox out;
  GatewaySource g(out.fn());
  g.on_message({{"type", "Mark"}, {"cell", {1, 1}}});
  CHECK(out.last_reason() == "hello required");
  g.on_message({{"type", "Hello"}, {"version", 99}});
  CHECK(out.last_reason() == "unsupported version");
  CHECK(g.state() == ProtocolState::AwaitHello);
  g.on_message(hello());
  CHECK(g.state() == ProtocolState::Live);
  CHECK(g.wait_for_hello(0ms));
  g.on_message(hello());
  CHECK(out.last_reason() == "unexpected hello");
  g.on_raw_message("{oops");
  CHECK(out.last_reason() == "malformed message");
  g.on_message({{"type", "Teleport"}});
  CHECK(out.last_reason() == "unknown message type");
  g.on_message({{"type", "Swipe"}, {"origin", {1, 1}}, {"direction", {3, 4}}, {"magnitude", 1}});
  CHECK(out.last_reason().rfind("malformed message", 0) == 0);
  g.on_message({{"type", "SagatAnswer"}, {"query_id", "P1Q01"}, {"answer", {{"type", "not_applicable"}}}});
  CHECK(out.last_reason() == "not paused");
}

TEST_CASE("blackout and sequential answering") {
  Outbox out;
  GatewayOptions o;
  o.time_scale = 0.0;
  GatewaySource g(out.fn(), o);
  g.on_message(hello());
  g.on_message({{"type", "Mark"}, {"cell", {2, 2}}});
  CHECK(g.drain(1).size() == 1);

  const QueryBank bank = default_query_bank();
  const auto qs = bank.for_pause(1);
  g.pause_begin(1, qs);
  CHECK(out.last().at("type") == "PauseBegin");
  g.on_message({{"type", "Mark"}, {"cell", {2, 2}}});
  CHECK(out.last_reason() == "paused");
  g.on_message({{"type", "Swipe"}, {"origin", {1, 1}}, {"direction", {1, 0}}, {"magnitude", 1}});
  CHECK(out.last_reason() == "paused");

  GridWorld w(20, 20, 1.0, {}, {10.5, 10.5});
  auto pending = std::async(std::launch::async, [&] { return g.answer(*qs[1], 2, GroundTruth{}, w); });
  // wait for the prompt to go out
  for (int i = 0; i < 500 && out.last().value("type", "") != "QueryPrompt"; ++i) std::this_thread::sleep_for(1ms);
  CHECK(out.last().at("index") == 2);
  g.on_message({{"type", "SagatAnswer"}, {"query_id", qs[2]->id}, {"answer", {{"type", "dont_know"}}}});
  CHECK(out.last_reason() == "out of order");
  // P1Q02 is an MCQ: Not applicable does not fit it
  g.on_message({{"type", "SagatAnswer"}, {"query_id", qs[1]->id}, {"answer", {{"type", "not_applicable"}}}});
  CHECK(out.last_reason() == "invalid answer");
  g.on_message({{"type", "SagatAnswer"}, {"query_id", qs[1]->id}, {"answer", {{"type", "option"}, {"option", 3}}},
                {"latency_ms", 1234.0}});
  const SagatResponse r = pending.get();
  CHECK(r.query_id == qs[1]->id);
  CHECK(r.answer == SagatAnswer{3});
  CHECK(r.latency_ms == 1234.0);
  g.pause_end(1);
  CHECK(out.last().at("type") == "PauseEnd");
  CHECK(g.drain(2).empty());  // the mark sent during the pause was never queued

  g.on_message({{"type", "SartSubmit"}, {"ratings", {4, 4, 4, 4, 4, 4, 4, 4, 4, 4}}});
  CHECK(out.last_reason() == "not expecting SART");
}

TEST_CASE("disconnect aborts waiting calls") {
  Outbox out;
  GatewayOptions o;
  o.time_scale = 0.0;
  GatewaySource g(out.fn(), o);
  g.on_message(hello());
  const QueryBank bank = default_query_bank();
  GridWorld w(20, 20, 1.0, {}, {10.5, 10.5});
  auto pending = std::async(std::launch::async, [&] { return g.answer(bank.queries[0], 1, GroundTruth{}, w); });
  std::this_thread::sleep_for(20ms);
  g.on_disconnect();
  CHECK_THROWS_AS(pending.get(), OperatorDisconnected);
  CHECK_THROWS_AS(g.drain(5), OperatorDisconnected);
}

TEST_CASE("a full run over TCP follows the study protocol") {
  SessionConfig c;
  c.seed = 41;
  c.hazard_kind = HazardKind::Dis;
  Served s = serve_once(c, {true});
  CHECK(s.result.console_connected);
  CHECK(s.result.session.report.complete);

  // Collapse the trace: runs of Snapshots become one entry.
  std::vector<std::string> shape;
  for (const auto& t : s.trace.types) {
    if (t == "Rejection") continue;
    if (t == "Snapshot" && !shape.empty() && shape.back() == "Snapshot") continue;
    shape.push_back(t);
  }
  std::vector<std::string> want{"Snapshot", "PauseBegin"};
  for (int i = 0; i < 14; ++i) want.push_back("QueryPrompt");
  want.push_back("PauseEnd");
  want.push_back("Snapshot");
  want.push_back("PauseBegin");
  for (int i = 0; i < 14; ++i) want.push_back("QueryPrompt");
  want.insert(want.end(), {"PauseEnd", "Snapshot", "SartForm", "SessionEnd"});
  CHECK(shape == want);

  // At most one snapshot per render period (10 Hz at dt 0.1 s), plus the initial one;
  // the writer may drop some under backpressure.
  const auto snapshots = std::count(s.trace.types.begin(), s.trace.types.end(), "Snapshot");
  CHECK(snapshots <= 3001);
  CHECK(snapshots > 10);

  // Marks made from alerts reached the log, and the log replays.
  int actions = 0;
  for (const auto& l : s.log) actions += parse_record(l).type == "Action";
  CHECK(actions > 0);
  CHECK(replay_log(s.log).complete);
}

TEST_CASE("console disconnect aborts the session and the log replays as incomplete") {
  SessionConfig c;
  c.seed = 42;
  ScriptedConsoleOptions opts;
  opts.disconnect_after_snapshots = 40;
  Served s = serve_once(c, opts);
  CHECK_FALSE(s.result.session.report.complete);
  const LogRecord end = parse_record(s.log.back());
  CHECK(end.payload.at("complete") == false);
  CHECK_FALSE(replay_log(s.log).complete);
}

TEST_CASE("a second console is refused") {
  SessionConfig c;
  c.seed = 43;
  Listener listener("127.0.0.1", 0);
  std::ostringstream log;
  GatewayOptions opts;
  opts.time_scale = 0.0;
  auto fut = std::async(std::launch::async, [&] { return serve(c, listener, log, opts, 10s); });
  FramedSocket first = FramedSocket::connect("127.0.0.1", listener.port());
  std::this_thread::sleep_for(50ms);
  FramedSocket second = FramedSocket::connect("127.0.0.1", listener.port());
  auto frame = second.recv_frame();
  REQUIRE(frame.has_value());
  const Json m = Json::parse(*frame);
  CHECK(m.at("type") == "Rejection");
  CHECK_FALSE(second.recv_frame().has_value());
  run_scripted_console(first);
  const ServeResult r = fut.get();
  CHECK(r.refused_connections == 1);
  CHECK(r.session.report.complete);
}

TEST_CASE("snapshots carry no hazard state") {
  SessionConfig c;
  c.seed = 44;
  Served s = serve_once(c);
  for (std::size_t i = 0; i < s.trace.frames.size(); ++i) {
    if (s.trace.types[i] != "Snapshot") continue;
    const Json m = Json::parse(s.trace.frames[i]);
    for (const auto& [k, v] : m.items()) {
      CHECK_MESSAGE((k == "type" || k == "tick" || k == "remaining_s" || k == "robots" || k == "marked" ||
                     k == "alerts"),
                    k);
    }
    CHECK(m.at("marked").empty());
  }
}

}  // TEST_SUITE
