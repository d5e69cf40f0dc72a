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

// Console gateway: wire messages, the study protocol and a TCP transport.
//
// Frames are a 4-byte big-endian length followed by one JSON object with a
// "type" field. Engine to console: Snapshot, PauseBegin, QueryPrompt,
// PauseEnd, SartForm, SessionEnd, Rejection. Console to engine: Hello, Mark,
// Unmark, Swipe, SagatAnswer, SartSubmit.
#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "hsi/session.hpp"

namespace hsi {

inline constexpr int kProtocolVersion = 1;
inline constexpr std::size_t kMaxFrameBytes = 16u << 20;

// Framing helpers.
std::string encode_frame(const Json& message);
// Extracts complete frames from the front of `buffer`; throws SchemaError on
// an oversized length prefix.
std::vector<std::string> decode_frames(std::string& buffer);

// Engine to console message builders.
Json snapshot_message(const Simulation& sim, std::span<const AlertMessage> alerts);
Json query_prompt_message(const SagatQuery& query, int index);

// Transport-facing channel: the gateway hands finished messages to `send`;
// `droppable` marks snapshots that may be dropped under backpressure.
using SendFn = std::function<void(const Json& message, bool droppable)>;

struct GatewayOptions {
  double render_hz = 10.0;
  // 1 runs at wall-clock speed, 0 runs as fast as the console keeps up.
  double time_scale = 1.0;
  std::chrono::milliseconds answer_timeout{std::chrono::minutes(30)};
};

enum class ProtocolState : std::uint8_t { AwaitHello, Live, Paused, Sart, Done };
std::string_view protocol_state_name(ProtocolState s) noexcept;

// OperatorSource fed by console messages. on_message / on_disconnect may be
// called from a reader thread; everything else runs on the session loop.
class GatewaySource : public OperatorSource {
 public:
  GatewaySource(SendFn send, GatewayOptions options = {});

  // Console input. Protocol violations are answered with a Rejection.
  void on_message(const Json& message);
  void on_raw_message(const std::string& bytes);
  void on_disconnect();

  // Blocks until Hello arrives; false on disconnect or timeout.
  bool wait_for_hello(std::chrono::milliseconds timeout);

  ProtocolState state() const;

  void begin(const Simulation& sim, std::span<const AlertMessage> initial_alerts) override;
  std::vector<OperatorAction> drain(std::int64_t tick) override;
  void observe(const Simulation& sim, const TickOutput& out) override;
  void pause_begin(int pause, std::span<const SagatQuery* const> queries) override;
  SagatResponse answer(const SagatQuery& query, int index, const GroundTruth& truth,
                       const GridWorld& world) override;
  void pause_end(int pause) override;
  std::optional<std::array<int, 10>> sart() override;
  void end(const Json& session_end) override;

 private:
  void reject(const std::string& reason);
  void send(const Json& m, bool droppable = false);

  SendFn send_;
  GatewayOptions options_;
  int render_every_ = 1;
  double dt_ = 0.1;
  std::chrono::steady_clock::time_point start_;

  mutable std::mutex mu_;
  std::condition_variable cv_;
  ProtocolState state_ = ProtocolState::AwaitHello;
  bool disconnected_ = false;
  std::vector<OperatorAction> actions_;
  const SagatQuery* open_query_ = nullptr;
  std::optional<SagatResponse> answer_;
  std::optional<std::array<int, 10>> sart_;
  std::chrono::steady_clock::time_point prompt_sent_;

  std::vector<AlertMessage> unsent_alerts_;  // loop thread only
};

// Blocking TCP helpers (IPv4).
class FramedSocket {
 public:
  FramedSocket() = default;
  explicit FramedSocket(int fd) : fd_(fd) {}
  FramedSocket(FramedSocket&& o) noexcept;
  FramedSocket& operator=(FramedSocket&& o) noexcept;
  FramedSocket(const FramedSocket&) = delete;
  FramedSocket& operator=(const FramedSocket&) = delete;
  ~FramedSocket();

  static FramedSocket connect(const std::string& host, std::uint16_t port);
  bool send_frame(const std::string& frame);
  bool send(const Json& message) { return send_frame(encode_frame(message)); }
  // Next raw frame payload; empty optional on EOF or error.
  std::optional<std::string> recv_frame();
  void shutdown();
  int fd() const noexcept { return fd_; }

 private:
  int fd_ = -1;
  std::string buffer_;
  std::deque<std::string> ready_;
};

class Listener {
 public:
  // Binds host:port (port 0 picks a free port).
  Listener(const std::string& host, std::uint16_t port);
  ~Listener();
  Listener(const Listener&) = delete;
  Listener& operator=(const Listener&) = delete;
  std::uint16_t port() const noexcept { return port_; }
  // Blocks for the next connection; empty after close().
  std::optional<FramedSocket> accept();
  void close();

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> closed_{false};
};

std::pair<std::string, std::uint16_t> parse_endpoint(const std::string& addr);

struct ServeResult {
  SessionResult session;
  bool console_connected = false;
  std::size_t refused_connections = 0;
};

// Runs one session against the first console that connects and says Hello.
// Later connections are refused. The session log goes to `log`.
ServeResult serve(const SessionConfig& config, Listener& listener, std::ostream& log, GatewayOptions options = {},
                  std::chrono::milliseconds hello_timeout = std::chrono::minutes(10));

// Minimal console used for protocol tests and demos: answers every query with
// "I don't know" / "Not applicable", marks alerted cells when `mark_alerts`
// is set, and submits fixed SART ratings. Records every received frame.
struct ScriptedConsoleOptions {
  bool mark_alerts = false;
  int disconnect_after_snapshots = -1;  // < 0 never
  std::array<int, 10> sart{4, 4, 4, 4, 4, 4, 4, 4, 4, 4};
};

struct ConsoleTrace {
  std::vector<std::string> frames;  // engine to console payloads, in order
  std::vector<std::string> types;
};

ConsoleTrace run_scripted_console(FramedSocket& socket, const ScriptedConsoleOptions& options = {});

}  // namespace hsi
