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

#include "hsi/gateway.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>

#include "hsi/error.hpp"

namespace hsi {

std::string encode_frame(const Json& message) {
  const std::string body = message.dump();
  if (body.size() > kMaxFrameBytes) throw DomainError("message too large for one frame");
  const auto n = static_cast<std::uint32_t>(body.size());
  std::string out;
  out.reserve(4 + body.size());
  out.push_back(static_cast<char>((n >> 24) & 0xff));
  out.push_back(static_cast<char>((n >> 16) & 0xff));
  out.push_back(static_cast<char>((n >> 8) & 0xff));
  out.push_back(static_cast<char>(n & 0xff));
  out += body;
  return out;
}

std::vector<std::string> decode_frames(std::string& buffer) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (buffer.size() - pos >= 4) {
    const auto* p = reinterpret_cast<const unsigned char*>(buffer.data() + pos);
    const std::uint32_t n = (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) | p[3];
    if (n > kMaxFrameBytes) throw SchemaError("frame length exceeds the limit");
    if (buffer.size() - pos - 4 < n) break;
    out.emplace_back(buffer, pos + 4, n);
    pos += 4 + n;
  }
  buffer.erase(0, pos);
  return out;
}

Json snapshot_message(const Simulation& sim, std::span<const AlertMessage> alerts) {
  Json robots = Json::array();
  for (const RobotState& r : sim.swarm()) {
    robots.push_back({{"id", r.id},
                      {"x", r.position.x},
                      {"y", r.position.y},
                      {"status", r.active() ? "active" : "deactivated"}});
  }
  Json feed = Json::array();
  for (const AlertMessage& a : alerts) {
    Json j = to_json(a);
    j["tick"] = a.tick;
    feed.push_back(std::move(j));
  }
  return {{"type", "Snapshot"},
          {"tick", sim.tick()},
          {"remaining_s", static_cast<double>(sim.remaining_ticks()) * sim.params().pso.dt},
          {"robots", robots},
          {"marked", to_json(sim.marked())},
          {"alerts", feed}};
}

Json query_prompt_message(const SagatQuery& query, int index) {
  Json q{{"id", query.id},
         {"level", level_name(query.level)},
         {"dimension", query.dimension},
         {"tag", query.requirement},
         {"kind", query_kind_name(query.kind)},
         {"prompt", query.prompt}};
  if (query.kind == QueryKind::MCQ) q["options"] = mcq_options(query);
  return {{"type", "QueryPrompt"}, {"index", index}, {"query", q}};
}

std::string_view protocol_state_name(ProtocolState s) noexcept {
  switch (s) {
    case ProtocolState::AwaitHello: return "await-hello";
    case ProtocolState::Live: return "live";
    case ProtocolState::Paused: return "paused";
    case ProtocolState::Sart: return "sart";
    case ProtocolState::Done: return "done";
  }
  return "?";
}

GatewaySource::GatewaySource(SendFn send, GatewayOptions options) : send_(std::move(send)), options_(options) {
  if (!(options_.render_hz > 0.0)) throw ConfigError("render rate must be > 0");
  if (!(options_.time_scale >= 0.0)) throw ConfigError("time scale must be >= 0");
}

void GatewaySource::send(const Json& m, bool droppable) { send_(m, droppable); }

void GatewaySource::reject(const std::string& reason) { send({{"type", "Rejection"}, {"reason", reason}}); }

ProtocolState GatewaySource::state() const {
  std::lock_guard lock(mu_);
  return state_;
}

void GatewaySource::on_raw_message(const std::string& bytes) {
  Json j;
  try {
    j = Json::parse(bytes);
  } catch (const nlohmann::json::exception&) {
    reject("malformed message");
    return;
  }
  on_message(j);
}

namespace {

bool answer_fits(const SagatQuery& q, const SagatAnswer& a) {
  if (q.kind == QueryKind::MCQ) {
    if (const int* o = std::get_if<int>(&a)) return *o >= 0 && *o <= 4;
    return std::holds_alternative<IDontKnow>(a);
  }
  return std::holds_alternative<CellSet>(a) || std::holds_alternative<NotApplicable>(a);
}

}  // namespace

void GatewaySource::on_message(const Json& j) {
  std::optional<std::string> rejection;
  {
    std::unique_lock lock(mu_);
    const std::string type = j.is_object() && j.contains("type") && j["type"].is_string() ? j["type"].get<std::string>() : "";
    try {
      if (type == "Hello") {
        if (state_ != ProtocolState::AwaitHello) {
          rejection = "unexpected hello";
        } else if (!j.contains("version") || !j["version"].is_number_integer() || j["version"].get<int>() != kProtocolVersion) {
          rejection = "unsupported version";
        } else {
          state_ = ProtocolState::Live;
          cv_.notify_all();
        }
      } else if (state_ == ProtocolState::AwaitHello) {
        rejection = "hello required";
      } else if (type == "Mark" || type == "Unmark" || type == "Swipe") {
        if (state_ == ProtocolState::Paused) {
          rejection = "paused";
        } else if (state_ != ProtocolState::Live) {
          rejection = "task is not running";
        } else {
          Json internal = j;
          internal["type"] = type == "Mark" ? "mark" : type == "Unmark" ? "unmark" : "swipe";
          OperatorAction a = action_from_json(internal, 0);
          if (const auto* s = std::get_if<Swipe>(&a.kind)) validate_swipe(*s);
          actions_.push_back(a);
        }
      } else if (type == "SagatAnswer") {
        if (state_ != ProtocolState::Paused) {
          rejection = "not paused";
        } else if (open_query_ == nullptr || !j.contains("query_id") || j["query_id"] != open_query_->id) {
          rejection = "out of order";
        } else {
          SagatAnswer a = answer_from_json(j.at("answer"));
          if (!answer_fits(*open_query_, a)) {
            rejection = "invalid answer";
          } else {
            SagatResponse r;
            r.query_id = open_query_->id;
            r.answer = std::move(a);
            if (j.contains("latency_ms") && j["latency_ms"].is_number()) {
              r.latency_ms = j["latency_ms"].get<double>();
            } else {
              r.latency_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - prompt_sent_).count();
            }
            answer_ = std::move(r);
            open_query_ = nullptr;
            cv_.notify_all();
          }
        }
      } else if (type == "SartSubmit") {
        if (state_ != ProtocolState::Sart || sart_) {
          rejection = "not expecting SART";
        } else {
          const auto ratings = j.at("ratings").get<std::array<int, 10>>();
          score_sart(ratings);
          sart_ = ratings;
          cv_.notify_all();
        }
      } else {
        rejection = "unknown message type";
      }
    } catch (const std::exception& e) {
      rejection = std::string("malformed message: ") + e.what();
    }
  }
  if (rejection) reject(*rejection);
}

void GatewaySource::on_disconnect() {
  std::lock_guard lock(mu_);
  disconnected_ = true;
  cv_.notify_all();
}

bool GatewaySource::wait_for_hello(std::chrono::milliseconds timeout) {
  std::unique_lock lock(mu_);
  cv_.wait_for(lock, timeout, [&] { return state_ != ProtocolState::AwaitHello || disconnected_; });
  return state_ != ProtocolState::AwaitHello && !disconnected_;
}

void GatewaySource::begin(const Simulation& sim, std::span<const AlertMessage> initial_alerts) {
  dt_ = sim.params().pso.dt;
  render_every_ = std::max(1, static_cast<int>(std::lround(1.0 / (options_.render_hz * dt_))));
  start_ = std::chrono::steady_clock::now();
  send(snapshot_message(sim, initial_alerts));
}

std::vector<OperatorAction> GatewaySource::drain(std::int64_t tick) {
  if (options_.time_scale > 0.0) {
    const auto due = start_ + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                  std::chrono::duration<double>(static_cast<double>(tick) * dt_ * options_.time_scale));
    std::this_thread::sleep_until(due);
  }
  std::lock_guard lock(mu_);
  if (disconnected_) throw OperatorDisconnected("console disconnected");
  std::vector<OperatorAction> out;
  out.swap(actions_);
  for (OperatorAction& a : out) a.tick = tick;
  return out;
}

void GatewaySource::observe(const Simulation& sim, const TickOutput& out) {
  unsent_alerts_.insert(unsent_alerts_.end(), out.alerts.begin(), out.alerts.end());
  if (out.tick % render_every_ == 0 || sim.finished()) {
    const bool droppable = unsent_alerts_.empty();
    send(snapshot_message(sim, unsent_alerts_), droppable);
    unsent_alerts_.clear();
  }
}

void GatewaySource::pause_begin(int pause, std::span<const SagatQuery* const> queries) {
  {
    std::lock_guard lock(mu_);
    state_ = ProtocolState::Paused;
    actions_.clear();
  }
  send({{"type", "PauseBegin"}, {"pause", pause}, {"queries", queries.size()}});
}

SagatResponse GatewaySource::answer(const SagatQuery& query, int index, const GroundTruth&, const GridWorld&) {
  {
    std::lock_guard lock(mu_);
    if (disconnected_) throw OperatorDisconnected("console disconnected");
    open_query_ = &query;
    answer_.reset();
    prompt_sent_ = std::chrono::steady_clock::now();
  }
  send(query_prompt_message(query, index));
  std::unique_lock lock(mu_);
  const bool got = cv_.wait_for(lock, options_.answer_timeout, [&] { return answer_.has_value() || disconnected_; });
  if (!got || !answer_) {
    open_query_ = nullptr;
    throw OperatorDisconnected(got ? "console disconnected" : "answer timed out");
  }
  SagatResponse r = std::move(*answer_);
  answer_.reset();
  return r;
}

void GatewaySource::pause_end(int pause) {
  {
    std::lock_guard lock(mu_);
    state_ = ProtocolState::Live;
  }
  send({{"type", "PauseEnd"}, {"pause", pause}});
}

std::optional<std::array<int, 10>> GatewaySource::sart() {
  {
    std::lock_guard lock(mu_);
    if (disconnected_) throw OperatorDisconnected("console disconnected");
    state_ = ProtocolState::Sart;
  }
  Json constructs = Json::array();
  for (auto c : kSartConstructs) constructs.push_back(c);
  send({{"type", "SartForm"}, {"constructs", constructs}, {"scale_min", 1}, {"scale_max", 7}});
  std::unique_lock lock(mu_);
  const bool got = cv_.wait_for(lock, options_.answer_timeout, [&] { return sart_.has_value() || disconnected_; });
  if (!got || !sart_) throw OperatorDisconnected(got ? "console disconnected" : "SART timed out");
  return sart_;
}

void GatewaySource::end(const Json& session_end) {
  {
    std::lock_guard lock(mu_);
    state_ = ProtocolState::Done;
  }
  send({{"type", "SessionEnd"}, {"complete", session_end.at("complete")}, {"report", session_end.at("report")}});
}

FramedSocket::FramedSocket(FramedSocket&& o) noexcept
    : fd_(std::exchange(o.fd_, -1)), buffer_(std::move(o.buffer_)), ready_(std::move(o.ready_)) {}

FramedSocket& FramedSocket::operator=(FramedSocket&& o) noexcept {
  if (this != &o) {
    if (fd_ >= 0) ::close(fd_);
    fd_ = std::exchange(o.fd_, -1);
    buffer_ = std::move(o.buffer_);
    ready_ = std::move(o.ready_);
  }
  return *this;
}

FramedSocket::~FramedSocket() {
  if (fd_ >= 0) ::close(fd_);
}

FramedSocket FramedSocket::connect(const std::string& host, std::uint16_t port) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &res) != 0 || res == nullptr) {
    throw std::runtime_error("cannot resolve " + host);
  }
  const int fd = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
  if (fd < 0 || ::connect(fd, res->ai_addr, res->ai_addrlen) != 0) {
    const int err = errno;
    ::freeaddrinfo(res);
    if (fd >= 0) ::close(fd);
    throw std::runtime_error("cannot connect to " + host + ":" + std::to_string(port) + ": " + std::strerror(err));
  }
  ::freeaddrinfo(res);
  const int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  return FramedSocket(fd);
}

bool FramedSocket::send_frame(const std::string& frame) {
  std::size_t sent = 0;
  while (sent < frame.size()) {
    const ssize_t n = ::send(fd_, frame.data() + sent, frame.size() - sent, MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    sent += static_cast<std::size_t>(n);
  }
  return true;
}

std::optional<std::string> FramedSocket::recv_frame() {
  char chunk[65536];
  while (ready_.empty()) {
    const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return std::nullopt;
    buffer_.append(chunk, static_cast<std::size_t>(n));
    try {
      for (auto& f : decode_frames(buffer_)) ready_.push_back(std::move(f));
    } catch (const SchemaError&) {
      return std::nullopt;
    }
  }
  std::string f = std::move(ready_.front());
  ready_.pop_front();
  return f;
}

void FramedSocket::shutdown() {
  if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
}

Listener::Listener(const std::string& host, std::uint16_t port) {
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) throw std::runtime_error("cannot create socket");
  const int one = 1;
  ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(fd_);
    throw ConfigError("listen address must be an IPv4 literal, got '" + host + "'");
  }
  if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(fd_, 4) != 0) {
    const int err = errno;
    ::close(fd_);
    throw std::runtime_error("cannot listen on " + host + ":" + std::to_string(port) + ": " + std::strerror(err));
  }
  socklen_t len = sizeof addr;
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

Listener::~Listener() {
  close();
  if (fd_ >= 0) ::close(fd_);
}

std::optional<FramedSocket> Listener::accept() {
  while (!closed_) {
    const int c = ::accept(fd_, nullptr, nullptr);
    if (c >= 0) {
      const int one = 1;
      ::setsockopt(c, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
      return FramedSocket(c);
    }
    if (errno != EINTR) break;
  }
  return std::nullopt;
}

void Listener::close() {
  if (!closed_.exchange(true) && fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
}

std::pair<std::string, std::uint16_t> parse_endpoint(const std::string& addr) {
  const auto colon = addr.rfind(':');
  if (colon == std::string::npos) throw ConfigError("endpoint must be host:port, got '" + addr + "'");
  int port = 0;
  try {
    port = std::stoi(addr.substr(colon + 1));
  } catch (const std::exception&) {
    throw ConfigError("bad port in '" + addr + "'");
  }
  if (port < 0 || port > 65535) throw ConfigError("port out of range in '" + addr + "'");
  return {addr.substr(0, colon), static_cast<std::uint16_t>(port)};
}

ServeResult serve(const SessionConfig& config, Listener& listener, std::ostream& log, GatewayOptions options,
                  std::chrono::milliseconds hello_timeout) {
  ServeResult result;
  auto first = listener.accept();
  if (!first) throw std::runtime_error("listener closed before a console connected");
  FramedSocket conn = std::move(*first);
  result.console_connected = true;

  // Writer: snapshots are dropped once this many are queued; nothing else is.
  constexpr std::size_t kSnapshotBacklog = 16;
  std::mutex wmu;
  std::condition_variable wcv;
  std::deque<std::pair<std::string, bool>> queue;
  std::size_t queued_snapshots = 0;
  bool stop = false;

  GatewaySource* source_ptr = nullptr;
  SendFn send = [&](const Json& m, bool droppable) {
    std::lock_guard lock(wmu);
    if (droppable && queued_snapshots >= kSnapshotBacklog) return;
    queue.emplace_back(encode_frame(m), droppable);
    queued_snapshots += droppable ? 1 : 0;
    wcv.notify_one();
  };
  GatewaySource source(send, options);
  source_ptr = &source;

  std::thread writer([&] {
    std::unique_lock lock(wmu);
    for (;;) {
      wcv.wait(lock, [&] { return stop || !queue.empty(); });
      if (queue.empty()) return;
      auto [frame, droppable] = std::move(queue.front());
      queue.pop_front();
      queued_snapshots -= droppable ? 1 : 0;
      lock.unlock();
      const bool ok = conn.send_frame(frame);
      lock.lock();
      if (!ok) {
        source_ptr->on_disconnect();
        queue.clear();
        queued_snapshots = 0;
      }
    }
  });
  std::thread reader([&] {
    while (auto frame = conn.recv_frame()) source.on_raw_message(*frame);
    source.on_disconnect();
  });
  std::thread acceptor([&] {
    while (auto extra = listener.accept()) {
      extra->send({{"type", "Rejection"}, {"reason", "a console is already connected"}});
      extra->shutdown();
      ++result.refused_connections;
    }
  });

  auto finish = [&] {
    {
      std::lock_guard lock(wmu);
      stop = true;
      wcv.notify_one();
    }
    writer.join();
    conn.shutdown();
    reader.join();
    listener.close();
    acceptor.join();
  };

  if (!source.wait_for_hello(hello_timeout)) {
    finish();
    throw OperatorDisconnected("console did not say hello");
  }
  try {
    result.session = run_session(config, source, log);
  } catch (...) {
    finish();
    throw;
  }
  finish();
  return result;
}

ConsoleTrace run_scripted_console(FramedSocket& socket, const ScriptedConsoleOptions& options) {
  ConsoleTrace trace;
  socket.send({{"type", "Hello"}, {"version", kProtocolVersion}});
  int snapshots = 0;
  while (auto frame = socket.recv_frame()) {
    Json m = Json::parse(*frame);
    const std::string type = m.value("type", "");
    trace.frames.push_back(std::move(*frame));
    trace.types.push_back(type);
    if (type == "Snapshot") {
      ++snapshots;
      if (options.mark_alerts) {
        for (const Json& a : m["alerts"]) {
          for (const Json& c : a["cells"]) socket.send({{"type", "Mark"}, {"cell", c}});
        }
      }
      if (options.disconnect_after_snapshots >= 0 && snapshots >= options.disconnect_after_snapshots) {
        socket.shutdown();
        break;
      }
    } else if (type == "QueryPrompt") {
      const Json& q = m["query"];
      Json answer = q["kind"] == "MCQ" ? Json{{"type", "dont_know"}} : Json{{"type", "not_applicable"}};
      socket.send({{"type", "SagatAnswer"}, {"query_id", q["id"]}, {"answer", answer}, {"latency_ms", 1000.0}});
    } else if (type == "SartForm") {
      socket.send({{"type", "SartSubmit"}, {"ratings", options.sart}});
    } else if (type == "SessionEnd") {
      break;
    }
  }
  return trace;
}

}  // namespace hsi
