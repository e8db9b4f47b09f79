#pragma once

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <functional>
#include <iostream>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>

#include "roadjudge/agents.hpp"
#include "roadjudge/observation.hpp"

// Wire protocol for external agents: one JSON object per line over a stream socket.
//
//   client -> server  {"type":"hello","protocol_version":1,"agent_name":...}
//   server -> client  {"type":"hello_ack","protocol_version":1,"accepted":true,"route_id":...,"seed":...,
//                      "deadline_ms":...}
//                     or {"type":"hello_ack","protocol_version":1,"accepted":false,"error":...} and close
//   server -> client  {"type":"observation","tick":k,"observation":{...}}
//   client -> server  {"type":"action","tick":k,"command":{"throttle":..,"steer":..,"brake":..,"hand_brake":..}}
//   server -> client  {"type":"end","termination":...,"record":{...}}
//
// Exactly one action answers each observation. Doubles are written in shortest round-trip form.

namespace roadjudge {

inline constexpr int kProtocolVersion = 1;
inline constexpr std::chrono::milliseconds kDefaultActionDeadline{1000};

class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace msg {

inline json hello(const std::string& agent_name, int version = kProtocolVersion) {
  return json{{"type", "hello"}, {"protocol_version", version}, {"agent_name", agent_name}};
}

inline json hello_accept(const EpisodeStart& start, std::chrono::milliseconds deadline) {
  return json{{"type", "hello_ack"},          {"protocol_version", kProtocolVersion}, {"accepted", true},
              {"route_id", start.route_id},   {"seed", start.seed},
              {"deadline_ms", deadline.count()}};
}

inline json hello_refuse(const std::string& error) {
  return json{{"type", "hello_ack"}, {"protocol_version", kProtocolVersion}, {"accepted", false}, {"error", error}};
}

inline json observation(const Observation& obs) {
  return json{{"type", "observation"}, {"tick", obs.tick}, {"observation", obs}};
}

inline json action(std::int64_t tick, const ControlCommand& cmd) {
  return json{{"type", "action"}, {"tick", tick}, {"command", cmd}};
}

inline json end(const EpisodeEnd& e) { return json{{"type", "end"}, {"termination", e.termination}, {"record", e.record}}; }

/// Parses one line and checks its "type"; throws ProtocolError with a diagnostic.
inline json parse(const std::string& line, const std::string& expected_type) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ProtocolError("malformed message: " + std::string(e.what()));
  }
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
    throw ProtocolError("message without a string \"type\" field");
  }
  if (j.at("type") != expected_type) {
    throw ProtocolError("expected '" + expected_type + "' message, got '" + j.at("type").get<std::string>() + "'");
  }
  return j;
}

}  // namespace msg

// ---------------------------------------------------------------------------
// Channels

/// Bidirectional line transport.
class LineChannel {
 public:
  virtual ~LineChannel() = default;
  virtual void send_line(const std::string& line) = 0;
  /// Next complete line, or nullopt when `timeout` passes first. Throws ProtocolError on disconnect.
  virtual std::optional<std::string> receive_line(std::chrono::milliseconds timeout) = 0;
  virtual void close() {}
};

/// Line channel over a connected socket descriptor; owns the descriptor.
class SocketChannel final : public LineChannel {
 public:
  explicit SocketChannel(int fd) : fd_(fd) {}
  SocketChannel(const SocketChannel&) = delete;
  SocketChannel& operator=(const SocketChannel&) = delete;
  ~SocketChannel() override { close(); }

  void send_line(const std::string& line) override {
    if (fd_ < 0) throw ProtocolError("send on closed channel");
    std::string data = line;
    data += '\n';
    std::size_t off = 0;
    while (off < data.size()) {
      const ssize_t n = ::send(fd_, data.data() + off, data.size() - off, MSG_NOSIGNAL);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw ProtocolError(std::string("send failed: ") + std::strerror(errno));
      }
      off += static_cast<std::size_t>(n);
    }
  }

  std::optional<std::string> receive_line(std::chrono::milliseconds timeout) override {
    using clock = std::chrono::steady_clock;
    const auto deadline = clock::now() + timeout;
    while (true) {
      if (const auto pos = buffer_.find('\n'); pos != std::string::npos) {
        std::string line = buffer_.substr(0, pos);
        buffer_.erase(0, pos + 1);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
      }
      if (fd_ < 0) throw ProtocolError("receive on closed channel");
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - clock::now());
      if (left.count() <= 0) return std::nullopt;
      pollfd p{fd_, POLLIN, 0};
      const int r = ::poll(&p, 1, static_cast<int>(left.count()));
      if (r < 0) {
        if (errno == EINTR) continue;
        throw ProtocolError(std::string("poll failed: ") + std::strerror(errno));
      }
      if (r == 0) return std::nullopt;
      char chunk[65536];
      const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw ProtocolError(std::string("receive failed: ") + std::strerror(errno));
      }
      if (n == 0) throw ProtocolError("peer closed the connection");
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

  void close() override {
    if (fd_ >= 0) {
      ::close(fd_);
      fd_ = -1;
    }
  }

 private:
  int fd_;
  std::string buffer_;
};

/// Thread-safe in-process channel pair, used by tests and transcript recording.
class MemoryChannel final : public LineChannel {
 public:
  static std::pair<std::unique_ptr<MemoryChannel>, std::unique_ptr<MemoryChannel>> make_pair() {
    auto a = std::make_shared<Queue>();
    auto b = std::make_shared<Queue>();
    return {std::unique_ptr<MemoryChannel>(new MemoryChannel(a, b)), std::unique_ptr<MemoryChannel>(new MemoryChannel(b, a))};
  }
  ~MemoryChannel() override { close(); }

  void send_line(const std::string& line) override {
    std::lock_guard lock(out_->m);
    if (out_->closed) throw ProtocolError("peer closed the connection");
    out_->lines.push_back(line);
    out_->cv.notify_all();
  }

  std::optional<std::string> receive_line(std::chrono::milliseconds timeout) override {
    std::unique_lock lock(in_->m);
    if (!in_->cv.wait_for(lock, timeout, [&] { return !in_->lines.empty() || in_->closed; })) return std::nullopt;
    if (in_->lines.empty()) throw ProtocolError("peer closed the connection");
    std::string line = std::move(in_->lines.front());
    in_->lines.pop_front();
    return line;
  }

  void close() override {
    for (const auto& q : {in_, out_}) {
      std::lock_guard lock(q->m);
      q->closed = true;
      q->cv.notify_all();
    }
  }

 private:
  struct Queue {
    std::mutex m;
    std::condition_variable cv;
    std::deque<std::string> lines;
    bool closed = false;
  };
  MemoryChannel(std::shared_ptr<Queue> in, std::shared_ptr<Queue> out) : in_(std::move(in)), out_(std::move(out)) {}
  std::shared_ptr<Queue> in_;
  std::shared_ptr<Queue> out_;
};

// ---------------------------------------------------------------------------
// TCP endpoints

struct Endpoint {
  std::string host = "127.0.0.1";
  int port = 0;
};

/// Parses "host:port" or ":port" / "port" (host defaults to 127.0.0.1).
inline Endpoint parse_endpoint(const std::string& text) {
  Endpoint e;
  std::string port = text;
  if (const auto colon = text.rfind(':'); colon != std::string::npos) {
    if (colon > 0) e.host = text.substr(0, colon);
    port = text.substr(colon + 1);
  }
  try {
    std::size_t used = 0;
    e.port = std::stoi(port, &used);
    if (used != port.size() || e.port < 0 || e.port > 65535) throw std::invalid_argument("range");
  } catch (const std::exception&) {
    throw ConfigError("invalid endpoint '" + text + "': expected host:port");
  }
  return e;
}

namespace detail {

inline sockaddr_in resolve_ipv4(const Endpoint& e) {
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (const int rc = ::getaddrinfo(e.host.c_str(), nullptr, &hints, &res); rc != 0 || !res) {
    throw ProtocolError("cannot resolve host '" + e.host + "': " + ::gai_strerror(rc));
  }
  sockaddr_in addr = *reinterpret_cast<sockaddr_in*>(res->ai_addr);
  ::freeaddrinfo(res);
  addr.sin_port = htons(static_cast<std::uint16_t>(e.port));
  return addr;
}

inline void set_nodelay(int fd) {
  int one = 1;
  ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

}  // namespace detail

/// Source of agent sessions: one channel per episode.
class SessionSource {
 public:
  virtual ~SessionSource() = default;
  virtual std::unique_ptr<LineChannel> next_session(std::chrono::milliseconds timeout) = 0;
};

/// Listening socket; each accepted connection is one episode session.
class TcpListener final : public SessionSource {
 public:
  explicit TcpListener(const Endpoint& e) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) throw ProtocolError(std::string("socket failed: ") + std::strerror(errno));
    int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr = detail::resolve_ipv4(e);
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 || ::listen(fd_, 64) < 0) {
      const std::string err = std::strerror(errno);
      ::close(fd_);
      throw ProtocolError("cannot listen on " + e.host + ":" + std::to_string(e.port) + ": " + err);
    }
    socklen_t len = sizeof addr;
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
  }
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;
  ~TcpListener() override {
    if (fd_ >= 0) ::close(fd_);
  }

  int port() const { return port_; }

  std::unique_ptr<LineChannel> next_session(std::chrono::milliseconds timeout) override {
    std::lock_guard lock(accept_mutex_);
    pollfd p{fd_, POLLIN, 0};
    int r;
    do {
      r = ::poll(&p, 1, static_cast<int>(timeout.count()));
    } while (r < 0 && errno == EINTR);
    if (r <= 0) throw ProtocolError("no agent connected within " + std::to_string(timeout.count()) + " ms");
    const int fd = ::accept(fd_, nullptr, nullptr);
    if (fd < 0) throw ProtocolError(std::string("accept failed: ") + std::strerror(errno));
    detail::set_nodelay(fd);
    return std::make_unique<SocketChannel>(fd);
  }

 private:
  int fd_ = -1;
  int port_ = 0;
  std::mutex accept_mutex_;
};

inline std::unique_ptr<LineChannel> tcp_connect(const Endpoint& e) {
  const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) throw ProtocolError(std::string("socket failed: ") + std::strerror(errno));
  sockaddr_in addr = detail::resolve_ipv4(e);
  if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0) {
    const std::string err = std::strerror(errno);
    ::close(fd);
    throw ProtocolError("cannot connect to " + e.host + ":" + std::to_string(e.port) + ": " + err);
  }
  detail::set_nodelay(fd);
  return std::make_unique<SocketChannel>(fd);
}

// ---------------------------------------------------------------------------
// Server side

using WarningSink = std::function<void(const std::string&)>;

inline WarningSink stderr_warnings() {
  return [](const std::string& m) { std::cerr << "warning: " << m << '\n'; };
}

struct ExternalAgentOptions {
  std::chrono::milliseconds action_deadline = kDefaultActionDeadline;
  std::chrono::milliseconds connect_timeout{30000};
  WarningSink warn = stderr_warnings();
};

/// Agent whose policy runs in another process; every protocol fault surfaces as AgentFailure.
class ExternalAgent final : public Agent {
 public:
  ExternalAgent(std::string name, SessionSource& source, ExternalAgentOptions opts = {})
      : name_(std::move(name)), source_(&source), opts_(std::move(opts)) {}

  /// Uses an already-connected channel for the next episode instead of the session source.
  ExternalAgent(std::string name, std::unique_ptr<LineChannel> channel, ExternalAgentOptions opts = {})
      : name_(std::move(name)), pending_(std::move(channel)), opts_(std::move(opts)) {}

  AgentDescriptor descriptor() const override { return {name_, AgentKind::external, kProtocolVersion}; }

  void begin(const EpisodeStart& start) override {
    try {
      channel_ = pending_ ? std::move(pending_) : source_->next_session(opts_.connect_timeout);
      const auto line = channel_->receive_line(opts_.connect_timeout);
      if (!line) throw AgentFailure("no hello within " + std::to_string(opts_.connect_timeout.count()) + " ms");
      const json hello = msg::parse(*line, "hello");
      const int version = hello.value("protocol_version", -1);
      if (version != kProtocolVersion) {
        const std::string err = "protocol version mismatch: server speaks " + std::to_string(kProtocolVersion) +
                                ", client sent " + std::to_string(version);
        channel_->send_line(msg::hello_refuse(err).dump());
        channel_->close();
        throw AgentFailure(err);
      }
      client_name_ = hello.value("agent_name", std::string{});
      channel_->send_line(msg::hello_accept(start, opts_.action_deadline).dump());
    } catch (const ProtocolError& e) {
      throw AgentFailure(e.what());
    }
  }

  ControlCommand act(const Observation& obs) override {
    if (!channel_) throw AgentFailure("no session");
    try {
      channel_->send_line(msg::observation(obs).dump());
      const auto line = channel_->receive_line(opts_.action_deadline);
      if (!line) {
        throw AgentFailure("no action within " + std::to_string(opts_.action_deadline.count()) + " ms at tick " +
                           std::to_string(obs.tick));
      }
      const json a = msg::parse(*line, "action");
      if (a.value("tick", std::int64_t{-1}) != obs.tick) {
        throw ProtocolError("action answers tick " + a.value("tick", json(nullptr)).dump() + ", expected " +
                            std::to_string(obs.tick));
      }
      ControlCommand cmd = a.at("command").get<ControlCommand>();
      const ControlCommand raw = cmd;
      if (clamp_command(cmd) && opts_.warn) {
        opts_.warn("tick " + std::to_string(obs.tick) + ": action " + json(raw).dump() + " clamped to " +
                   json(cmd).dump());
      }
      return cmd;
    } catch (const ProtocolError& e) {
      throw AgentFailure(e.what());
    } catch (const json::exception& e) {
      throw AgentFailure(std::string("malformed action: ") + e.what());
    }
  }

  void end(const EpisodeEnd& e) override {
    if (!channel_) return;
    try {
      channel_->send_line(msg::end(e).dump());
    } catch (const ProtocolError&) {
    }
    channel_->close();
    channel_.reset();
  }

  const std::string& client_name() const { return client_name_; }

 private:
  std::string name_;
  SessionSource* source_ = nullptr;
  std::unique_ptr<LineChannel> pending_;
  std::unique_ptr<LineChannel> channel_;
  ExternalAgentOptions opts_;
  std::string client_name_;
};

// ---------------------------------------------------------------------------
// Client side

struct ClientSummary {
  bool accepted = false;
  std::string error;
  std::string termination;
  json record;
  int ticks = 0;
};

/// Reference client: runs an in-process policy over one protocol session.
inline ClientSummary run_client_session(LineChannel& channel, Agent& policy, int version = kProtocolVersion,
                                        std::chrono::milliseconds timeout = std::chrono::milliseconds(30000)) {
  ClientSummary s;
  channel.send_line(msg::hello(policy.descriptor().name, version).dump());
  const auto ack_line = channel.receive_line(timeout);
  if (!ack_line) throw ProtocolError("no hello_ack from server");
  const json ack = msg::parse(*ack_line, "hello_ack");
  s.accepted = ack.value("accepted", false);
  if (!s.accepted) {
    s.error = ack.value("error", std::string{});
    return s;
  }
  policy.begin({ack.at("route_id").get<std::string>(), ack.at("seed").get<std::uint64_t>()});
  while (true) {
    const auto line = channel.receive_line(timeout);
    if (!line) throw ProtocolError("server went silent");
    const json j = json::parse(*line);
    if (j.value("type", std::string{}) == "end") {
      s.termination = j.at("termination").get<std::string>();
      s.record = j.at("record");
      policy.end({s.termination, s.record});
      return s;
    }
    const json o = msg::parse(*line, "observation");
    const Observation obs = o.at("observation").get<Observation>();
    ControlCommand cmd;
    try {
      cmd = policy.act(obs);
    } catch (const std::exception& e) {
      s.error = std::string("policy raised: ") + e.what();
      s.termination = "invalid";
      channel.close();
      return s;
    }
    channel.send_line(msg::action(obs.tick, cmd).dump());
    ++s.ticks;
  }
}

}  // namespace roadjudge
