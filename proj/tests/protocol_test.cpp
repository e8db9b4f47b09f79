#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <thread>

#include "roadjudge/io.hpp"
#include "roadjudge/protocol.hpp"
#include "test_support.hpp"

using namespace roadjudge;
using namespace std::chrono_literals;

namespace {

/// Client-side channel that records every line it sends and receives.
class RecordingChannel final : public LineChannel {
 public:
  explicit RecordingChannel(LineChannel& inner) : inner_(inner) {}
  void send_line(const std::string& line) override {
    lines.push_back("c2s " + line);
    inner_.send_line(line);
  }
  std::optional<std::string> receive_line(std::chrono::milliseconds timeout) override {
    auto line = inner_.receive_line(timeout);
    if (line) lines.push_back("s2c " + *line);
    return line;
  }
  void close() override { inner_.close(); }
  std::vector<std::string> lines;

 private:
  LineChannel& inner_;
};

class ScriptedPolicy final : public Agent {
 public:
  explicit ScriptedPolicy(std::function<ControlCommand(const Observation&)> f) : f_(std::move(f)) {}
  AgentDescriptor descriptor() const override { return {"scripted", AgentKind::builtin, 0}; }
  ControlCommand act(const Observation& obs) override { return f_(obs); }

 private:
  std::function<ControlCommand(const Observation&)> f_;
};

struct Served {
  EpisodeOutcome outcome;
  ClientSummary summary;
  std::string client_error;
  std::vector<std::string> transcript;
  std::vector<std::string> warnings;
};

/// Runs one episode with the policy on the far side of an in-memory protocol session.
Served serve(const ScenarioInstance& inst, Agent& policy, std::uint64_t seed, int client_version = kProtocolVersion,
             std::chrono::milliseconds deadline = kDefaultActionDeadline) {
  Served s;
  auto [server_end, client_end] = MemoryChannel::make_pair();
  ExternalAgentOptions opts;
  opts.action_deadline = deadline;
  opts.warn = [&s](const std::string& w) { s.warnings.push_back(w); };
  ExternalAgent agent("external:memory", std::move(server_end), opts);
  std::thread client([&, ch = client_end.get()] {
    RecordingChannel rec(*ch);
    try {
      s.summary = run_client_session(rec, policy, client_version, 5000ms);
    } catch (const std::exception& e) {
      s.client_error = e.what();
    }
    s.transcript = rec.lines;
  });
  s.outcome = run_episode(inst, agent, seed);
  client.join();
  return s;
}

ScenarioInstance short_plain_route(double length = 30.0) {
  return instantiate_scenario(rjtest::plain_template(length), {}, 1, "plain_short");
}

fs::path golden_dir() { return fs::path(ROADJUDGE_SOURCE_DIR) / "tests" / "golden"; }

void check_golden(const std::string& name, const std::vector<std::string>& lines) {
  std::string text;
  for (const auto& l : lines) text += l + "\n";
  const fs::path p = golden_dir() / name;
  if (std::getenv("ROADJUDGE_UPDATE_GOLDEN")) {
    write_text_file(p, text);
    return;
  }
  ASSERT_TRUE(fs::exists(p)) << p << " missing; rerun with ROADJUDGE_UPDATE_GOLDEN=1";
  EXPECT_EQ(read_text_file(p), text) << "transcript differs from " << p;
}

}  // namespace

TEST(protocol_messages, parse_checks_type_and_syntax) {
  EXPECT_EQ(msg::parse(msg::hello("a").dump(), "hello").at("agent_name"), "a");
  EXPECT_THROW(msg::parse("{not json", "hello"), ProtocolError);
  EXPECT_THROW(msg::parse("[1,2]", "hello"), ProtocolError);
  EXPECT_THROW(msg::parse(msg::hello("a").dump(), "action"), ProtocolError);
}

TEST(protocol_messages, endpoint_parsing) {
  const Endpoint e = parse_endpoint("localhost:9000");
  EXPECT_EQ(e.host, "localhost");
  EXPECT_EQ(e.port, 9000);
  EXPECT_EQ(parse_endpoint(":7").host, "127.0.0.1");
  EXPECT_THROW(parse_endpoint("host:port"), ConfigError);
  EXPECT_THROW(parse_endpoint("host:70000"), ConfigError);
  EXPECT_THROW(parse_endpoint("host:12x"), ConfigError);
}

TEST(protocol_session, handshake_and_episode_match_in_process) {
  const auto inst = short_plain_route(150.0);
  auto local = make_builtin_agent("lawful_follower");
  const auto in_process = run_episode(inst, *local, 3);

  auto remote_policy = make_builtin_agent("lawful_follower");
  const Served s = serve(inst, *remote_policy, 3);
  ASSERT_TRUE(s.summary.accepted) << s.summary.error;
  EXPECT_EQ(s.summary.termination, "route_complete");
  EXPECT_EQ(s.summary.record.get<ScoreRecord>(), in_process.record);
  EXPECT_EQ(s.outcome.record, in_process.record);
  EXPECT_EQ(s.outcome.replay.ticks, in_process.replay.ticks);
  EXPECT_EQ(in_process.record.ds, 1.0);
  EXPECT_EQ(s.outcome.replay.header.agent.kind, AgentKind::external);
  EXPECT_TRUE(s.warnings.empty());
}

TEST(protocol_session, constant_throttle_matches_reckless_bit_exactly) {
  const auto inst = rjtest::builtin_instance("signalized_junction_turn");
  auto local = make_builtin_agent("reckless");
  const auto in_process = run_episode(inst, *local, 9);
  ScriptedPolicy full_throttle([](const Observation&) { return ControlCommand{1.0, 0.0, 0.0, false}; });
  const Served s = serve(inst, full_throttle, 9);
  EXPECT_EQ(s.outcome.record, in_process.record);
  EXPECT_EQ(s.outcome.replay.ticks, in_process.replay.ticks);
  EXPECT_EQ(body_digest(s.outcome.replay.ticks), body_digest(in_process.replay.ticks));
}

TEST(protocol_session, out_of_range_action_is_clamped_with_warning) {
  const auto inst = short_plain_route();
  ScriptedPolicy eager([](const Observation& o) {
    return o.tick == 0 ? ControlCommand{1.7, 0.0, 0.0, false} : ControlCommand{0.3, 0.0, 0.0, false};
  });
  const Served s = serve(inst, eager, 1);
  ASSERT_FALSE(s.warnings.empty());
  EXPECT_NE(s.warnings[0].find("clamped"), std::string::npos);
  EXPECT_EQ(s.outcome.replay.ticks.at(1).frame.command.throttle, 1.0);
  EXPECT_TRUE(s.outcome.record.valid);
}

TEST(protocol_session, missing_action_invalidates_episode) {
  const auto inst = short_plain_route();
  ScriptedPolicy slow([](const Observation& o) {
    if (o.tick == 2) std::this_thread::sleep_for(400ms);
    return ControlCommand{0.5, 0.0, 0.0, false};
  });
  const Served s = serve(inst, slow, 1, kProtocolVersion, 100ms);
  EXPECT_FALSE(s.outcome.record.valid);
  EXPECT_EQ(s.outcome.record.termination, "invalid");
  EXPECT_NE(s.outcome.record.invalid_reason.find("no action within 100 ms"), std::string::npos);
  // The engine never advanced past the unanswered observation.
  EXPECT_EQ(s.outcome.replay.ticks.size(), 3u);
}

TEST(protocol_session, version_mismatch_is_refused_verbatim) {
  const auto inst = short_plain_route();
  auto policy = make_builtin_agent("lawful_follower");
  const Served s = serve(inst, *policy, 1, kProtocolVersion + 1);
  EXPECT_FALSE(s.summary.accepted);
  EXPECT_EQ(s.summary.error, "protocol version mismatch: server speaks 1, client sent 2");
  EXPECT_FALSE(s.outcome.record.valid);
  EXPECT_NE(s.outcome.record.invalid_reason.find(s.summary.error), std::string::npos);
  check_golden("handshake_refused.txt", s.transcript);
}

TEST(protocol_session, raising_policy_closes_cleanly) {
  const auto inst = short_plain_route();
  ScriptedPolicy broken([](const Observation&) -> ControlCommand { throw std::runtime_error("boom"); });
  const Served s = serve(inst, broken, 1);
  EXPECT_TRUE(s.client_error.empty()) << s.client_error;
  EXPECT_EQ(s.summary.termination, "invalid");
  EXPECT_EQ(s.summary.error, "policy raised: boom");
  EXPECT_FALSE(s.outcome.record.valid);
}

TEST(protocol_session, golden_transcript_plain_route) {
  const auto inst = short_plain_route();
  auto policy = make_builtin_agent("lawful_follower");
  const Served s = serve(inst, *policy, 1);
  ASSERT_TRUE(s.summary.accepted);
  ASSERT_GE(s.transcript.size(), 4u);
  EXPECT_EQ(s.transcript.front().rfind("c2s {\"agent_name\":\"lawful_follower\"", 0), 0u);
  check_golden("plain_route_lawful.txt", s.transcript);
}

TEST(protocol_tcp, loopback_matches_in_process_across_seeds) {
  TcpListener listener(Endpoint{"127.0.0.1", 0});
  const auto inst = short_plain_route(60.0);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto local = make_builtin_agent("lawful_follower");
    const auto in_process = run_episode(inst, *local, seed);
    ClientSummary summary;
    std::thread client([&] {
      auto ch = tcp_connect(Endpoint{"127.0.0.1", listener.port()});
      auto policy = make_builtin_agent("lawful_follower");
      summary = run_client_session(*ch, *policy);
    });
    ExternalAgentOptions opts;
    opts.connect_timeout = 5000ms;
    ExternalAgent agent("external:tcp", listener, opts);
    const auto remote = run_episode(inst, agent, seed);
    client.join();
    EXPECT_EQ(remote.record, in_process.record) << seed;
    EXPECT_EQ(remote.replay.ticks, in_process.replay.ticks) << seed;
    EXPECT_EQ(summary.record.get<ScoreRecord>(), in_process.record) << seed;
  }
}

TEST(protocol_tcp, absent_server_is_a_connection_error) {
  int port = 0;
  {
    TcpListener probe(Endpoint{"127.0.0.1", 0});
    port = probe.port();
  }
  EXPECT_THROW(tcp_connect(Endpoint{"127.0.0.1", port}), ProtocolError);
}

TEST(protocol_tcp, no_client_within_connect_timeout) {
  TcpListener listener(Endpoint{"127.0.0.1", 0});
  ExternalAgentOptions opts;
  opts.connect_timeout = 50ms;
  ExternalAgent agent("external:tcp", listener, opts);
  const auto out = run_episode(short_plain_route(), agent, 1);
  EXPECT_FALSE(out.record.valid);
  EXPECT_NE(out.record.invalid_reason.find("no agent connected"), std::string::npos);
}
