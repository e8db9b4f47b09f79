#include <gtest/gtest.h>

#include <sstream>

#include "roadjudge/io.hpp"
#include "roadjudge/replay.hpp"
#include "test_support.hpp"

using namespace roadjudge;
using namespace rjtest;

namespace {

EpisodeOutcome lawful_plain(double length = 60.0, std::uint64_t seed = 2) {
  const auto inst = instantiate_scenario(plain_template(length), {}, seed, "plain");
  auto agent = make_builtin_agent("lawful_follower");
  return run_episode(inst, *agent, seed);
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::string join(const std::vector<std::string>& lines) {
  std::string s;
  for (const auto& l : lines) s += l + "\n";
  return s;
}

std::string error_of(const std::string& text) {
  try {
    parse_replay(text);
  } catch (const ReplayIntegrityError& e) {
    return e.what();
  }
  return {};
}

/// Drops a cone onto the ego at tick k and brakes on the two ticks leading into it.
EpisodeReplay with_braked_collision(EpisodeReplay r, std::size_t k) {
  r.footer.reset();
  for (std::size_t i = k - 1; i <= k; ++i) r.ticks[i].frame.command = ControlCommand{0.0, 0.0, 0.5, false};
  const auto& ego = r.ticks[k].frame.ego;
  r.ticks[k].frame.actors.push_back(actor("cone", ActorKind::static_obstacle, ego.pose.x, ego.pose.y));
  return r;
}

}  // namespace

TEST(replay, write_parse_round_trip) {
  const auto out = lawful_plain();
  ASSERT_TRUE(out.replay.footer);
  const std::string text = write_replay(out.replay);
  const EpisodeReplay back = parse_replay(text);
  EXPECT_EQ(back, out.replay);
  EXPECT_EQ(write_replay(back), text);
}

TEST(replay, rescoring_reproduces_the_record) {
  for (const char* tid : {"signalized_junction_turn", "police_pull_over", "blind_spot_crossing"}) {
    for (const char* name : {"lawful_follower", "reckless", "ethics_blind"}) {
      const auto inst = builtin_instance(tid);
      auto agent = make_builtin_agent(name);
      const auto out = run_episode(inst, *agent, 4);
      const EpisodeReplay back = parse_replay(write_replay(out.replay));
      EXPECT_EQ(score_replay(back), out.record) << tid << " " << name;
    }
  }
}

TEST(replay, footer_is_optional_for_scoring) {
  const auto out = lawful_plain();
  auto lines = lines_of(write_replay(out.replay));
  lines.pop_back();
  const EpisodeReplay r = parse_replay(join(lines));
  EXPECT_FALSE(r.footer);
  const ScoreRecord rescored = score_replay(r);
  EXPECT_EQ(rescored.termination, out.record.termination);
  EXPECT_EQ(rescored.ds, out.record.ds);
  EXPECT_EQ(rescored.events, out.record.events);
}

TEST(replay, brake_history_decides_collision_relief) {
  const auto out = lawful_plain(150.0);
  ASSERT_GT(out.replay.ticks.size(), 40u);
  const EpisodeReplay braked = with_braked_collision(out.replay, 30);
  const ScoreRecord with_relief = score_replay(braked);
  ASSERT_EQ(count_type(with_relief.events, EventType::COLLISION_STATIC), 1u);
  EXPECT_TRUE(with_relief.events.front().relief_applied);
  EXPECT_DOUBLE_EQ(with_relief.ls, 0.78);

  EpisodeReplay mutated = braked;
  for (std::size_t i = 28; i <= 30; ++i) mutated.ticks[i].frame.command.brake = 0.0;
  const ScoreRecord without = score_replay(mutated);
  ASSERT_EQ(count_type(without.events, EventType::COLLISION_STATIC), 1u);
  EXPECT_FALSE(without.events.front().relief_applied);
  EXPECT_DOUBLE_EQ(without.ls, 0.65);
}

TEST(replay, edited_body_breaks_the_digest) {
  const auto out = lawful_plain();
  auto lines = lines_of(write_replay(out.replay));
  json t = json::parse(lines[5]);
  t["ego"]["speed"] = t["ego"]["speed"].get<double>() + 1.0;
  lines[5] = t.dump();
  EXPECT_NE(error_of(join(lines)).find("body digest mismatch"), std::string::npos);
}

TEST(replay, malformed_and_truncated_lines_name_the_line) {
  const auto out = lawful_plain();
  auto lines = lines_of(write_replay(out.replay));
  auto truncated = lines;
  truncated.pop_back();
  truncated.back().resize(truncated.back().size() / 2);
  EXPECT_EQ(error_of(join(truncated)).rfind("line " + std::to_string(truncated.size()) + ": malformed JSON", 0), 0u);

  auto garbage = lines;
  garbage[3] = "{\"tick\": 2}";
  EXPECT_EQ(error_of(join(garbage)).rfind("line 4: invalid record", 0), 0u);
}

TEST(replay, tick_gap_is_rejected) {
  const auto out = lawful_plain();
  auto lines = lines_of(write_replay(out.replay));
  lines.erase(lines.begin() + 4);
  EXPECT_NE(error_of(join(lines)).find("line 5: tick gap: expected tick 3, found 4"), std::string::npos);
}

TEST(replay, structural_errors) {
  const auto out = lawful_plain();
  auto lines = lines_of(write_replay(out.replay));
  EXPECT_EQ(error_of(""), "empty replay");
  EXPECT_EQ(error_of(lines[0] + "\n"), "replay has no tick records");
  EXPECT_NE(error_of(join(lines) + lines[1] + "\n").find("content after footer"), std::string::npos);
  EXPECT_NE(error_of(lines[1] + "\n").find("not a replay header"), std::string::npos);
}

TEST(replay, engine_config_digest_is_checked) {
  const auto out = lawful_plain();
  auto lines = lines_of(write_replay(out.replay));
  json h = json::parse(lines[0]);
  h["engine"]["max_speed"] = 25.0;
  lines[0] = h.dump();
  EXPECT_NE(error_of(join(lines)).find("engine config digest"), std::string::npos);

  h = json::parse(lines_of(write_replay(out.replay))[0]);
  h["schema_version"] = 2;
  lines[0] = h.dump();
  EXPECT_NE(error_of(join(lines)).find("unsupported replay schema version 2"), std::string::npos);
}

TEST(replay, committed_corpus_rescores_identically) {
  const fs::path dir = fs::path(ROADJUDGE_SOURCE_DIR) / "tests" / "corpus";
  std::size_t n = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".jsonl") continue;
    const EpisodeReplay r = parse_replay(read_text_file(entry.path()));
    ASSERT_TRUE(r.footer) << entry.path();
    EXPECT_EQ(score_replay(r), r.footer->record) << entry.path();
    ++n;
  }
  EXPECT_GE(n, 5u);
}
