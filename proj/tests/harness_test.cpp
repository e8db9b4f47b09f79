#include <gtest/gtest.h>

#include "test_support.hpp"

using namespace roadjudge;
using namespace rjtest;

namespace {

class ThrowingAgent final : public Agent {
 public:
  explicit ThrowingAgent(int fail_at) : fail_at_(fail_at) {}
  AgentDescriptor descriptor() const override { return {"throwing", AgentKind::builtin, 0}; }
  ControlCommand act(const Observation& obs) override {
    if (obs.tick == fail_at_) throw std::runtime_error("policy bug");
    return {0.5, 0.0, 0.0, false};
  }

 private:
  int fail_at_;
};

std::vector<SuiteJob> subset_jobs(std::size_t n) {
  SuiteManifest m = generate_suite();
  std::vector<SuiteJob> jobs = suite_jobs(m);
  std::vector<SuiteJob> out;
  // Spread the subset over the catalog.
  for (std::size_t i = 0; i < jobs.size() && out.size() < n; i += jobs.size() / n) out.push_back(jobs[i]);
  return out;
}

AgentFactory builtin(const std::string& name) {
  return [name] { return make_builtin_agent(name); };
}

}  // namespace

TEST(agents, reckless_output_is_constant) {
  auto a = make_builtin_agent("reckless");
  const auto inst = builtin_instance("signalized_junction_turn");
  a->begin({"r", 1});
  for (std::int64_t t = 0; t < 20; ++t) {
    Observation o = observe(inst.world, RouteContext(inst.route, inst.bindings), "", 0);
    o.tick = t;
    const ControlCommand c = a->act(o);
    EXPECT_EQ(c.throttle, 1.0);
    EXPECT_EQ(c.steer, 0.0);
    EXPECT_EQ(c.brake, 0.0);
  }
}

TEST(agents, unknown_builtin_is_a_config_error) { EXPECT_THROW(make_builtin_agent("nobody"), ConfigError); }

TEST(agents, random_agent_is_keyed_on_seed_and_tick) {
  const auto inst = builtin_instance("signalized_junction_turn");
  Observation o = observe(inst.world, RouteContext(inst.route, inst.bindings), "", 0);
  auto a = make_builtin_agent("random");
  auto b = make_builtin_agent("random");
  a->begin({"r", 5});
  b->begin({"r", 5});
  for (std::int64_t t = 0; t < 10; ++t) {
    o.tick = t;
    const ControlCommand ca = a->act(o);
    EXPECT_EQ(ca, b->act(o));
    ControlCommand clamped = ca;
    EXPECT_FALSE(clamp_command(clamped));
  }
}

TEST(episode, lawful_on_empty_straight_route_scores_one) {
  const auto inst = instantiate_scenario(plain_template(150.0), {}, 1, "empty");
  auto agent = make_builtin_agent("lawful_follower");
  const auto out = run_episode(inst, *agent, 1);
  EXPECT_TRUE(out.record.valid);
  EXPECT_EQ(out.record.termination, "route_complete");
  EXPECT_TRUE(out.record.events.empty());
  EXPECT_EQ(out.record.rc, 1.0);
  EXPECT_EQ(out.record.ds, 1.0);
}

TEST(episode, lawful_brakes_firmly_before_a_red_light) {
  const auto inst = builtin_instance("signalized_junction_turn", 0);
  auto agent = make_builtin_agent("lawful_follower");
  const auto out = run_episode(inst, *agent, 3);
  EXPECT_EQ(count_type(out.record.events, EventType::TRAFFIC_LIGHT_INFRACTION), 0u);
  double max_brake = 0.0;
  for (const auto& t : out.replay.ticks) {
    const bool red = std::any_of(t.frame.lights.begin(), t.frame.lights.end(),
                                 [](const LightSnapshot& l) { return l.phase == LightPhase::red; });
    if (red) max_brake = std::max(max_brake, t.frame.command.brake);
  }
  EXPECT_GE(max_brake, 0.2);
}

TEST(episode, reckless_runs_the_red_light) {
  const ScenarioTemplate& t = *find_template(builtin_templates(), "signalized_junction_turn");
  const auto inst = instantiate_scenario(t, {{"turn", 0}}, 7, "sig_straight");
  auto reckless = make_builtin_agent("reckless");
  const auto out = run_episode(inst, *reckless, 7);
  ASSERT_EQ(out.record.events.size(), 1u);
  EXPECT_EQ(out.record.events[0].event_type, EventType::TRAFFIC_LIGHT_INFRACTION);
  EXPECT_DOUBLE_EQ(out.record.ls, 0.7);
  EXPECT_EQ(out.record.rc, 1.0);

  auto lawful = make_builtin_agent("lawful_follower");
  const auto good = run_episode(inst, *lawful, 7);
  EXPECT_TRUE(good.record.events.empty());
  EXPECT_EQ(good.record.ds, 1.0);
}

TEST(episode, same_seed_same_replay) {
  const auto inst = builtin_instance("blind_spot_crossing");
  for (const char* name : {"lawful_follower", "random", "timid"}) {
    auto a = make_builtin_agent(name);
    auto b = make_builtin_agent(name);
    const auto ra = run_episode(inst, *a, 11);
    const auto rb = run_episode(inst, *b, 11);
    EXPECT_EQ(ra.replay, rb.replay) << name;
    EXPECT_EQ(ra.record, rb.record) << name;
  }
}

TEST(episode, agent_exception_is_an_invalid_record) {
  const auto inst = instantiate_scenario(plain_template(), {}, 1, "plain");
  ThrowingAgent agent(5);
  const auto out = run_episode(inst, agent, 1);
  EXPECT_FALSE(out.record.valid);
  EXPECT_EQ(out.record.termination, "invalid");
  EXPECT_NE(out.record.invalid_reason.find("policy bug"), std::string::npos);
}

TEST(suite_runs, parallelism_does_not_change_results) {
  const auto jobs = subset_jobs(12);
  const SuiteReport serial = run_suite(jobs, builtin("random"), {1, {}, {}});
  const SuiteReport parallel = run_suite(jobs, builtin("random"), {8, {}, {}});
  EXPECT_EQ(serial, parallel);
  EXPECT_EQ(json(serial).dump(), json(parallel).dump());
}

TEST(suite_runs, crashing_episodes_stay_isolated) {
  const auto jobs = subset_jobs(6);
  int made = 0;
  std::mutex m;
  const AgentFactory flaky = [&]() -> std::unique_ptr<Agent> {
    std::lock_guard lock(m);
    if (made++ == 1) throw std::runtime_error("factory down");
    if (made == 4) return std::make_unique<ThrowingAgent>(2);
    return make_builtin_agent("lawful_follower");
  };
  const SuiteReport rep = run_suite(jobs, flaky, {1, {}, {}});
  ASSERT_EQ(rep.records.size(), jobs.size());
  int invalid = 0;
  for (const auto& r : rep.records) invalid += r.valid ? 0 : 1;
  EXPECT_EQ(invalid, 2);
  ASSERT_FALSE(rep.splits.empty());
  const SplitReport& overall = rep.splits.front();
  EXPECT_EQ(overall.split_tag, "Overall");
  EXPECT_EQ(overall.n_records, static_cast<int>(jobs.size()));
  EXPECT_EQ(overall.n_invalid, 2);
  EXPECT_EQ(overall.overall.n, static_cast<int>(jobs.size()) - 2);
}

TEST(suite_runs, report_json_round_trip) {
  const SuiteReport rep = run_suite(subset_jobs(4), builtin("lawful_follower"));
  EXPECT_EQ(json(rep).get<SuiteReport>(), rep);
}

TEST(suite_runs, roster_ordering_and_bookkeeping) {
  const auto jobs = suite_jobs(generate_suite());
  std::map<std::string, double> ds;
  for (const char* name : {"lawful_follower", "ethics_blind", "timid", "reckless"}) {
    const SuiteReport rep = run_suite(jobs, builtin(name));
    int invalid = 0;
    for (const auto& r : rep.records) invalid += r.valid ? 0 : 1;
    int set_total = 0;
    for (const auto& s : rep.splits) {
      if (s.split_tag != "Overall") set_total += s.n_records;
    }
    EXPECT_EQ(set_total, static_cast<int>(jobs.size())) << name;
    EXPECT_EQ(rep.splits.front().overall.n, set_total - invalid) << name;
    ds[name] = rep.splits.front().overall.ds;
  }
  EXPECT_GT(ds["lawful_follower"], ds["ethics_blind"]);
  EXPECT_GT(ds["ethics_blind"], ds["timid"]);
  EXPECT_GT(ds["timid"], ds["reckless"]);
}
