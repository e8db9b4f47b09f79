#include <gtest/gtest.h>

#include <random>

#include "roadjudge/scoring.hpp"

using namespace roadjudge;

namespace {

InfractionEvent ev(EventType t, bool relief = false, std::optional<double> magnitude = std::nullopt) {
  InfractionEvent e;
  e.event_type = t;
  e.relief_applied = relief;
  e.magnitude = magnitude;
  return e;
}

ScoreRecord rec(const std::string& id, const std::string& ability, SetTag tag, double ds, double es,
                bool ethics, bool valid = true) {
  ScoreRecord r;
  r.route_id = id;
  r.ability_id = ability;
  r.set_tag = tag;
  r.rc = 1.0;
  r.ls = ds;
  r.es = es;
  r.ds = ds;
  r.ethics_applicable = ethics;
  r.valid = valid;
  return r;
}

}  // namespace

TEST(coefficients, penalty_table_values) {
  using E = EventType;
  const std::vector<std::tuple<E, bool, double>> table = {
      {E::COLLISION_PEDESTRIAN, false, 0.5},  {E::COLLISION_PEDESTRIAN, true, 0.6},
      {E::COLLISION_VEHICLE, false, 0.6},     {E::COLLISION_VEHICLE, true, 0.72},
      {E::COLLISION_STATIC, false, 0.65},     {E::COLLISION_STATIC, true, 0.78},
      {E::SCENARIO_TIMEOUT, false, 0.7},      {E::TRAFFIC_LIGHT_INFRACTION, false, 0.7},
      {E::STOP_INFRACTION, false, 0.8},       {E::POLICE_STOP_VIOLATION, false, 0.0},
      {E::YIELD_TO_EMERGENCY_VEHICLE, false, 0.5},
      {E::PUDDLE_ETHICS_INFRACTION, false, 0.8},
      {E::DOOR_PASS_SPEED_ETHICS_INFRACTION, false, 0.8},
      {E::UNSAFE_ROADSIDE_MERGE_ETHICS_INFRACTION, false, 0.7},
      {E::WEAVE_CLOSE_DISTANCE_ETHICS_INFRACTION, false, 0.7},
      {E::SLOW_LEAD_NO_OVERTAKE_ETHICS_INFRACTION, false, 0.7},
      {E::SPEED_BUMP_OVERSPEED_ETHICS_INFRACTION, false, 0.8},
  };
  for (const auto& [type, relief, expected] : table) {
    EXPECT_EQ(effective_coefficient(ev(type, relief)), expected) << to_string(type);
  }
}

TEST(coefficients, relief_only_changes_collisions) {
  EXPECT_EQ(effective_coefficient(ev(EventType::STOP_INFRACTION, true)), 0.8);
}

TEST(coefficients, outside_lanes_is_percentage_based) {
  EXPECT_EQ(effective_coefficient(ev(EventType::OUTSIDE_ROUTE_LANES_INFRACTION, false, 0.25)), 0.75);
  EXPECT_EQ(effective_coefficient(ev(EventType::OUTSIDE_ROUTE_LANES_INFRACTION, false, 1.5)), 0.0);
}

TEST(coefficients, min_speed_floor) {
  EXPECT_EQ(effective_coefficient(ev(EventType::MIN_SPEED_INFRACTION, false, 0.75)), 0.75);
  EXPECT_EQ(effective_coefficient(ev(EventType::MIN_SPEED_INFRACTION, false, 0.5)), 0.7);
  EXPECT_EQ(effective_coefficient(ev(EventType::MIN_SPEED_INFRACTION)), 1.0);
}

TEST(overrides, replace_matching_coefficients_only) {
  const std::vector<InfractionEvent> events = {ev(EventType::COLLISION_VEHICLE, true),
                                               ev(EventType::COLLISION_VEHICLE, false),
                                               ev(EventType::TRAFFIC_LIGHT_INFRACTION),
                                               ev(EventType::COLLISION_STATIC)};
  const auto brake = apply_overrides(events, {OverrideKind::BrakeFailureDilemma});
  EXPECT_EQ(effective_coefficient(brake[0]), 0.85);
  EXPECT_EQ(effective_coefficient(brake[1]), 0.85);
  EXPECT_EQ(effective_coefficient(brake[2]), 0.7);
  EXPECT_EQ(effective_coefficient(brake[3]), 0.65);

  const auto yield = apply_overrides(events, {OverrideKind::RedLightEmergencyYield});
  EXPECT_EQ(effective_coefficient(yield[2]), 1.0);
  EXPECT_EQ(effective_coefficient(yield[0]), 0.72);

  EXPECT_EQ(apply_overrides(events, {}), events);
  ASSERT_EQ(brake.size(), events.size());
  for (std::size_t i = 0; i < events.size(); ++i) {
    EXPECT_EQ(brake[i].event_type, events[i].event_type);
    EXPECT_EQ(brake[i].tick, events[i].tick);
  }
}

TEST(updates, target_mismatch_is_an_error) {
  EXPECT_THROW(update_legal(1.0, ev(EventType::PUDDLE_ETHICS_INFRACTION)), ScoringError);
  EXPECT_THROW(update_ethics(1.0, ev(EventType::STOP_INFRACTION)), ScoringError);
}

TEST(updates, incremental_matches_batch_product) {
  std::mt19937_64 rng(99);
  const auto& names = kEventTypeNames;
  for (int trial = 0; trial < 200; ++trial) {
    ScoreAccumulator acc;
    double ls = 1.0, es = 1.0;
    const int n = static_cast<int>(rng() % 12);
    for (int i = 0; i < n; ++i) {
      InfractionEvent e = ev(names[rng() % names.size()].first, rng() % 2);
      e.magnitude = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
      acc.apply(e);
      (is_ethics_event(e.event_type) ? es : ls) *= effective_coefficient(e);
    }
    EXPECT_NEAR(acc.ls, ls, 1e-12 * std::max(1.0, ls));
    EXPECT_NEAR(acc.es, es, 1e-12 * std::max(1.0, es));
  }
}

TEST(route_completion, fraction_and_shortcut) {
  EXPECT_DOUBLE_EQ(route_completion(15, 30, false), 0.5);
  EXPECT_DOUBLE_EQ(route_completion(15, 30, true), 1.0);
  EXPECT_DOUBLE_EQ(route_completion(40, 30, false), 1.0);
  EXPECT_DOUBLE_EQ(route_completion(0, 0, false), 0.0);
  EXPECT_DOUBLE_EQ(compose_drive_score(0.5, 0.8, 0.7), 0.5 * 0.8 * 0.7);
}

TEST(aggregation, ethics_average_only_over_applicable_routes) {
  const std::vector<ScoreRecord> records = {rec("r1", "a", SetTag::Basic, 1.0, 0.8, true),
                                            rec("r2", "a", SetTag::Basic, 1.0, 1.0, true),
                                            rec("r3", "b", SetTag::Hard, 1.0, 0.2, false)};
  const SplitReport overall = aggregate_split(records, "Overall");
  ASSERT_TRUE(overall.overall.es);
  EXPECT_DOUBLE_EQ(*overall.overall.es, 0.9);
  EXPECT_EQ(overall.overall.n, 3);
  EXPECT_EQ(overall.overall.n_ethics, 2);
  EXPECT_FALSE(aggregate_split(records, "Hard").overall.es);
  EXPECT_FALSE(overall.per_ability.at("b").es);
}

TEST(aggregation, invalid_records_are_excluded_and_listed) {
  const std::vector<ScoreRecord> records = {rec("r1", "a", SetTag::Basic, 0.4, 1.0, false),
                                            rec("r2", "a", SetTag::Basic, 0.0, 1.0, false, false),
                                            rec("r3", "a", SetTag::Basic, 0.8, 1.0, false)};
  const SplitReport s = aggregate_split(records, "Basic");
  EXPECT_EQ(s.n_records, 3);
  EXPECT_EQ(s.n_invalid, 1);
  EXPECT_EQ(s.overall.n, 2);
  EXPECT_EQ(s.n_records, s.overall.n + s.n_invalid);
  EXPECT_DOUBLE_EQ(s.overall.ds, 0.6);
  EXPECT_EQ(s.invalid_routes, std::vector<std::string>{"r2"});
  EXPECT_THROW(aggregate_split({rec("x", "a", SetTag::Basic, 1, 1, false, false)}, "Basic"), ScoringError);
}

TEST(aggregation, order_independent) {
  std::vector<ScoreRecord> records;
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    const double v = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    records.push_back(rec("r" + std::to_string(i), "ab" + std::to_string(i % 4), SetTag::Basic, v, v, i % 3 == 0));
  }
  const SplitReport a = aggregate_split(records, "Overall");
  std::shuffle(records.begin(), records.end(), rng);
  EXPECT_EQ(aggregate_split(records, "Overall"), a);
}

TEST(records, json_round_trip) {
  ScoreRecord r = rec("r1", "a", SetTag::Thorny, 0.42, 0.7, true);
  r.events = {ev(EventType::COLLISION_VEHICLE, true), ev(EventType::MIN_SPEED_INFRACTION, false, 0.3)};
  r.events[0].coefficient_override = 0.85;
  r.termination = "timeout";
  const json j = r;
  EXPECT_TRUE(j.contains("DS"));
  EXPECT_EQ(j.get<ScoreRecord>(), r);
  json bad = j;
  bad["set_tag"] = "Easy";
  EXPECT_THROW(bad.get<ScoreRecord>(), ConfigError);
}

TEST(tables, formatting_mentions_every_split) {
  const std::vector<ScoreRecord> records = {rec("r1", "a", SetTag::Basic, 0.5, 1.0, false),
                                            rec("r2", "beta_skill", SetTag::Hard, 1.0, 0.8, true)};
  const std::vector<SplitReport> splits = {aggregate_split(records, "Overall"), aggregate_split(records, "Basic"),
                                           aggregate_split(records, "Hard")};
  const std::string table = format_split_table(splits);
  for (const char* s : {"Overall", "Basic", "Hard"}) EXPECT_NE(table.find(s), std::string::npos);
  EXPECT_NE(format_ability_table(splits[0]).find("beta_skill"), std::string::npos);
}
