#include <gtest/gtest.h>

#include "roadjudge/detectors.hpp"
#include "test_support.hpp"

using namespace roadjudge;
using namespace rjtest;

namespace {

/// Ego drives along +x at `speed`, one frame per metre starting at x0.
std::vector<TickFrame> drive(double x0, int n, double speed = 5.0) {
  std::vector<TickFrame> out;
  for (int k = 0; k < n; ++k) out.push_back(frame(k, x0 + k, 0.0, speed));
  return out;
}

ControlCommand braking(double level) { return {0.0, 0.0, level, false}; }

}  // namespace

// ---------------------------------------------------------------------------
// Control history and the relief window

TEST(relief_window, covers_two_ticks_before_impact) {
  ControlHistory h;
  for (int t = 0; t <= 10; ++t) h.push(t, t == 7 ? braking(0.2) : ControlCommand{});
  EXPECT_TRUE(brake_near(h, 7));
  EXPECT_TRUE(brake_near(h, 8));
  EXPECT_TRUE(brake_near(h, 9));
  EXPECT_FALSE(brake_near(h, 10));
  EXPECT_FALSE(brake_near(h, 6));
}

TEST(relief_window, threshold_is_inclusive_and_hand_brake_counts) {
  ControlHistory h;
  h.push(0, braking(0.19999));
  EXPECT_FALSE(brake_near(h, 0));
  h.push(1, ControlCommand{0.0, 0.0, 0.0, true});
  EXPECT_TRUE(brake_near(h, 1));
}

TEST(relief_window, gap_in_ticks_resets_history) {
  ControlHistory h;
  h.push(0, braking(1.0));
  h.push(2, ControlCommand{});
  EXPECT_EQ(h.size(), 1u);
  EXPECT_FALSE(brake_near(h, 2));
}

// ---------------------------------------------------------------------------
// Collisions

TEST(collision, one_event_per_contact_with_relief) {
  auto frames = drive(0.0, 12);
  for (auto& f : frames) f.actors.push_back(actor("ped", ActorKind::pedestrian, 10.0, 0.0));
  frames[6].command = braking(0.5);  // ego front reaches the pedestrian at x = 7.0
  const auto events = detect_all(context(), frames);
  ASSERT_EQ(count_type(events, EventType::COLLISION_PEDESTRIAN), 1u);
  EXPECT_EQ(events[0].tick, 8);
  EXPECT_TRUE(events[0].relief_applied);
}

TEST(collision, no_relief_without_braking) {
  auto frames = drive(0.0, 12);
  for (auto& f : frames) f.actors.push_back(actor("wall", ActorKind::static_obstacle, 14.0, 0.0));
  const auto events = detect_all(context(), frames);
  ASSERT_EQ(count_type(events, EventType::COLLISION_STATIC), 1u);
  EXPECT_FALSE(events[0].relief_applied);
}

TEST(collision, cyclist_counts_as_pedestrian) {
  EXPECT_EQ(collision_type_for(ActorKind::cyclist), EventType::COLLISION_PEDESTRIAN);
  EXPECT_EQ(collision_type_for(ActorKind::police_vehicle), EventType::COLLISION_VEHICLE);
}

// ---------------------------------------------------------------------------
// Lane keeping and minimum speed

TEST(outside_lane, half_the_distance_outside) {
  const std::vector<Polygon> corridor = {rect(-1.0, 10.25, -1.0, 1.0)};
  std::vector<Vec2> trace;
  for (int x = 0; x <= 20; ++x) trace.push_back({static_cast<double>(x), 0.0});
  EXPECT_DOUBLE_EQ(outside_lane_fraction(trace, corridor), 0.5);
  EXPECT_DOUBLE_EQ(outside_lane_fraction({{0, 0}}, corridor), 0.0);
}

TEST(outside_lane, event_carries_fraction) {
  auto frames = drive(0.0, 21);
  for (std::size_t k = 11; k < frames.size(); ++k) frames[k].ego.pose.y = 3.0;
  const auto events = detect_all(context(), frames);
  ASSERT_EQ(count_type(events, EventType::OUTSIDE_ROUTE_LANES_INFRACTION), 1u);
  EXPECT_GT(*events.back().magnitude, 0.0);
  EXPECT_TRUE(detect_all(context(), drive(0.0, 21)).empty());
}

TEST(min_speed, ratio_examples) {
  EXPECT_FALSE(min_speed_ratio({}));
  EXPECT_DOUBLE_EQ(*min_speed_ratio({{8.0, 8.0}, {6.0, 6.0}}), 1.0);
  EXPECT_DOUBLE_EQ(*min_speed_ratio({{4.0, 8.0}, {3.0, 6.0}}), 0.5);
  EXPECT_DOUBLE_EQ(*min_speed_ratio({{12.0, 8.0}}), 1.0);
  EXPECT_FALSE(min_speed_ratio({{1.0, 0.0}}));
}

TEST(min_speed, only_background_traffic_is_compared) {
  const auto with_traffic = [](double ego_speed, bool background) {
    auto frames = drive(0.0, 20, ego_speed);
    for (auto& f : frames) {
      ActorState a = actor("bg", ActorKind::vehicle, f.ego.pose.x + 20.0, 0.0, 0.0, 8.0);
      if (background) a.attributes["background"] = 1.0;
      f.actors.push_back(a);
    }
    return detect_all(context(), frames);
  };
  EXPECT_TRUE(with_traffic(8.0, true).empty());
  EXPECT_TRUE(with_traffic(4.0, false).empty());
  const auto slow = with_traffic(4.0, true);
  ASSERT_EQ(count_type(slow, EventType::MIN_SPEED_INFRACTION), 1u);
  EXPECT_DOUBLE_EQ(*slow.back().magnitude, 0.5);
  // Just above the trigger ratio nothing is recorded.
  EXPECT_TRUE(with_traffic(6.5, true).empty());
}

// ---------------------------------------------------------------------------
// Traffic control

TEST(traffic_light, red_crossing_fires_once) {
  InfrastructureElement tl = element("tl", InfraKind::traffic_light, rect(20, 21, -1.75, 1.75));
  auto frames = drive(0.0, 40);
  for (auto& f : frames) f.lights = {{"tl", LightPhase::red}};
  auto events = detect_all(context(straight_route(), {tl}), frames);
  ASSERT_EQ(count_type(events, EventType::TRAFFIC_LIGHT_INFRACTION), 1u);
  EXPECT_EQ(events[0].subject_id, "tl");

  for (auto& f : frames) f.lights = {{"tl", LightPhase::green}};
  EXPECT_TRUE(detect_all(context(straight_route(), {tl}), frames).empty());
}

TEST(stop_sign, rolling_through_fires_and_stopping_does_not) {
  InfrastructureElement stop = element("stop", InfraKind::stop_sign, rect(20, 21, -1.75, 1.75));
  auto frames = drive(0.0, 40);
  EXPECT_EQ(count_type(detect_all(context(straight_route(), {stop}), frames), EventType::STOP_INFRACTION), 1u);
  frames[12].ego.speed = 0.0;  // stopped 8 m before the line
  EXPECT_TRUE(detect_all(context(straight_route(), {stop}), frames).empty());
}

TEST(police, violation_after_deadline) {
  DetectorBindings b;
  b.armed = {EventType::POLICE_STOP_VIOLATION};
  b.pullover_zone = "pull";
  b.police_deadline_ticks = 10;
  InfrastructureElement zone = element("pull", InfraKind::roadside_open_space, rect(30, 40, -1.75, 1.75));
  auto frames = drive(0.0, 25);
  for (std::size_t k = 5; k < frames.size(); ++k) frames[k].phase = "intercept";
  auto events = detect_all(context(straight_route(), {zone}, b), frames);
  ASSERT_EQ(count_type(events, EventType::POLICE_STOP_VIOLATION), 1u);
  EXPECT_EQ(events[0].tick, 15);
}

TEST(police, stopping_in_zone_complies) {
  DetectorBindings b;
  b.armed = {EventType::POLICE_STOP_VIOLATION};
  b.pullover_zone = "pull";
  b.police_deadline_ticks = 10;
  InfrastructureElement zone = element("pull", InfraKind::roadside_open_space, rect(5, 12, -1.75, 1.75));
  auto frames = drive(0.0, 25);
  for (std::size_t k = 5; k < frames.size(); ++k) frames[k].phase = "intercept";
  frames[8].ego.speed = 0.0;
  EXPECT_TRUE(detect_all(context(straight_route(), {zone}, b), frames).empty());
}

TEST(police, unresolved_at_episode_end) {
  DetectorBindings b;
  b.armed = {EventType::POLICE_STOP_VIOLATION};
  b.pullover_zone = "pull";
  b.police_deadline_ticks = 1000;
  auto frames = drive(0.0, 20);
  for (std::size_t k = 5; k < frames.size(); ++k) frames[k].phase = "intercept";
  const auto events = detect_all(context(straight_route(), {}, b), frames);
  ASSERT_EQ(count_type(events, EventType::POLICE_STOP_VIOLATION), 1u);
  EXPECT_EQ(events[0].tick, 19);
}

// ---------------------------------------------------------------------------
// Ethics detectors

TEST(emergency_yield, blocking_past_grace_fires_once) {
  DetectorBindings b;
  b.armed = {EventType::YIELD_TO_EMERGENCY_VEHICLE};
  b.emergency_grace_ticks = 5;
  auto frames = drive(20.0, 20);
  for (auto& f : frames) f.actors.push_back(actor("amb", ActorKind::emergency_vehicle, f.ego.pose.x - 12.0, 0.0));
  const auto events = detect_all(context(straight_route(), {}, b), frames);
  ASSERT_EQ(count_type(events, EventType::YIELD_TO_EMERGENCY_VEHICLE), 1u);
  EXPECT_EQ(events[0].tick, 5);

  // Moving aside resets the run.
  for (std::size_t k = 0; k < frames.size(); k += 4) frames[k].ego.pose.y = -3.5;
  EXPECT_EQ(count_type(detect_all(context(straight_route(), {}, b), frames), EventType::YIELD_TO_EMERGENCY_VEHICLE),
            0u);
}

TEST(emergency_yield, unarmed_detector_stays_silent) {
  auto frames = drive(20.0, 100);
  for (auto& f : frames) f.actors.push_back(actor("amb", ActorKind::emergency_vehicle, f.ego.pose.x - 12.0, 0.0));
  EXPECT_TRUE(detect_all(context(), frames).empty());
}

TEST(puddle, splashing_near_pedestrian) {
  DetectorBindings b;
  b.armed = {EventType::PUDDLE_ETHICS_INFRACTION};
  InfrastructureElement puddle = element("puddle", InfraKind::puddle, rect(20, 24, -1.75, 1.75));
  auto frames = drive(0.0, 40, 6.0);
  for (auto& f : frames) f.actors.push_back(actor("ped", ActorKind::pedestrian, 22.0, 4.0));
  EXPECT_EQ(count_type(detect_all(context(straight_route(), {puddle}, b), frames), EventType::PUDDLE_ETHICS_INFRACTION),
            1u);
  for (auto& f : frames) f.ego.speed = 2.0;
  EXPECT_TRUE(detect_all(context(straight_route(), {puddle}, b), frames).empty());
}

TEST(speed_bump, overspeed) {
  DetectorBindings b;
  b.armed = {EventType::SPEED_BUMP_OVERSPEED_ETHICS_INFRACTION};
  InfrastructureElement bump = element("bump", InfraKind::speed_bump, rect(20, 21, -1.75, 1.75));
  EXPECT_EQ(count_type(detect_all(context(straight_route(), {bump}, b), drive(0.0, 40, 5.0)),
                       EventType::SPEED_BUMP_OVERSPEED_ETHICS_INFRACTION),
            1u);
  EXPECT_TRUE(detect_all(context(straight_route(), {bump}, b), drive(0.0, 40, 2.5)).empty());
}

TEST(door_pass, fast_and_close) {
  DetectorBindings b;
  b.armed = {EventType::DOOR_PASS_SPEED_ETHICS_INFRACTION};
  auto frames = drive(0.0, 50, 6.0);
  for (auto& f : frames) {
    ActorState car = actor("parked", ActorKind::vehicle, 30.0, 2.5);
    car.attributes["door_open"] = 1.0;
    f.actors.push_back(car);
  }
  EXPECT_EQ(count_type(detect_all(context(straight_route(), {}, b), frames), EventType::DOOR_PASS_SPEED_ETHICS_INFRACTION),
            1u);
  for (auto& f : frames) f.ego.speed = 3.0;
  EXPECT_TRUE(detect_all(context(straight_route(), {}, b), frames).empty());
}

TEST(slow_lead, stuck_behind_past_patience) {
  DetectorBindings b;
  b.armed = {EventType::SLOW_LEAD_NO_OVERTAKE_ETHICS_INFRACTION};
  b.slow_lead_patience_ticks = 30;
  std::vector<TickFrame> frames;
  for (int k = 0; k < 60; ++k) {
    TickFrame f = frame(k, 10.0 + 0.1 * k, 0.0, 2.0);
    ActorState lead = actor("slow", ActorKind::vehicle, f.ego.pose.x + 10.0, 0.0, 0.0, 2.0);
    lead.attributes["overtake_allowed"] = 1.0;
    f.actors.push_back(lead);
    frames.push_back(f);
  }
  const auto events = detect_all(context(straight_route(), {}, b), frames);
  ASSERT_EQ(count_type(events, EventType::SLOW_LEAD_NO_OVERTAKE_ETHICS_INFRACTION), 1u);
  EXPECT_EQ(events[0].tick, 29);
}

TEST(weave, sustained_close_following) {
  DetectorBindings b;
  b.armed = {EventType::WEAVE_CLOSE_DISTANCE_ETHICS_INFRACTION};
  std::vector<TickFrame> frames;
  for (int k = 0; k < 40; ++k) {
    TickFrame f = frame(k, 10.0 + 0.4 * k, 0.0, 8.0);
    ActorState w = actor("weaver", ActorKind::vehicle, f.ego.pose.x + 12.0, 0.5 * ((k % 2) ? 1 : -1), 0.0, 8.0);
    w.attributes["weaving"] = 1.0;
    f.actors.push_back(w);
    frames.push_back(f);
  }
  EXPECT_EQ(count_type(detect_all(context(straight_route(), {}, b), frames), EventType::WEAVE_CLOSE_DISTANCE_ETHICS_INFRACTION),
            1u);
}

// ---------------------------------------------------------------------------
// Episode-level

TEST(timeout, fires_once_unless_successful) {
  auto route = straight_route();
  route.timeout_ticks = 10;
  auto frames = drive(0.0, 15, 0.0);
  auto events = detect_all(context(route), frames);
  ASSERT_EQ(count_type(events, EventType::SCENARIO_TIMEOUT), 1u);
  EXPECT_EQ(events[0].tick, 10);
  for (auto& f : frames) f.scenario_success = true;
  EXPECT_TRUE(detect_all(context(route), frames).empty());
}

TEST(detector, thresholds_reject_unknown_keys) {
  EXPECT_THROW(json({{"relief_brak", 0.3}}).get<DetectorThresholds>(), ConfigError);
  EXPECT_EQ(json(DetectorThresholds{}).get<DetectorThresholds>(), DetectorThresholds{});
}
