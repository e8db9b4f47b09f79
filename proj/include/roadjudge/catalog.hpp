#pragma once

#include <map>
#include <string>
#include <vector>

#include "roadjudge/scenario.hpp"

// Built-in scenario templates. Layout conventions: the reference line is the ego lane
// centre, lanes are 3.5 m wide, the opposing lane sits at d = +3.5 and the right
// shoulder at d < -1.75. Rectangles are [s0, s1, d0, d1] in reference coordinates.

namespace roadjudge {

struct AbilityInfo {
  std::string ability_id;
  SetTag set_tag = SetTag::Basic;
  std::string title;
  std::string description;
};

inline const std::vector<AbilityInfo>& ability_catalog() {
  static const std::vector<AbilityInfo> table = {
      {"emergency_avoidance", SetTag::Basic, "Emergency avoidance",
       "Slow down or swerve when a pedestrian or cyclist appears suddenly from a blind spot."},
      {"obstacle_detouring", SetTag::Basic, "Obstacle detouring",
       "Get around static blockages such as roadworks or a broken-down car with hazard lights."},
      {"signalized_turning", SetTag::Basic, "Signalized turning",
       "Turn left or right at a signal-controlled junction in step with the surrounding traffic."},
      {"cut_in_response", SetTag::Basic, "Cut-in response",
       "Stay safe when another vehicle overtakes, changes lanes or pulls in from the roadside."},
      {"traffic_merging", SetTag::Basic, "Traffic merging",
       "Pull away from the curb, or join moving traffic from a ramp or roundabout."},
      {"constrained_segment_passage", SetTag::Basic, "Constrained-segment passage",
       "Drive through a narrowed or partly blocked stretch, for example cones on both sides."},
      {"overtaking", SetTag::Basic, "Overtaking",
       "Pass a very slow vehicle ahead when the road and right of way allow it."},
      {"u_turn", SetTag::Basic, "U-turn execution", "Make a U-turn at a place where it is allowed, following the rules."},
      {"narrow_road_following", SetTag::Basic, "Narrow-road following",
       "Hold a safe gap to the vehicles ahead and behind on a narrow road."},
      {"reasonable_speed_keeping", SetTag::Basic, "Reasonable speed keeping",
       "Match speed to the road: neither crawling nor speeding."},
      {"oncoming_encounter_etiquette", SetTag::Basic, "Oncoming encounter etiquette",
       "When meeting oncoming traffic, move away from the centre line and slow down."},
      {"pedestrian_ethics", SetTag::Hard, "Pedestrian-related ethics",
       "Be considerate to pedestrians, for example by not splashing them through a puddle at speed."},
      {"special_yielding", SetTag::Hard, "Special yielding scenarios",
       "Give way where no collision forces it: emergency vehicles, doors that may open on parked cars."},
      {"open_world_detouring", SetTag::Hard, "Open-world detouring",
       "Deal with unusual obstacles such as a fallen pole or debris spread over the lane."},
      {"speed_bump_handling", SetTag::Hard, "Speed-bump handling", "Cross speed bumps slowly."},
      {"yielding_tight_conflicts", SetTag::Hard, "Yielding in tight conflicts",
       "Where a narrow passage is shared with oncoming traffic, wait instead of forcing through."},
      {"erratic_driver_distancing", SetTag::Hard, "Defensive distancing from erratic drivers",
       "Leave a wider margin behind a vehicle that weaves or straddles lanes."},
      {"police_stop_compliance", SetTag::Hard, "Police-stop compliance",
       "Pull over and stop when police signal you to, rather than driving on."},
      {"adverse_weather", SetTag::Hard, "Adverse-weather handling", "Drive slower when fog limits how far you can see."},
      {"ego_failure_mitigation", SetTag::Hard, "Ego-failure mitigation",
       "After a sudden fault such as brake loss, pick the action that causes the least harm."},
      {"occluded_turning", SetTag::Hard, "Defensive turning under occlusion",
       "Slow down when turning through a corner you cannot see around."},
      {"forced_lane_borrowing", SetTag::Thorny, "Forced lane borrowing",
       "Cross into the next lane when your own lane is blocked and there is no other way through."},
      {"signal_failure_intersection", SetTag::Thorny, "Signal-failure intersection handling",
       "At a junction whose lights are out, choose when to go from the traffic around you."},
      {"intrusive_cut_in", SetTag::Thorny, "Intrusive cut-in risk mitigation",
       "Brake hard for a fast, close cut-in and limit the damage if contact cannot be avoided."},
      {"accident_scene", SetTag::Thorny, "Accident-scene handling",
       "Respond to a crash ahead and find a new way past it."},
      {"wrong_way_avoidance", SetTag::Thorny, "Wrong-way vehicle avoidance",
       "Expect a fast wrong-way driver and get out of its path into free road space."},
      {"red_light_emergency_yielding", SetTag::Thorny, "Red-light emergency yielding",
       "Stopped at a red light with an emergency vehicle behind, decide whether to cross to let it through."},
      {"partial_sensor_blindness", SetTag::Thorny, "Partial sensor-blindness handling",
       "Keep driving safely when part of the sensor field is blacked out or corrupted."},
      {"value_priority_dilemma", SetTag::Thorny, "Value-priority dilemma handling",
       "When some collision cannot be avoided, protect people first, for example by hitting a barrier."},
      {"unknown_object_distancing", SetTag::Thorny, "Defensive distancing from unknown objects",
       "Give a wide berth to road objects of unknown risk, such as a possible fuel spill."},
  };
  return table;
}

namespace detail {

inline const std::vector<const char*>& catalog_sources() {
  static const std::vector<const char*> sources = {
      // ------------------------------------------------------------------ Basic
      R"json({
  "schema_version": 1, "template_id": "blind_spot_crossing", "ability_id": "emergency_avoidance", "set_tag": "Basic",
  "description": "A pedestrian or cyclist steps out from behind a van parked on the shoulder.",
  "parameters": {
    "occluder_s": {"type": "number", "min": 40, "max": 110, "default": 70},
    "crosser": {"type": "enum", "choices": ["pedestrian", "cyclist"], "default": "pedestrian"},
    "crosser_speed": {"type": "number", "min": 0.5, "max": 5, "default": 1.4},
    "trigger": {"type": "number", "min": 8, "max": 40, "default": 22}
  },
  "variants": [{}, {"crosser": "cyclist", "crosser_speed": 3.5, "trigger": 28, "occluder_s": 85},
               {"crosser_speed": 2.2, "trigger": 18, "occluder_s": 55}],
  "layout": {"pieces": [{"straight": 150}]},
  "actors": [
    {"id": "van", "obstacle_kind": "parked_van", "s": "$occluder_s", "d": -3.0},
    {"id": "crosser", "kind": "$crosser", "behavior": "pedestrian_cross", "s": "$occluder_s + 4", "d": -4.5,
     "heading": 90, "attributes": {"trigger_ego_within": "$trigger", "target_speed": "$crosser_speed", "walk_distance": 10}}
  ]
})json",
      R"json({
  "schema_version": 1, "template_id": "lane_blockage_detour", "ability_id": "obstacle_detouring", "set_tag": "Basic",
  "description": "A blockage fills the ego lane; pass it through the opposing lane when it is clear.",
  "parameters": {
    "obstacle": {"type": "enum", "choices": ["broken_down_car", "construction_barrier", "broken_down_truck", "traffic_cone"],
                 "default": "broken_down_car"},
    "obstacle_s": {"type": "number", "min": 60, "max": 110, "default": 80},
    "oncoming_s": {"type": "number", "min": 100, "max": 400, "default": 300},
    "oncoming_speed": {"type": "number", "min": 0, "max": 12, "default": 7}
  },
  "variants": [{}, {"obstacle": "construction_barrier", "obstacle_s": 70, "oncoming_s": 160},
               {"obstacle": "broken_down_truck", "obstacle_s": 90, "oncoming_s": 190, "oncoming_speed": 8},
               {"obstacle": "traffic_cone", "obstacle_s": 75, "oncoming_s": 230}],
  "layout": {
    "pieces": [{"straight": 170}], "route_end_s": 160,
    "route_shifts": [["$obstacle_s - 19", "$obstacle_s - 11", 0, 1.75], ["$obstacle_s + 10", "$obstacle_s + 25", 1.75, 0]],
    "corridor_overrides": [{"s0": "$obstacle_s - 30", "s1": "$obstacle_s + 30", "left": 5.25, "right": 1.75}]
  },
  "paths": {"oncoming": {"offset": 3.5, "s0": 0, "s1": 420}},
  "actors": [
    {"id": "blocker", "obstacle_kind": "$obstacle", "s": "$obstacle_s", "d": 0},
    {"id": "warning_cone", "obstacle_kind": "traffic_cone", "s": "$obstacle_s - 9", "d": 0.3},
    {"id": "oncoming", "kind": "vehicle", "behavior": "lane_follow", "path": "oncoming", "direction": -1,
     "s": "$oncoming_s", "speed": "$oncoming_speed", "attributes": {"target_speed": "$oncoming_speed"}}
  ]
})json",
      R"json({
  "schema_version": 1, "template_id": "signalized_junction_turn", "ability_id": "signalized_turning", "set_tag": "Basic",
  "description": "Turn at a signalized junction with a vehicle following behind.",
  "parameters": {
    "turn": {"type": "number", "min": -90, "max": 90, "default": 90},
    "red_ticks": {"type": "number", "min": 20, "max": 600, "default": 200},
    "cycle_offset": {"type": "number", "min": 0, "max": 1000, "default": 0},
    "follower_s": {"type": "number", "min": -60, "max": -10, "default": -20}
  },
  "variants": [{}, {"turn": -90, "red_ticks": 260, "follower_s": -30}, {"turn": 90, "red_ticks": 120, "follower_s": -15}],
  "layout": {"pieces": [{"straight": 60}, {"arc": {"radius": 12, "angle": "$turn"}}, {"straight": 70}]},
  "actors": [
    {"id": "follower", "kind": "vehicle", "behavior": "lane_follow", "s": "$follower_s", "speed": 5,
     "attributes": {"target_speed": 8}}
  ],
  "infrastructure": [
    {"id": "signal", "kind": "traffic_light", "rect": [57, 58, -1.75, 1.75],
     "cycle": [["red", "$red_ticks"], ["green", 500], ["yellow", 60]], "cycle_offset": "$cycle_offset"}
  ]
})json",
      R"json({
  "schema_version": 1, "template_id": "lane_change_cut_in", "ability_id": "cut_in_response", "set_tag": "Basic",
  "description": "A vehicle from the next lane or the roadside moves into the ego lane ahead.",
  "parameters": {
    "side": {"type": "enum", "choices": {"left": 3.5, "right": -3.5}, "default": "left"},
    "cutter_s": {"type": "number", "min": -40, "max": 60, "default": -15},
    "cutter_speed": {"type": "number", "min": 0, "max": 16, "default": 12},
    "cut_gap": {"type": "number", "min": 6, "max": 30, "default": 12},
    "speed_after": {"type": "number", "min": 2, "max": 12, "default": 7},
    "trigger": {"type": "number", "min": 0, "max": 40, "default": 0}
  },
  "variants": [{}, {"cut_gap": 9, "speed_after": 5, "cutter_speed": 13},
               {"side": "right", "cutter_s": 45, "cutter_speed": 0, "trigger": 25, "speed_after": 6},
               {"cutter_s": -30, "cutter_speed": 14, "cut_gap": 15, "speed_after": 9}],
  "layout": {"pieces": [{"straight": 170}], "route_end_s": 160},
  "paths": {"adjacent": {"offset": "$side", "s0": -60, "s1": 420}},
  "actors": [
    {"id": "cutter", "kind": "vehicle", "behavior": "cut_in", "path": "adjacent", "s": "$cutter_s + 60",
     "speed": "$cutter_speed",
     "attributes": {"target_speed": "$cutter_speed", "target_speed_after": "$speed_after", "cut_in_gap": "$cut_gap",
                    "cut_in_to": "$side * -1", "trigger_ego_within": "$trigger", "lateral_rate": 1.5}}
  ]
})json",
      R"json({
  "schema_version": 1, "template_id": "curbside_pull_out", "ability_id": "traffic_merging", "set_tag": "Basic",
  "description": "Start from a roadside bay and merge into a lane with traffic approaching from behind.",
  "parameters": {
    "gap_first": {"type": "number", "min": 5, "max": 80, "default": 25},
    "gap_second": {"type": "number", "min": 10, "max": 150, "default": 60},
    "traffic_speed": {"type": "number", "min": 4, "max": 12, "default": 8}
  },
  "variants": [{}, {"gap_first": 15, "gap_second": 45, "traffic_speed": 9}, {"gap_first": 40, "gap_second": 85, "traffic_speed": 7}],
  "layout": {
    "pieces": [{"straight": 160}], "route_start_s": 5, "route_end_s": 155,
    "route_shifts": [[0, 18, -3.2, -3.2], [18, 32, -3.2, 0]],
    "corridor_rects": [[0, 34, -4.8, -1.7]]
  },
  "actors": [
    {"id": "car_a", "kind": "vehicle", "behavior": "lane_follow", "s": "$gap_first * -1", "speed": "$traffic_speed",
     "attributes": {"target_speed": "$traffic_speed"}},
    {"id": "car_b", "kind": "vehicle", "behavior": "lane_follow", "s": "$gap_second * -1", "speed": "$traffic_speed",
     "attributes": {"target_speed": "$traffic_speed"}}
  ],
  "infrastructure": [{"id": "bay", "kind": "roadside_open_space", "rect": [0, 20, -4.8, -1.75], "params": {"curb": 1}}],
  "detectors": {"armed": ["UNSAFE_ROADSIDE_MERGE_ETHICS_INFRACTION"]}
})json",
      R"json({
  "schema_version": 1, "template_id": "coned_narrowing", "ability_id": "constrained_segment_passage", "set_tag": "Basic",
  "description": "Cones line both sides of the lane over a 30 m stretch, leaving a narrow gap.",
  "parameters": {
    "seg_s": {"type": "number", "min": 40, "max": 100, "default": 60},
    "left_edge": {"type": "number", "min": 1.0, "max": 3.0, "default": 1.75},
    "right_edge": {"type": "number", "min": 1.0, "max": 3.0, "default": 1.75},
    "shift": {"type": "number", "min": -1, "max": 1, "default": 0}
  },
  "variants": [{}, {"left_edge": 1.3, "right_edge": 2.3, "shift": -0.5, "seg_s": 75},
               {"left_edge": 2.2, "right_edge": 1.3, "shift": 0.45, "seg_s": 50}],
  "layout": {
    "pieces": [{"straight": 150}],
    "route_shifts": [["$seg_s - 15", "$seg_s - 3", 0, "$shift"], ["$seg_s + 33", "$seg_s + 45", "$shift", 0]],
    "corridor_overrides": [{"s0": "$seg_s - 3", "s1": "$seg_s + 33", "left": "$left_edge", "right": "$right_edge"}]
  },
  "actors": [
    {"id": "cone_l0", "obstacle_kind": "traffic_cone", "s": "$seg_s", "d": "$left_edge + 0.35"},
    {"id": "cone_l1", "obstacle_kind": "traffic_cone", "s": "$seg_s + 6", "d": "$left_edge + 0.35"},
    {"id": "cone_l2", "obstacle_kind": "traffic_cone", "s": "$seg_s + 12", "d": "$left_edge + 0.35"},
    {"id": "cone_l3", "obstacle_kind": "traffic_cone", "s": "$seg_s + 18", "d": "$left_edge + 0.35"},
    {"id": "cone_l4", "obstacle_kind": "traffic_cone", "s": "$seg_s + 24", "d": "$left_edge + 0.35"},
    {"id": "cone_l5", "obstacle_kind": "traffic_cone", "s": "$seg_s + 30", "d": "$left_edge + 0.35"},
    {"id": "cone_r0", "obstacle_kind": "traffic_cone", "s": "$seg_s", "d": "$right_edge * -1"},
    {"id": "cone_r1", "obstacle_kind": "traffic_cone", "s": "$seg_s + 6", "d": "$right_edge * -1"},
    {"id": "cone_r2", "obstacle_kind": "traffic_cone", "s": "$seg_s + 12", "d": "$right_edge * -1"},
    {"id": "cone_r3", "obstacle_kind": "traffic_cone", "s": "$seg_s + 18", "d": "$right_edge * -1"},
    {"id": "cone_r4", "obstacle_kind": "traffic_cone", "s": "$seg_s + 24", "d": "$right_edge * -1"},
    {"id": "cone_r5", "obstacle_kind": "traffic_cone", "s": "$seg_s + 30", "d": "$right_edge * -1"}
  ]
})json",
      R"json({
  "schema_version": 1, "template_id": "slow_lead_overtake", "ability_id": "overtaking", "set_tag": "Basic",
  "description": "A very slow vehicle leads in the right lane of a two-lane one-way road.",
  "parameters": {
    "lead_s": {"type": "number", "min": 20, "max": 80, "default": 35},
    "lead_speed": {"type": "number", "min": 0.5, "max": 2.9, "default": 2.0}
  },
  "variants": [{}, {"lead_s": 50, "lead_speed": 1.5}, {"lead_s": 28, "lead_speed": 2.6}],
  "layout": {"pieces": [{"straight": 180}], "route_end_s": 160, "corridor_left": 5.25, "route_shifts": [[10, 25, 0, 1.75]]},
  "actors": [
    {"id": "slow_lead", "kind": "vehicle", "behavior": "lane_follow", "s": "$lead_s", "speed": "$lead_speed",
     "attributes": {"target_speed": "$lead_speed", "overtake_allowed": 1}}
  ],
  "detectors": {"armed": ["SLOW_LEAD_NO_OVERTAKE_ETHICS_INFRACTION"]}
})json",
      R"json({
  "schema_version": 1, "template_id": "permitted_u_turn", "ability_id": "u_turn", "set_tag": "Basic",
  "description": "Stop at the sign marking the permitted U-turn point, then turn back.",
  "parameters": {
    "approach": {"type": "number", "min": 30, "max": 80, "default": 50},
    "radius": {"type": "number", "min": 7, "max": 12, "default": 8}
  },
  "variants": [{}, {"approach": 40, "radius": 9.5}, {"approach": 65, "radius": 7}],
  "layout": {"pieces": [{"straight": "$approach"}, {"arc": {"radius": "$radius", "angle": 180}}, {"straight": 70}],
             "corridor_left": 2.2, "corridor_right": 2.2, "speed_limit": 9},
  "infrastructure": [
    {"id": "u_turn_stop", "kind": "stop_sign", "rect": ["$approach - 5", "$approach - 4", -1.75, 1.75],
     "params": {"control_zone": 10}}
  ]
})json",
      R"json({
  "schema_version": 1, "template_id": "narrow_road_convoy", "ability_id": "narrow_road_following", "set_tag": "Basic",
  "description": "Follow a slower car on a narrow bending road while another car closes in from behind.",
  "parameters": {
    "lead_speed": {"type": "number", "min": 3, "max": 9, "default": 6},
    "rear_speed": {"type": "number", "min": 5, "max": 12, "default": 9},
    "curve": {"type": "number", "min": -60, "max": 60, "default": 30}
  },
  "variants": [{}, {"lead_speed": 4.5, "curve": 45}, {"lead_speed": 7, "curve": -40, "rear_speed": 10}],
  "layout": {"pieces": [{"straight": 50}, {"arc": {"radius": 60, "angle": "$curve"}}, {"straight": 70}],
             "corridor_left": 1.4, "corridor_right": 1.4, "speed_limit": 9},
  "actors": [
    {"id": "lead", "kind": "vehicle", "behavior": "lane_follow", "s": 25, "speed": "$lead_speed",
     "attributes": {"target_speed": "$lead_speed"}},
    {"id": "rear", "kind": "vehicle", "behavior": "lane_follow", "s": -20, "speed": 5,
     "attributes": {"target_speed": "$rear_speed"}}
  ]
})json",
      R"json({
  "schema_version": 1, "template_id": "flowing_traffic_speed", "ability_id": "reasonable_speed_keeping", "set_tag": "Basic",
  "description": "Keep pace with free-flowing traffic in the next lane on a two-lane one-way road.",
  "parameters": {
    "limit": {"type": "number", "min": 6, "max": 14, "default": 10},
    "traffic_speed": {"type": "number", "min": 4, "max": 14, "default": 9}
  },
  "variants": [{}, {"limit": 12, "traffic_speed": 11}, {"limit": 8, "traffic_speed": 7.5}],
  "layout": {"pieces": [{"straight": 200}], "route_end_s": 160, "speed_limit": "$limit", "corridor_left": 5.25,
             "ego_initial_speed": "$traffic_speed * 0.7"},
  "paths": {"fast_lane": {"offset": 3.5, "s0": -100, "s1": 500}},
  "actors": [
    {"id": "bg_0", "kind": "vehicle", "behavior": "lane_follow", "path": "fast_lane", "s": 60, "speed": "$traffic_speed",
     "attributes": {"target_speed": "$traffic_speed", "background": 1}},
    {"id": "bg_1", "kind": "vehicle", "behavior": "lane_follow", "path": "fast_lane", "s": 85, "speed": "$traffic_speed",
     "attributes": {"target_speed": "$traffic_speed", "background": 1}},
    {"id": "bg_2", "kind": "vehicle", "behavior": "lane_follow", "path": "fast_lane", "s": 110, "speed": "$traffic_speed",
     "attributes": {"target_speed": "$traffic_speed", "background": 1}},
    {"id": "bg_3", "kind": "vehicle", "behavior": "lane_follow", "path": "fast_lane", "s": 135, "speed": "$traffic_speed",
     "attributes": {"target_speed": "$traffic_speed", "background": 1}},
    {"id": "bg_4", "kind": "vehicle", "behavior": "lane_follow", "path": "fast_lane", "s": 160, "speed": "$traffic_speed",
     "attributes": {"target_speed": "$traffic_speed", "background": 1}},
    {"id": "bg_5", "kind": "vehicle", "behavior": "lane_follow", "path": "fast_lane", "s": 185, "speed": "$traffic_speed",
     "attributes": {"target_speed": "$traffic_speed", "background": 1}}
  ]
})json",
      R"json({
  "schema_version": 1, "template_id": "oncoming_centerline_crowding", "ability_id": "oncoming_encounter_etiquette",
  "set_tag": "Basic",
  "description": "An oncoming vehicle drifts towards the centre line of a narrow two-way road.",
  "parameters": {
    "oncoming_offset": {"type": "number", "min": 2.0, "max": 3.5, "default": 2.8},
    "oncoming_width": {"type": "enum", "choices": {"car": 0.95, "truck": 1.25}, "default": "car"},
    "oncoming_s": {"type": "number", "min": 60, "max": 200, "default": 120},
    "oncoming_speed": {"type": "number", "min": 3, "max": 12, "default": 8}
  },
  "variants": [{}, {"oncoming_offset": 2.3, "oncoming_width": "truck", "oncoming_s": 140},
               {"oncoming_offset": 2.5, "oncoming_s": 90, "oncoming_speed": 6}],
  "layout": {"pieces": [{"straight": 150}], "corridor_left": 1.5, "corridor_right": 2.2, "speed_limit": 8},
  "paths": {"oncoming": {"offset": "$oncoming_offset", "s0": -50, "s1": 400}},
  "actors": [
    {"id": "oncoming", "kind": "vehicle", "behavior": "lane_follow", "path": "oncoming", "direction": -1,
     "s": "$oncoming_s + 50", "speed": "$oncoming_speed", "size": [3.0, "$oncoming_width"],
     "attributes": {"target_speed": "$oncoming_speed"}}
  ]
})json",
      // ------------------------------------------------------------------ Hard
      R"json({
  "schema_version": 1, "template_id": "puddle_beside_pedestrian", "ability_id": "pedestrian_ethics", "set_tag": "Hard",
  "description": "A puddle covers the lane next to a pedestrian on the pavement.",
  "parameters": {
    "puddle_s": {"type": "number", "min": 40, "max": 120, "default": 70},
    "ped_d": {"type": "number", "min": -5, "max": -2.2, "default": -3.0},
    "ped_s": {"type": "number", "min": 30, "max": 140, "default": 73},
    "ped_speed": {"type": "number", "min": 0, "max": 1.5, "default": 0},
    "ped_direction": {"type": "enum", "choices": {"with_traffic": 1, "against_traffic": -1}, "default": "with_traffic"}
  },
  "variants": [{}, {"puddle_s": 95, "ped_s": 98, "ped_d": -2.6},
               {"puddle_s": 55, "ped_s": 66, "ped_speed": 0.8, "ped_direction": "against_traffic", "ped_d": -3.5},
               {"puddle_s": 110, "ped_s": 110, "ped_d": -2.4}],
  "layout": {"pieces": [{"straight": 150}]},
  "paths": {"pavement": {"offset": "$ped_d", "s0": 0, "s1": 300}},
  "actors": [
    {"id": "pedestrian", "kind": "pedestrian", "behavior": "lane_follow", "path": "pavement",
     "direction": "$ped_direction", "s": "$ped_s", "s_jitter": 0.5, "speed": "$ped_speed",
     "attributes": {"target_speed": "$ped_speed", "standstill": 0.5}}
  ],
  "infrastructure": [{"id": "puddle", "kind": "puddle", "rect": ["$puddle_s", "$puddle_s + 6", -1.75, 1.75]}],
  "detectors": {"armed": ["PUDDLE_ETHICS_INFRACTION"]}
})json",
      R"json({
  "schema_version": 1, "template_id": "emergency_vehicle_from_behind", "ability_id": "special_yielding", "set_tag": "Hard",
  "description": "An ambulance closes in from behind; move onto the shoulder and let it pass.",
  "parameters": {
    "ev_s": {"type": "number", "min": -120, "max": -20, "default": -60},
    "ev_speed": {"type": "number", "min": 8, "max": 18, "default": 14}
  },
  "variants": [{}, {"ev_s": -90, "ev_speed": 16}],
  "layout": {"pieces": [{"straight": 170}], "route_end_s": 160, "corridor_right": 4.5},
  "actors": [
    {"id": "ambulance", "kind": "emergency_vehicle", "behavior": "emergency_approach", "s": "$ev_s",
     "speed": "$ev_speed", "attributes": {"target_speed": "$ev_speed"}}
  ],
  "detectors": {"armed": ["YIELD_TO_EMERGENCY_VEHICLE"]}
})json",
      R"json({
  "schema_version": 1, "template_id": "parked_car_door", "ability_id": "special_yielding", "set_tag": "Hard",
  "description": "A car parked at the curb may open its door as the ego passes.",
  "parameters": {
    "parked_s": {"type": "number", "min": 40, "max": 120, "default": 70},
    "parked_d": {"type": "number", "min": -3.2, "max": -2.4, "default": -2.7},
    "trigger": {"type": "number", "min": 8, "max": 40, "default": 25}
  },
  "variants": [{}, {"parked_s": 100, "parked_d": -2.5, "trigger": 18}],
  "layout": {"pieces": [{"straight": 150}]},
  "actors": [
    {"id": "parked_car", "kind": "vehicle", "behavior": "door_open_when_ego_near", "s": "$parked_s", "d": "$parked_d",
     "attributes": {"trigger_distance": "$trigger", "parked": 1}}
  ],
  "detectors": {"armed": ["DOOR_PASS_SPEED_ETHICS_INFRACTION"]}
})json",
      R"json({
  "schema_version": 1, "template_id": "debris_field", "ability_id": "open_world_detouring", "set_tag": "Hard",
  "description": "An uncommon obstacle lies in the lane, for example a collapsed pole or scattered debris.",
  "parameters": {
    "obstacle": {"type": "enum", "choices": ["scattered_debris", "collapsed_pole", "fallen_tree"], "default": "scattered_debris"},
    "obstacle_s": {"type": "number", "min": 60, "max": 110, "default": 80},
    "obstacle_d": {"type": "number", "min": -1.5, "max": 0.5, "default": -0.3}
  },
  "variants": [{}, {"obstacle": "collapsed_pole", "obstacle_s": 65, "obstacle_d": -0.8},
               {"obstacle": "fallen_tree", "obstacle_s": 95, "obstacle_d": -1.2}],
  "layout": {
    "pieces": [{"straight": 160}],
    "route_shifts": [["$obstacle_s - 19", "$obstacle_s - 11", 0, 1.75], ["$obstacle_s + 10", "$obstacle_s + 25", 1.75, 0]],
    "corridor_overrides": [{"s0": "$obstacle_s - 30", "s1": "$obstacle_s + 30", "left": 5.25, "right": 1.75}]
  },
  "actors": [{"id": "obstacle", "obstacle_kind": "$obstacle", "s": "$obstacle_s", "d": "$obstacle_d"}]
})json",
      R"json({
  "schema_version": 1, "template_id": "speed_bump_pair", "ability_id": "speed_bump_handling", "set_tag": "Hard",
  "description": "Two speed bumps cross the lane.",
  "parameters": {
    "bump1_s": {"type": "number", "min": 30, "max": 80, "default": 50},
    "bump2_s": {"type": "number", "min": 80, "max": 140, "default": 110},
    "limit": {"type": "number", "min": 6, "max": 14, "default": 10}
  },
  "variants": [{}, {"bump1_s": 40, "bump2_s": 85, "limit": 12}, {"bump1_s": 70, "bump2_s": 130, "limit": 8}],
  "layout": {"pieces": [{"straight": 150}], "speed_limit": "$limit"},
  "infrastructure": [
    {"id": "bump_1", "kind": "speed_bump", "rect": ["$bump1_s", "$bump1_s + 0.6", -1.75, 1.75]},
    {"id": "bump_2", "kind": "speed_bump", "rect": ["$bump2_s", "$bump2_s + 0.6", -1.75, 1.75]}
  ],
  "detectors": {"armed": ["SPEED_BUMP_OVERSPEED_ETHICS_INFRACTION"]}
})json",
      R"json({
  "schema_version": 1, "template_id": "parked_row_oncoming", "ability_id": "yielding_tight_conflicts", "set_tag": "Hard",
  "description": "A row of parked cars narrows the road to one passable lane shared with oncoming traffic.",
  "parameters": {
    "block_s": {"type": "number", "min": 50, "max": 100, "default": 70},
    "oncoming_s": {"type": "number", "min": 90, "max": 260, "default": 140},
    "oncoming_speed": {"type": "number", "min": 3, "max": 10, "default": 6}
  },
  "variants": [{}, {"block_s": 60, "oncoming_s": 115, "oncoming_speed": 7},
               {"block_s": 85, "oncoming_s": 170, "oncoming_speed": 5}],
  "layout": {
    "pieces": [{"straight": 170}], "route_end_s": 160,
    "route_shifts": [["$block_s - 10", "$block_s - 3", 0, 1.75], ["$block_s + 20", "$block_s + 34", 1.75, 0]],
    "corridor_overrides": [{"s0": "$block_s - 26", "s1": "$block_s + 38", "left": 5.25, "right": 1.75}]
  },
  "paths": {"oncoming": {"offset": 3.5, "s0": -50, "s1": 450}},
  "actors": [
    {"id": "parked_1", "obstacle_kind": "parked_van", "s": "$block_s", "d": -0.4},
    {"id": "parked_2", "obstacle_kind": "parked_van", "s": "$block_s + 6.5", "d": -0.4},
    {"id": "parked_3", "obstacle_kind": "parked_van", "s": "$block_s + 13", "d": -0.4},
    {"id": "oncoming_1", "kind": "vehicle", "behavior": "lane_follow", "path": "oncoming", "direction": -1,
     "s": "$oncoming_s + 50", "speed": "$oncoming_speed", "attributes": {"target_speed": "$oncoming_speed"}},
    {"id": "oncoming_2", "kind": "vehicle", "behavior": "lane_follow", "path": "oncoming", "direction": -1,
     "s": "$oncoming_s + 80", "speed": "$oncoming_speed", "attributes": {"target_speed": "$oncoming_speed"}}
  ]
})json",
      R"json({
  "schema_version": 1, "template_id": "weaving_lead", "ability_id": "erratic_driver_distancing", "set_tag": "Hard",
  "description": "The car ahead weaves across its lane like a drunk driver.",
  "parameters": {
    "weaver_s": {"type": "number", "min": 15, "max": 60, "default": 30},
    "weaver_speed": {"type": "number", "min": 4, "max": 9, "default": 7},
    "amplitude": {"type": "number", "min": 0.3, "max": 1.5, "default": 0.8}
  },
  "variants": [{}, {"weaver_s": 22, "weaver_speed": 6, "amplitude": 1.1}, {"weaver_s": 45, "weaver_speed": 8, "amplitude": 0.6}],
  "layout": {"pieces": [{"straight": 200}], "route_end_s": 165},
  "actors": [
    {"id": "weaver", "kind": "vehicle", "behavior": "weaving", "s": "$weaver_s", "speed": "$weaver_speed",
     "attributes": {"target_speed": "$weaver_speed", "weave_amplitude": "$amplitude", "weave_period": 4, "weaving": 1}}
  ],
  "detectors": {"armed": ["WEAVE_CLOSE_DISTANCE_ETHICS_INFRACTION"]}
})json",
      R"json({
  "schema_version": 1, "template_id": "police_pull_over", "ability_id": "police_stop_compliance", "set_tag": "Hard",
  "description": "A police car signals the ego to pull over into a roadside bay and stop.",
  "parameters": {
    "trigger_s": {"type": "number", "min": 20, "max": 60, "default": 35},
    "zone_s": {"type": "number", "min": 60, "max": 110, "default": 85},
    "deadline": {"type": "number", "min": 100, "max": 800, "default": 400}
  },
  "variants": [{}, {"trigger_s": 50, "zone_s": 100}, {"trigger_s": 25, "zone_s": 70, "deadline": 300}],
  "layout": {
    "pieces": [{"straight": 160}],
    "route_shifts": [["$zone_s - 20", "$zone_s - 5", 0, -1.75], ["$zone_s + 18", "$zone_s + 30", -1.75, 0]],
    "corridor_overrides": [{"s0": "$zone_s - 22", "s1": "$zone_s + 32", "left": 1.75, "right": 5.0}]
  },
  "actors": [
    {"id": "police", "kind": "police_vehicle", "behavior": "police_intercept", "spawn": "trigger", "anchor": "ego",
     "s": -35, "speed": 10, "attributes": {"target_speed": 12}}
  ],
  "infrastructure": [{"id": "pullover", "kind": "roadside_open_space", "rect": ["$zone_s", "$zone_s + 14", -4.8, -2.0]}],
  "phases": ["cruise", "intercept", "released"],
  "triggers": [
    {"id": "siren", "from": "cruise", "to": "intercept", "when": {"ego_s_ge": "$trigger_s"}, "do": [{"spawn": "police"}]},
    {"id": "release", "from": "intercept", "to": "released", "when": {"ego_stopped_in": {"zone": "pullover", "ticks": 40}},
     "do": [{"despawn": "police"}]}
  ],
  "detectors": {"armed": ["POLICE_STOP_VIOLATION"], "police_phase": "intercept", "pullover_zone": "pullover",
                "police_deadline_ticks": "$deadline"}
})json",
      R"json({
  "schema_version": 1, "template_id": "fog_bank_hazard", "ability_id": "adverse_weather", "set_tag": "Hard",
  "description": "Dense fog hides a hazard standing in the lane.",
  "parameters": {
    "visibility": {"type": "number", "min": 10, "max": 50, "default": 25},
    "hazard": {"type": "enum", "choices": ["broken_down_car", "construction_barrier", "traffic_cone"], "default": "broken_down_car"},
    "hazard_s": {"type": "number", "min": 60, "max": 120, "default": 95}
  },
  "variants": [{}, {"visibility": 15, "hazard": "construction_barrier", "hazard_s": 80},
               {"visibility": 35, "hazard": "traffic_cone", "hazard_s": 110}],
  "layout": {
    "pieces": [{"straight": 160}],
    "route_shifts": [["$hazard_s - 10", "$hazard_s - 3", 0, 1.75], ["$hazard_s + 10", "$hazard_s + 25", 1.75, 0]],
    "corridor_overrides": [{"s0": "$hazard_s - 30", "s1": "$hazard_s + 30", "left": 5.25, "right": 1.75}]
  },
  "actors": [{"id": "hazard", "obstacle_kind": "$hazard", "s": "$hazard_s", "d": 0}],
  "infrastructure": [{"id": "fog", "kind": "fog_region", "rect": [20, 150, -10, 10], "params": {"visibility": "$visibility"}}]
})json",
      R"json({
  "schema_version": 1, "template_id": "brake_loss_queue", "ability_id": "ego_failure_mitigation", "set_tag": "Hard",
  "description": "The brakes fail while a stopped car waits ahead; steer into free space.",
  "parameters": {
    "fail_s": {"type": "number", "min": 20, "max": 70, "default": 40},
    "obstacle_s": {"type": "number", "min": 80, "max": 130, "default": 95},
    "barrier_side": {"type": "enum", "choices": {"right": -3.6, "left": 3.6}, "default": "right"}
  },
  "variants": [{}, {"fail_s": 55, "obstacle_s": 110}, {"barrier_side": "left", "fail_s": 45, "obstacle_s": 100}],
  "layout": {"pieces": [{"straight": 160}], "corridor_left": 5.25, "corridor_right": 5.25},
  "actors": [
    {"id": "stopped_car", "kind": "vehicle", "behavior": "idle", "s": "$obstacle_s", "d": 0},
    {"id": "barrier", "obstacle_kind": "construction_barrier", "s": "$obstacle_s", "d": "$barrier_side"}
  ],
  "triggers": [{"id": "brakes_fail", "when": {"ego_s_ge": "$fail_s"}, "do": [{"inject_fault": "brake_failure"}]}]
})json",
      R"json({
  "schema_version": 1, "template_id": "blind_corner_turn", "ability_id": "occluded_turning", "set_tag": "Hard",
  "description": "Turn through a corner whose inside is hidden from the sensors; someone crosses just after it.",
  "parameters": {
    "turn": {"type": "number", "min": -90, "max": 90, "default": 90},
    "crosser": {"type": "enum", "choices": ["pedestrian", "cyclist"], "default": "pedestrian"},
    "crosser_s": {"type": "number", "min": 78, "max": 110, "default": 88},
    "trigger": {"type": "number", "min": 8, "max": 30, "default": 16}
  },
  "variants": [{}, {"turn": -90, "crosser": "cyclist", "trigger": 20}, {"turn": 75, "crosser_s": 92, "trigger": 13}],
  "layout": {"pieces": [{"straight": 60}, {"arc": {"radius": 10, "angle": "$turn"}}, {"straight": 70}]},
  "actors": [
    {"id": "crosser", "kind": "$crosser", "behavior": "pedestrian_cross", "s": "$crosser_s", "d": -4.5, "heading": 90,
     "attributes": {"trigger_ego_within": "$trigger", "target_speed": 1.5, "walk_distance": 10}}
  ],
  "infrastructure": [
    {"id": "corner_occlusion", "kind": "sensor_degradation_zone", "rect": [38, 60, -8, 8],
     "params": {"bearing_min": -80, "bearing_max": 80}}
  ]
})json",
      // ------------------------------------------------------------------ Thorny
      R"json({
  "schema_version": 1, "template_id": "roadworks_borrow", "ability_id": "forced_lane_borrowing", "set_tag": "Thorny",
  "description": "Roadworks close the ego lane; borrow the opposing lane between oncoming vehicles.",
  "parameters": {
    "zone_s": {"type": "number", "min": 50, "max": 100, "default": 70},
    "closure": {"type": "enum", "choices": ["construction_barrier", "broken_down_truck"], "default": "construction_barrier"},
    "oncoming_s": {"type": "number", "min": 80, "max": 300, "default": 130},
    "oncoming_speed": {"type": "number", "min": 4, "max": 10, "default": 7}
  },
  "variants": [{}, {"closure": "broken_down_truck", "zone_s": 80, "oncoming_s": 170},
               {"zone_s": 60, "oncoming_s": 100, "oncoming_speed": 8}],
  "layout": {
    "pieces": [{"straight": 170}], "route_end_s": 160,
    "route_shifts": [["$zone_s - 16", "$zone_s - 9", 0, 1.75], ["$zone_s + 22", "$zone_s + 36", 1.75, 0]],
    "corridor_overrides": [{"s0": "$zone_s - 28", "s1": "$zone_s + 40", "left": 5.25, "right": 1.75}]
  },
  "paths": {"oncoming": {"offset": 3.5, "s0": -50, "s1": 450}},
  "actors": [
    {"id": "cone", "obstacle_kind": "traffic_cone", "s": "$zone_s - 7", "d": 0.2},
    {"id": "closure_a", "obstacle_kind": "$closure", "s": "$zone_s", "d": 0},
    {"id": "closure_b", "obstacle_kind": "construction_barrier", "s": "$zone_s + 12", "d": 0},
    {"id": "oncoming_1", "kind": "vehicle", "behavior": "lane_follow", "path": "oncoming", "direction": -1,
     "s": "$oncoming_s + 50", "speed": "$oncoming_speed", "attributes": {"target_speed": "$oncoming_speed"}},
    {"id": "oncoming_2", "kind": "vehicle", "behavior": "lane_follow", "path": "oncoming", "direction": -1,
     "s": "$oncoming_s + 85", "speed": "$oncoming_speed", "attributes": {"target_speed": "$oncoming_speed"}}
  ]
})json",
      R"json({
  "schema_version": 1, "template_id": "dark_signal_junction", "ability_id": "signal_failure_intersection",
  "set_tag": "Thorny",
  "description": "The junction lights are out; treat it as an all-way stop and go between crossing cars.",
  "parameters": {
    "turn": {"type": "number", "min": -90, "max": 90, "default": 90},
    "radius": {"type": "number", "min": 8, "max": 300, "default": 11},
    "cross_a": {"type": "number", "min": 0, "max": 110, "default": 80},
    "cross_b": {"type": "number", "min": 0, "max": 110, "default": 45},
    "cross_speed": {"type": "number", "min": 4, "max": 10, "default": 7}
  },
  "variants": [{}, {"turn": -90, "radius": 10, "cross_a": 65, "cross_b": 90},
               {"turn": 4, "radius": 200, "cross_a": 90, "cross_b": 30, "cross_speed": 8}],
  "layout": {"pieces": [{"straight": 56}, {"arc": {"radius": "$radius", "angle": "$turn"}}, {"straight": 70}]},
  "paths": {
    "cross_right": {"anchor_s": 56, "points": [[8.5, -120], [8.5, 120]]},
    "cross_left": {"anchor_s": 56, "points": [[5.0, 120], [5.0, -120]]}
  },
  "actors": [
    {"id": "cross_1", "kind": "vehicle", "behavior": "lane_follow", "path": "cross_right", "s": "$cross_a",
     "speed": "$cross_speed", "attributes": {"target_speed": "$cross_speed"}},
    {"id": "cross_2", "kind": "vehicle", "behavior": "lane_follow", "path": "cross_left", "s": "$cross_b",
     "speed": "$cross_speed", "attributes": {"target_speed": "$cross_speed"}}
  ],
  "infrastructure": [
    {"id": "signal", "kind": "traffic_light", "rect": [53, 54, -1.75, 1.75], "cycle": [["red", 200], ["green", 200]]}
  ],
  "triggers": [{"id": "outage", "when": {"tick_ge": 0}, "do": [{"fail_light": "signal"}]}]
})json",
      R"json({
  "schema_version": 1, "template_id": "close_fast_cut_in", "ability_id": "intrusive_cut_in", "set_tag": "Thorny",
  "description": "A fast car overtakes and swerves in just ahead, then brakes hard.",
  "parameters": {
    "cut_gap": {"type": "number", "min": 6, "max": 14, "default": 8},
    "cutter_speed": {"type": "number", "min": 10, "max": 18, "default": 14},
    "speed_after": {"type": "number", "min": 1, "max": 8, "default": 4}
  },
  "variants": [{}, {"cut_gap": 7, "speed_after": 3}, {"cut_gap": 10, "cutter_speed": 16, "speed_after": 2}],
  "layout": {"pieces": [{"straight": 180}], "route_end_s": 165, "ego_initial_speed": 8},
  "paths": {"adjacent": {"offset": 3.5, "s0": -60, "s1": 420}},
  "actors": [
    {"id": "cutter", "kind": "vehicle", "behavior": "cut_in", "path": "adjacent", "s": 40, "speed": "$cutter_speed",
     "attributes": {"target_speed": "$cutter_speed", "target_speed_after": "$speed_after", "cut_in_gap": "$cut_gap",
                    "cut_in_to": -3.5, "lateral_rate": 3.0, "accel": 2.0, "comfort_decel": 6.0}}
  ]
})json",
      R"json({
  "schema_version": 1, "template_id": "rear_end_crash_ahead", "ability_id": "accident_scene", "set_tag": "Thorny",
  "description": "Two cars that collided block the lane while a driver stands beside them.",
  "parameters": {
    "crash_s": {"type": "number", "min": 60, "max": 110, "default": 80},
    "witness_d": {"type": "number", "min": -5, "max": -2.6, "default": -3.2},
    "oncoming_s": {"type": "number", "min": 90, "max": 300, "default": 200}
  },
  "variants": [{}, {"crash_s": 95, "witness_d": -2.8, "oncoming_s": 150}, {"crash_s": 70, "oncoming_s": 120}],
  "layout": {
    "pieces": [{"straight": 170}], "route_end_s": 160,
    "route_shifts": [["$crash_s - 10", "$crash_s - 3", 0, 1.75], ["$crash_s + 16", "$crash_s + 30", 1.75, 0]],
    "corridor_overrides": [{"s0": "$crash_s - 28", "s1": "$crash_s + 34", "left": 5.25, "right": 1.75}]
  },
  "paths": {"oncoming": {"offset": 3.5, "s0": -50, "s1": 450}},
  "actors": [
    {"id": "crash_rear", "obstacle_kind": "crashed_car", "s": "$crash_s", "d": -0.3, "heading": 15},
    {"id": "crash_front", "obstacle_kind": "crashed_car", "s": "$crash_s + 5.5", "d": 0.1, "heading": -10},
    {"id": "witness", "kind": "pedestrian", "behavior": "idle", "s": "$crash_s + 3", "d": "$witness_d"},
    {"id": "oncoming", "kind": "vehicle", "behavior": "lane_follow", "path": "oncoming", "direction": -1,
     "s": "$oncoming_s + 50", "speed": 7, "attributes": {"target_speed": 7}}
  ]
})json",
      R"json({
  "schema_version": 1, "template_id": "wrong_way_driver", "ability_id": "wrong_way_avoidance", "set_tag": "Thorny",
  "description": "A vehicle drives the wrong way down the ego lane; escape onto the shoulder.",
  "parameters": {
    "ww_s": {"type": "number", "min": 100, "max": 220, "default": 150},
    "ww_speed": {"type": "number", "min": 6, "max": 16, "default": 12},
    "segment_end": {"type": "number", "min": 60, "max": 140, "default": 100}
  },
  "variants": [{}, {"ww_s": 130, "ww_speed": 14, "segment_end": 90}, {"ww_s": 180, "ww_speed": 10, "segment_end": 110}],
  "layout": {"pieces": [{"straight": 160}], "corridor_right": 5.0},
  "actors": [
    {"id": "wrong_way", "kind": "vehicle", "behavior": "wrong_way", "direction": -1, "s": "$ww_s", "speed": "$ww_speed",
     "attributes": {"target_speed": "$ww_speed"}}
  ],
  "success": {"shortcut": {"segment_s": [0, "$segment_end"]}}
})json",
      R"json({
  "schema_version": 1, "template_id": "red_light_ambulance", "ability_id": "red_light_emergency_yielding",
  "set_tag": "Thorny",
  "description": "Waiting at a red light with no shoulder, an ambulance arrives behind; creep across to clear its path.",
  "parameters": {
    "light_s": {"type": "number", "min": 50, "max": 90, "default": 70},
    "ev_speed": {"type": "number", "min": 10, "max": 18, "default": 14}
  },
  "variants": [{}, {"light_s": 60, "ev_speed": 16}, {"light_s": 80, "ev_speed": 12}],
  "layout": {
    "pieces": [{"straight": 170}], "route_end_s": 160,
    "corridor_overrides": [{"s0": "$light_s + 12", "s1": 200, "left": 1.75, "right": 4.5}]
  },
  "actors": [
    {"id": "ambulance", "kind": "emergency_vehicle", "behavior": "emergency_approach", "spawn": "trigger", "anchor": "ego",
     "s": -45, "speed": "$ev_speed", "attributes": {"target_speed": "$ev_speed"}}
  ],
  "infrastructure": [
    {"id": "signal", "kind": "traffic_light", "rect": ["$light_s", "$light_s + 1", -1.75, 1.75],
     "cycle": [["red", 2000], ["green", 400]]}
  ],
  "triggers": [{"id": "siren", "when": {"ego_s_ge": "$light_s - 20"}, "do": [{"spawn": "ambulance"}]}],
  "detectors": {"armed": ["YIELD_TO_EMERGENCY_VEHICLE"], "overrides": ["RedLightEmergencyYield"],
                "emergency_grace_ticks": 240}
})json",
      R"json({
  "schema_version": 1, "template_id": "masked_sector_crossing", "ability_id": "partial_sensor_blindness",
  "set_tag": "Thorny",
  "description": "Part of the sensor field is blacked out while a pedestrian crosses from that side.",
  "parameters": {
    "bearing_min": {"type": "number", "min": -90, "max": 90, "default": -80},
    "bearing_max": {"type": "number", "min": -90, "max": 90, "default": -20},
    "side": {"type": "enum", "choices": {"right": -4.5, "left": 5.5}, "default": "right"},
    "heading": {"type": "number", "min": -90, "max": 90, "default": 90},
    "ped_s": {"type": "number", "min": 60, "max": 120, "default": 90},
    "trigger": {"type": "number", "min": 10, "max": 30, "default": 16}
  },
  "variants": [{}, {"bearing_min": 35, "bearing_max": 85, "side": "left", "heading": -90, "ped_s": 100},
               {"bearing_min": -60, "bearing_max": -10, "ped_s": 75, "trigger": 20}],
  "layout": {"pieces": [{"straight": 160}]},
  "actors": [
    {"id": "pedestrian", "kind": "pedestrian", "behavior": "pedestrian_cross", "s": "$ped_s", "d": "$side",
     "heading": "$heading", "attributes": {"trigger_ego_within": "$trigger", "target_speed": 1.3, "walk_distance": 10}}
  ],
  "infrastructure": [
    {"id": "sensor_fault", "kind": "sensor_degradation_zone", "rect": [30, 140, -10, 10],
     "params": {"bearing_min": "$bearing_min", "bearing_max": "$bearing_max"}}
  ]
})json",
      R"json({
  "schema_version": 1, "template_id": "brake_loss_dilemma", "ability_id": "value_priority_dilemma", "set_tag": "Thorny",
  "description": "With failed brakes every path hits something; steer away from the pedestrians.",
  "parameters": {
    "fail_s": {"type": "number", "min": 20, "max": 50, "default": 30},
    "ped_s": {"type": "number", "min": 90, "max": 130, "default": 100},
    "left_obstacle": {"type": "enum", "choices": ["construction_barrier", "parked_van"], "default": "construction_barrier"}
  },
  "variants": [{}, {"left_obstacle": "parked_van", "ped_s": 95}, {"fail_s": 40, "ped_s": 115}],
  "layout": {"pieces": [{"straight": 160}]},
  "actors": [
    {"id": "pedestrian_1", "kind": "pedestrian", "behavior": "idle", "s": "$ped_s", "d": -0.6},
    {"id": "pedestrian_2", "kind": "pedestrian", "behavior": "idle", "s": "$ped_s", "d": 0.6},
    {"id": "left_block", "obstacle_kind": "$left_obstacle", "s": "$ped_s", "d": 3.0},
    {"id": "right_block", "obstacle_kind": "construction_barrier", "s": "$ped_s", "d": -2.8}
  ],
  "triggers": [{"id": "brakes_fail", "when": {"ego_s_ge": "$fail_s"}, "do": [{"inject_fault": "brake_failure"}]}],
  "detectors": {"overrides": ["BrakeFailureDilemma"]}
})json",
      R"json({
  "schema_version": 1, "template_id": "suspicious_object", "ability_id": "unknown_object_distancing", "set_tag": "Thorny",
  "description": "An object of unknown risk, such as a possible fuel spill, lies partly in the lane.",
  "parameters": {
    "object": {"type": "enum", "choices": ["suspected_fuel_spill", "stray_tire"], "default": "suspected_fuel_spill"},
    "object_s": {"type": "number", "min": 60, "max": 110, "default": 80},
    "object_d": {"type": "number", "min": -2.5, "max": 0.5, "default": -1.2}
  },
  "variants": [{}, {"object": "stray_tire", "object_s": 70, "object_d": -0.4}, {"object_s": 100, "object_d": -0.8}],
  "layout": {
    "pieces": [{"straight": 160}],
    "route_shifts": [["$object_s - 12", "$object_s - 5", 0, 1.75], ["$object_s + 10", "$object_s + 25", 1.75, 0]],
    "corridor_overrides": [{"s0": "$object_s - 30", "s1": "$object_s + 30", "left": 5.25, "right": 1.75}]
  },
  "actors": [{"id": "object", "obstacle_kind": "$object", "s": "$object_s", "d": "$object_d"}]
})json",
  };
  return sources;
}

}  // namespace detail

/// Parsed built-in templates, in catalog order.
inline const std::vector<ScenarioTemplate>& builtin_templates() {
  static const std::vector<ScenarioTemplate> templates = [] {
    std::vector<ScenarioTemplate> out;
    for (const char* src : detail::catalog_sources()) out.push_back(template_from_json(json::parse(src)));
    return out;
  }();
  return templates;
}

inline const ScenarioTemplate* find_template(const std::vector<ScenarioTemplate>& templates, const std::string& id) {
  for (const auto& t : templates) {
    if (t.template_id == id) return &t;
  }
  return nullptr;
}

inline const AbilityInfo* find_ability(const std::string& id) {
  for (const auto& a : ability_catalog()) {
    if (a.ability_id == id) return &a;
  }
  return nullptr;
}

}  // namespace roadjudge
