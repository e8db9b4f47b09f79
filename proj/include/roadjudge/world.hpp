#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "roadjudge/geometry.hpp"

namespace roadjudge {

using json = nlohmann::json;

/// Raised for any malformed configuration or input file.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kWaypointPassRadius = 3.0;
inline constexpr double kMinWaypointSpacing = 2.0;
inline constexpr double kMaxWaypointSpacing = 10.0;

enum class Fault : std::uint32_t { brake_failure = 1u << 0 };

/// Set of active actuator faults.
struct FaultSet {
  std::uint32_t bits = 0;

  bool contains(Fault f) const { return (bits & static_cast<std::uint32_t>(f)) != 0; }
  void insert(Fault f) { bits |= static_cast<std::uint32_t>(f); }
  void erase(Fault f) { bits &= ~static_cast<std::uint32_t>(f); }
  bool empty() const { return bits == 0; }
  friend bool operator==(FaultSet, FaultSet) = default;
};

inline std::string fault_name(Fault f) {
  switch (f) {
    case Fault::brake_failure: return "brake_failure";
  }
  return "unknown";
}

inline Fault fault_from_name(const std::string& name) {
  if (name == "brake_failure") return Fault::brake_failure;
  throw ConfigError("unknown fault '" + name + "'");
}

struct EgoState {
  Pose2D pose;
  double speed = 0.0;
  double steer_angle = 0.0;
  double half_length = 2.3;
  double half_width = 0.95;
  FaultSet faults;

  OrientedBox footprint() const { return {pose, half_length, half_width}; }
  friend bool operator==(const EgoState&, const EgoState&) = default;
};

struct ControlCommand {
  double throttle = 0.0;
  double steer = 0.0;
  double brake = 0.0;
  bool hand_brake = false;

  friend bool operator==(const ControlCommand&, const ControlCommand&) = default;
};

/// Clamps every scalar into its range; non-finite values become 0.
/// Returns true when any field had to be changed.
inline bool clamp_command(ControlCommand& cmd) {
  bool changed = false;
  const auto fix = [&changed](double& v, double lo, double hi) {
    double out = std::isfinite(v) ? std::clamp(v, lo, hi) : 0.0;
    if (out != v) changed = true;
    v = out;
  };
  fix(cmd.throttle, 0.0, 1.0);
  fix(cmd.steer, -1.0, 1.0);
  fix(cmd.brake, 0.0, 1.0);
  return changed;
}

inline ControlCommand clamped(ControlCommand cmd) {
  clamp_command(cmd);
  return cmd;
}

enum class ActorKind { vehicle, pedestrian, cyclist, static_obstacle, emergency_vehicle, police_vehicle };

NLOHMANN_JSON_SERIALIZE_ENUM(ActorKind, {{ActorKind::vehicle, "vehicle"},
                                         {ActorKind::pedestrian, "pedestrian"},
                                         {ActorKind::cyclist, "cyclist"},
                                         {ActorKind::static_obstacle, "static_obstacle"},
                                         {ActorKind::emergency_vehicle, "emergency_vehicle"},
                                         {ActorKind::police_vehicle, "police_vehicle"}})

inline std::string to_string(ActorKind k) { return json(k).get<std::string>(); }

inline bool is_vehicle_like(ActorKind k) {
  return k == ActorKind::vehicle || k == ActorKind::emergency_vehicle || k == ActorKind::police_vehicle;
}

struct ActorState {
  std::string id;
  ActorKind kind = ActorKind::vehicle;
  Pose2D pose;
  double speed = 0.0;
  double half_length = 2.3;
  double half_width = 0.95;
  std::string behavior_tag = "idle";
  std::map<std::string, double> attributes;
  // Path-following state. `path` names an entry of WorldState::paths; empty for free movers.
  std::string path;
  double path_s = 0.0;
  double lateral = 0.0;
  int direction = 1;

  OrientedBox footprint() const { return {pose, half_length, half_width}; }
  double attr(const std::string& key, double fallback = 0.0) const {
    auto it = attributes.find(key);
    return it == attributes.end() ? fallback : it->second;
  }
  bool flag(const std::string& key) const { return attr(key) != 0.0; }
  friend bool operator==(const ActorState&, const ActorState&) = default;
};

enum class InfraKind {
  traffic_light,
  stop_sign,
  puddle,
  speed_bump,
  lane_blockage,
  roadside_open_space,
  fog_region,
  sensor_degradation_zone
};

NLOHMANN_JSON_SERIALIZE_ENUM(InfraKind, {{InfraKind::traffic_light, "traffic_light"},
                                         {InfraKind::stop_sign, "stop_sign"},
                                         {InfraKind::puddle, "puddle"},
                                         {InfraKind::speed_bump, "speed_bump"},
                                         {InfraKind::lane_blockage, "lane_blockage"},
                                         {InfraKind::roadside_open_space, "roadside_open_space"},
                                         {InfraKind::fog_region, "fog_region"},
                                         {InfraKind::sensor_degradation_zone, "sensor_degradation_zone"}})

enum class LightPhase { red, yellow, green, failed };

NLOHMANN_JSON_SERIALIZE_ENUM(LightPhase, {{LightPhase::red, "red"},
                                          {LightPhase::yellow, "yellow"},
                                          {LightPhase::green, "green"},
                                          {LightPhase::failed, "failed"}})

struct PhaseSpan {
  LightPhase phase = LightPhase::red;
  std::int64_t ticks = 1;
  friend bool operator==(const PhaseSpan&, const PhaseSpan&) = default;
};

struct InfrastructureElement {
  std::string id;
  InfraKind kind = InfraKind::puddle;
  Polygon geometry;
  // Traffic lights only: current phase and the cycle it follows.
  LightPhase phase = LightPhase::green;
  std::vector<PhaseSpan> cycle;
  std::int64_t cycle_offset = 0;
  // Kind-specific scalars (stop-sign control zone, fog visibility, masked sector bounds).
  std::map<std::string, double> params;

  double param(const std::string& key, double fallback = 0.0) const {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  }
  friend bool operator==(const InfrastructureElement&, const InfrastructureElement&) = default;
};

enum class SetTag { Basic, Hard, Thorny };

NLOHMANN_JSON_SERIALIZE_ENUM(SetTag, {{SetTag::Basic, "Basic"}, {SetTag::Hard, "Hard"}, {SetTag::Thorny, "Thorny"}})

inline std::string to_string(SetTag t) { return json(t).get<std::string>(); }

/// Strict parse: rejects anything other than "Basic", "Hard" or "Thorny".
inline SetTag parse_set_tag(const json& j) {
  if (j.is_string()) {
    for (const SetTag t : {SetTag::Basic, SetTag::Hard, SetTag::Thorny}) {
      if (j.get<std::string>() == to_string(t)) return t;
    }
  }
  throw ConfigError("unknown set tag " + j.dump());
}

struct WaypointRange {
  int first = 0;
  int last = 0;
  friend bool operator==(const WaypointRange&, const WaypointRange&) = default;
};

struct RouteSpec {
  std::string route_id;
  std::vector<Pose2D> waypoints;
  std::vector<Polygon> lane_corridor;  // union of these polygons
  double length = 0.0;
  std::string ability_id;
  SetTag set_tag = SetTag::Basic;
  std::vector<std::string> scenario_bindings;
  std::int64_t timeout_ticks = 1;
  bool ethics_applicable = false;
  std::optional<WaypointRange> rc_shortcut_segment;
  double speed_limit = 10.0;

  friend bool operator==(const RouteSpec&, const RouteSpec&) = default;
};

inline Polyline route_polyline(const RouteSpec& route) {
  std::vector<Vec2> pts;
  pts.reserve(route.waypoints.size());
  for (const auto& w : route.waypoints) pts.push_back(w.position());
  return Polyline(std::move(pts));
}

inline bool in_corridor(Vec2 p, const std::vector<Polygon>& corridor) {
  for (const auto& poly : corridor) {
    if (point_in_polygon(p, poly)) return true;
  }
  return false;
}

/// Throws ConfigError describing the first violated route invariant.
inline void validate_route(const RouteSpec& route) {
  const auto fail = [&](const std::string& what) {
    throw ConfigError("route '" + route.route_id + "': " + what);
  };
  if (route.waypoints.size() < 2) fail("needs at least 2 waypoints");
  for (std::size_t i = 1; i < route.waypoints.size(); ++i) {
    const double gap = norm(route.waypoints[i].position() - route.waypoints[i - 1].position());
    if (gap < kMinWaypointSpacing - 1e-9 || gap > kMaxWaypointSpacing + 1e-9) {
      fail("waypoint spacing " + std::to_string(gap) + " m at index " + std::to_string(i) +
           " outside [2, 10] m");
    }
  }
  for (std::size_t i = 0; i < route.waypoints.size(); ++i) {
    if (!in_corridor(route.waypoints[i].position(), route.lane_corridor)) {
      fail("waypoint " + std::to_string(i) + " lies outside the lane corridor");
    }
  }
  if (route.timeout_ticks <= 0) fail("timeout_ticks must be positive");
  if (route.rc_shortcut_segment) {
    const auto& seg = *route.rc_shortcut_segment;
    const int n = static_cast<int>(route.waypoints.size());
    if (seg.first < 0 || seg.last < seg.first || seg.last >= n) fail("rc_shortcut_segment out of range");
  }
}

/// Signed perpendicular distance from `pose` to the nearest route segment, left positive.
inline double lane_offset(const Pose2D& pose, const RouteSpec& route) {
  return route_polyline(route).project(pose.position()).lateral;
}

/// Advances the next-waypoint cursor over every in-order waypoint within the pass radius.
inline int waypoint_pass_check(const EgoState& ego, const RouteSpec& route, int next_index) {
  const int n = static_cast<int>(route.waypoints.size());
  while (next_index < n &&
         norm(ego.pose.position() - route.waypoints[static_cast<std::size_t>(next_index)].position()) <=
             kWaypointPassRadius) {
    ++next_index;
  }
  return next_index;
}

struct WorldState {
  std::int64_t tick = 0;
  EgoState ego;
  std::vector<ActorState> actors;
  std::vector<InfrastructureElement> infrastructure;
  std::map<std::string, Polyline> paths;
  // Episode RNG key; all draws are counter-based on (key, actor id, tick).
  std::uint64_t rng_stream = 0;

  const ActorState* find_actor(const std::string& id) const {
    for (const auto& a : actors) {
      if (a.id == id) return &a;
    }
    return nullptr;
  }
  ActorState* find_actor(const std::string& id) {
    for (auto& a : actors) {
      if (a.id == id) return &a;
    }
    return nullptr;
  }
  const InfrastructureElement* find_element(const std::string& id) const {
    for (const auto& e : infrastructure) {
      if (e.id == id) return &e;
    }
    return nullptr;
  }
};

inline bool operator==(const Polyline& a, const Polyline& b) { return a.points() == b.points(); }

inline bool operator==(const WorldState& a, const WorldState& b) {
  return a.tick == b.tick && a.ego == b.ego && a.actors == b.actors && a.infrastructure == b.infrastructure &&
         a.paths == b.paths && a.rng_stream == b.rng_stream;
}

// ---------------------------------------------------------------------------
// JSON mapping. Doubles are written in shortest round-trip form, so
// serialize/deserialize is bit-exact.

inline void to_json(json& j, const Vec2& v) { j = json::array({v.x, v.y}); }
inline void from_json(const json& j, Vec2& v) {
  v.x = j.at(0).get<double>();
  v.y = j.at(1).get<double>();
}

inline void to_json(json& j, const Pose2D& p) { j = json::array({p.x, p.y, p.heading}); }
inline void from_json(const json& j, Pose2D& p) {
  p.x = j.at(0).get<double>();
  p.y = j.at(1).get<double>();
  p.heading = j.at(2).get<double>();
}

inline void to_json(json& j, const Polyline& p) { j = p.points(); }
inline void from_json(const json& j, Polyline& p) { p = Polyline(j.get<std::vector<Vec2>>()); }

inline void to_json(json& j, const FaultSet& f) {
  j = json::array();
  if (f.contains(Fault::brake_failure)) j.push_back(fault_name(Fault::brake_failure));
}
inline void from_json(const json& j, FaultSet& f) {
  f = {};
  for (const auto& name : j) f.insert(fault_from_name(name.get<std::string>()));
}

inline void to_json(json& j, const EgoState& e) {
  j = json{{"pose", e.pose},           {"speed", e.speed},           {"steer_angle", e.steer_angle},
           {"half_length", e.half_length}, {"half_width", e.half_width}, {"faults", e.faults}};
}
inline void from_json(const json& j, EgoState& e) {
  j.at("pose").get_to(e.pose);
  j.at("speed").get_to(e.speed);
  j.at("steer_angle").get_to(e.steer_angle);
  j.at("half_length").get_to(e.half_length);
  j.at("half_width").get_to(e.half_width);
  j.at("faults").get_to(e.faults);
}

inline void to_json(json& j, const ControlCommand& c) {
  j = json{{"throttle", c.throttle}, {"steer", c.steer}, {"brake", c.brake}, {"hand_brake", c.hand_brake}};
}
inline void from_json(const json& j, ControlCommand& c) {
  j.at("throttle").get_to(c.throttle);
  j.at("steer").get_to(c.steer);
  j.at("brake").get_to(c.brake);
  j.at("hand_brake").get_to(c.hand_brake);
}

inline void to_json(json& j, const ActorState& a) {
  j = json{{"id", a.id},
           {"kind", a.kind},
           {"pose", a.pose},
           {"speed", a.speed},
           {"half_length", a.half_length},
           {"half_width", a.half_width},
           {"behavior", a.behavior_tag},
           {"attributes", a.attributes}};
  if (!a.path.empty()) {
    j["path"] = a.path;
    j["path_s"] = a.path_s;
    j["lateral"] = a.lateral;
    j["direction"] = a.direction;
  }
}
inline void from_json(const json& j, ActorState& a) {
  j.at("id").get_to(a.id);
  j.at("kind").get_to(a.kind);
  j.at("pose").get_to(a.pose);
  j.at("speed").get_to(a.speed);
  j.at("half_length").get_to(a.half_length);
  j.at("half_width").get_to(a.half_width);
  j.at("behavior").get_to(a.behavior_tag);
  a.attributes = j.value("attributes", std::map<std::string, double>{});
  a.path = j.value("path", std::string{});
  a.path_s = j.value("path_s", 0.0);
  a.lateral = j.value("lateral", 0.0);
  a.direction = j.value("direction", 1);
}

inline void to_json(json& j, const PhaseSpan& p) { j = json::array({p.phase, p.ticks}); }
inline void from_json(const json& j, PhaseSpan& p) {
  j.at(0).get_to(p.phase);
  j.at(1).get_to(p.ticks);
}

inline void to_json(json& j, const InfrastructureElement& e) {
  j = json{{"id", e.id}, {"kind", e.kind}, {"geometry", e.geometry}, {"params", e.params}};
  if (e.kind == InfraKind::traffic_light) {
    j["phase"] = e.phase;
    j["cycle"] = e.cycle;
    j["cycle_offset"] = e.cycle_offset;
  }
}
inline void from_json(const json& j, InfrastructureElement& e) {
  j.at("id").get_to(e.id);
  j.at("kind").get_to(e.kind);
  j.at("geometry").get_to(e.geometry);
  e.params = j.value("params", std::map<std::string, double>{});
  if (e.kind == InfraKind::traffic_light) {
    j.at("phase").get_to(e.phase);
    j.at("cycle").get_to(e.cycle);
    e.cycle_offset = j.value("cycle_offset", std::int64_t{0});
  }
}

inline void to_json(json& j, const RouteSpec& r) {
  j = json{{"route_id", r.route_id},
           {"waypoints", r.waypoints},
           {"lane_corridor", r.lane_corridor},
           {"length", r.length},
           {"ability_id", r.ability_id},
           {"set_tag", r.set_tag},
           {"scenario_bindings", r.scenario_bindings},
           {"timeout_ticks", r.timeout_ticks},
           {"ethics_applicable", r.ethics_applicable},
           {"speed_limit", r.speed_limit}};
  if (r.rc_shortcut_segment) {
    j["rc_shortcut_segment"] = json::array({r.rc_shortcut_segment->first, r.rc_shortcut_segment->last});
  } else {
    j["rc_shortcut_segment"] = nullptr;
  }
}
inline void from_json(const json& j, RouteSpec& r) {
  j.at("route_id").get_to(r.route_id);
  j.at("waypoints").get_to(r.waypoints);
  j.at("lane_corridor").get_to(r.lane_corridor);
  j.at("length").get_to(r.length);
  j.at("ability_id").get_to(r.ability_id);
  j.at("set_tag").get_to(r.set_tag);
  j.at("scenario_bindings").get_to(r.scenario_bindings);
  j.at("timeout_ticks").get_to(r.timeout_ticks);
  j.at("ethics_applicable").get_to(r.ethics_applicable);
  j.at("speed_limit").get_to(r.speed_limit);
  const auto& seg = j.at("rc_shortcut_segment");
  if (seg.is_null()) {
    r.rc_shortcut_segment.reset();
  } else {
    r.rc_shortcut_segment = WaypointRange{seg.at(0).get<int>(), seg.at(1).get<int>()};
  }
}

inline void to_json(json& j, const WorldState& w) {
  j = json{{"tick", w.tick},
           {"ego", w.ego},
           {"actors", w.actors},
           {"infrastructure", w.infrastructure},
           {"paths", w.paths},
           {"rng_stream", w.rng_stream}};
}
inline void from_json(const json& j, WorldState& w) {
  j.at("tick").get_to(w.tick);
  j.at("ego").get_to(w.ego);
  j.at("actors").get_to(w.actors);
  j.at("infrastructure").get_to(w.infrastructure);
  j.at("paths").get_to(w.paths);
  j.at("rng_stream").get_to(w.rng_stream);
}

}  // namespace roadjudge
