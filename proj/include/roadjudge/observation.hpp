#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "roadjudge/events.hpp"
#include "roadjudge/scenario.hpp"
#include "roadjudge/world.hpp"

namespace roadjudge {

inline constexpr int kPreviewWaypoints = 10;
inline constexpr double kSensorRange = 60.0;

struct PreviewPoint {
  Vec2 position;  // ego frame
  double free_left = 0.0;
  double free_right = 0.0;
  friend bool operator==(const PreviewPoint&, const PreviewPoint&) = default;
};

struct ObservedActor {
  std::string id;
  ActorKind kind = ActorKind::vehicle;
  Pose2D relative_pose;
  double speed = 0.0;
  double half_length = 0.0;
  double half_width = 0.0;
  std::map<std::string, double> attributes;
  friend bool operator==(const ObservedActor&, const ObservedActor&) = default;
};

struct ObservedSignal {
  LightPhase phase = LightPhase::green;
  double distance = 0.0;  // route distance from the ego centre to the near edge of the stop zone
  friend bool operator==(const ObservedSignal&, const ObservedSignal&) = default;
};

struct Observation {
  std::int64_t tick = 0;
  double speed = 0.0;
  double steer = 0.0;
  std::vector<std::string> fault_flags;
  std::vector<PreviewPoint> route_preview;
  std::optional<Vec2> previous_waypoint;
  std::vector<ObservedActor> nearby_actors;
  std::optional<ObservedSignal> traffic_light;
  std::optional<double> stop_sign_distance;
  std::vector<std::string> region_flags;
  std::optional<Vec2> pullover_target;
  double speed_limit = 10.0;

  bool has_flag(const std::string& f) const {
    return std::find(region_flags.begin(), region_flags.end(), f) != region_flags.end();
  }
  bool has_fault(const std::string& f) const {
    return std::find(fault_flags.begin(), fault_flags.end(), f) != fault_flags.end();
  }
  friend bool operator==(const Observation&, const Observation&) = default;
};

/// Static per-route data the observer precomputes once per episode.
struct RouteContext {
  RouteSpec route;
  Polyline line;
  std::vector<double> free_left;
  std::vector<double> free_right;
  std::vector<double> waypoint_s;
  DetectorBindings bindings;

  RouteContext() = default;
  RouteContext(RouteSpec r, DetectorBindings b) : route(std::move(r)), line(route_polyline(route)), bindings(std::move(b)) {
    for (std::size_t i = 0; i < route.waypoints.size(); ++i) {
      const Pose2D& w = route.waypoints[i];
      free_left.push_back(scan(w, +1.0));
      free_right.push_back(scan(w, -1.0));
      waypoint_s.push_back(line.station(i));
    }
  }

 private:
  double scan(const Pose2D& w, double side) const {
    const Vec2 n = left_normal(w.heading) * side;
    double free = 0.0;
    for (int k = 1; k <= 100; ++k) {
      const double t = 0.1 * k;
      if (!in_corridor(w.position() + n * t, route.lane_corridor)) break;
      free = t;
    }
    return free;
  }
};

namespace detail {

inline Pose2D relative_pose(const Pose2D& ego, const Pose2D& other) {
  const Vec2 p = to_local(ego, other.position());
  return {p.x, p.y, normalize_angle(other.heading - ego.heading)};
}

struct StationSpan {
  double s_min = 0.0;
  double s_max = 0.0;
  double lateral = 0.0;  // of the centroid
};

inline StationSpan polygon_span(const Polyline& line, const Polygon& poly) {
  StationSpan out{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), 0.0};
  Vec2 c;
  for (const auto& v : poly) {
    const double s = line.project(v).s;
    out.s_min = std::min(out.s_min, s);
    out.s_max = std::max(out.s_max, s);
    c = c + v;
  }
  out.lateral = line.project(c * (1.0 / static_cast<double>(poly.size()))).lateral;
  return out;
}

}  // namespace detail

/// Structured sensor view of the world for the ego. Deterministic in its inputs.
inline Observation observe(const WorldState& world, const RouteContext& ctx, const std::string& phase,
                           int waypoint_cursor) {
  Observation obs;
  const EgoState& ego = world.ego;
  obs.tick = world.tick;
  obs.speed = ego.speed;
  obs.steer = ego.steer_angle;
  if (ego.faults.contains(Fault::brake_failure)) obs.fault_flags.push_back(fault_name(Fault::brake_failure));
  obs.speed_limit = ctx.route.speed_limit;

  const int n = static_cast<int>(ctx.route.waypoints.size());
  for (int i = waypoint_cursor; i < std::min(n, waypoint_cursor + kPreviewWaypoints); ++i) {
    const auto k = static_cast<std::size_t>(i);
    obs.route_preview.push_back(
        {to_local(ego.pose, ctx.route.waypoints[k].position()), ctx.free_left[k], ctx.free_right[k]});
  }
  if (waypoint_cursor > 0 && waypoint_cursor <= n) {
    obs.previous_waypoint = to_local(ego.pose, ctx.route.waypoints[static_cast<std::size_t>(waypoint_cursor - 1)].position());
  }

  const Vec2 ego_p = ego.pose.position();
  const auto ego_proj = ctx.line.project(ego_p);
  std::set<std::string> flags;
  double visibility = kSensorRange;
  std::vector<std::pair<double, double>> masked_sectors;

  for (const auto& e : world.infrastructure) {
    const bool inside = e.geometry.size() >= 3 && point_in_polygon(ego_p, e.geometry);
    switch (e.kind) {
      case InfraKind::fog_region:
        if (inside) {
          flags.insert("fog");
          visibility = std::min(visibility, e.param("visibility", 25.0));
        }
        break;
      case InfraKind::sensor_degradation_zone:
        if (inside) {
          flags.insert("sensor_degraded");
          masked_sectors.emplace_back(e.param("bearing_min", -30.0) * std::numbers::pi / 180.0,
                                      e.param("bearing_max", 30.0) * std::numbers::pi / 180.0);
        }
        break;
      case InfraKind::puddle:
      case InfraKind::speed_bump: {
        const auto span = detail::polygon_span(ctx.line, e.geometry);
        if (span.s_min - ego_proj.s < 25.0 && span.s_max - ego_proj.s > -ego.half_length) {
          flags.insert(e.kind == InfraKind::puddle ? "in_puddle_zone" : "near_speed_bump");
        }
        break;
      }
      case InfraKind::roadside_open_space:
        if (inside && e.param("curb") != 0.0) flags.insert("curbside");
        break;
      case InfraKind::traffic_light:
      case InfraKind::stop_sign: {
        const auto span = detail::polygon_span(ctx.line, e.geometry);
        if (std::abs(span.lateral) > 4.0) break;
        const double dist = span.s_min - ego_proj.s;
        if (span.s_max - ego_proj.s < -ego.half_length || dist > 80.0) break;
        if (e.kind == InfraKind::traffic_light) {
          if (!obs.traffic_light || dist < obs.traffic_light->distance) obs.traffic_light = ObservedSignal{e.phase, dist};
        } else if (!obs.stop_sign_distance || dist < *obs.stop_sign_distance) {
          obs.stop_sign_distance = dist;
        }
        break;
      }
      default:
        break;
    }
  }

  if (ctx.bindings.armed.count(EventType::POLICE_STOP_VIOLATION) && phase == ctx.bindings.police_phase) {
    flags.insert("police_pullover_armed");
    if (const auto* zone = world.find_element(ctx.bindings.pullover_zone)) {
      Vec2 c;
      for (const auto& v : zone->geometry) c = c + v;
      obs.pullover_target = to_local(ego.pose, c * (1.0 / static_cast<double>(zone->geometry.size())));
    }
  }

  for (const auto& a : world.actors) {
    const Vec2 rel = to_local(ego.pose, a.pose.position());
    const double dist = norm(rel);
    if (a.kind == ActorKind::emergency_vehicle && rel.x < 0.0 && std::abs(rel.y) < a.half_width + ego.half_width + 0.3 &&
        -rel.x - a.half_length - ego.half_length < 30.0) {
      flags.insert("emergency_behind");
    }
    if (dist > visibility) continue;
    const double bearing = std::atan2(rel.y, rel.x);
    bool masked = false;
    for (const auto& [lo, hi] : masked_sectors) {
      if (bearing >= lo && bearing <= hi) masked = true;
    }
    if (masked) continue;
    obs.nearby_actors.push_back(
        {a.id, a.kind, detail::relative_pose(ego.pose, a.pose), a.speed, a.half_length, a.half_width, a.attributes});
  }
  obs.region_flags.assign(flags.begin(), flags.end());
  return obs;
}

// ---------------------------------------------------------------------------
// JSON

inline void to_json(json& j, const PreviewPoint& p) { j = json::array({p.position.x, p.position.y, p.free_left, p.free_right}); }
inline void from_json(const json& j, PreviewPoint& p) {
  p.position = {j.at(0).get<double>(), j.at(1).get<double>()};
  p.free_left = j.at(2).get<double>();
  p.free_right = j.at(3).get<double>();
}

inline void to_json(json& j, const ObservedActor& a) {
  j = json{{"id", a.id},       {"kind", a.kind},
           {"pose", a.relative_pose}, {"speed", a.speed},
           {"half_length", a.half_length}, {"half_width", a.half_width},
           {"attributes", a.attributes}};
}
inline void from_json(const json& j, ObservedActor& a) {
  j.at("id").get_to(a.id);
  j.at("kind").get_to(a.kind);
  j.at("pose").get_to(a.relative_pose);
  j.at("speed").get_to(a.speed);
  j.at("half_length").get_to(a.half_length);
  j.at("half_width").get_to(a.half_width);
  j.at("attributes").get_to(a.attributes);
}

inline void to_json(json& j, const Observation& o) {
  j = json{{"tick", o.tick},
           {"speed", o.speed},
           {"steer", o.steer},
           {"fault_flags", o.fault_flags},
           {"route_preview", o.route_preview},
           {"nearby_actors", o.nearby_actors},
           {"region_flags", o.region_flags},
           {"speed_limit", o.speed_limit}};
  j["previous_waypoint"] = o.previous_waypoint ? json(*o.previous_waypoint) : json(nullptr);
  j["traffic_light"] = o.traffic_light ? json{{"phase", o.traffic_light->phase}, {"distance", o.traffic_light->distance}}
                                       : json(nullptr);
  j["stop_sign_distance"] = o.stop_sign_distance ? json(*o.stop_sign_distance) : json(nullptr);
  j["pullover_target"] = o.pullover_target ? json(*o.pullover_target) : json(nullptr);
}
inline void from_json(const json& j, Observation& o) {
  j.at("tick").get_to(o.tick);
  j.at("speed").get_to(o.speed);
  j.at("steer").get_to(o.steer);
  j.at("fault_flags").get_to(o.fault_flags);
  j.at("route_preview").get_to(o.route_preview);
  j.at("nearby_actors").get_to(o.nearby_actors);
  j.at("region_flags").get_to(o.region_flags);
  j.at("speed_limit").get_to(o.speed_limit);
  const auto opt_vec = [&](const char* k) {
    return j.at(k).is_null() ? std::nullopt : std::optional<Vec2>(j.at(k).get<Vec2>());
  };
  o.previous_waypoint = opt_vec("previous_waypoint");
  o.pullover_target = opt_vec("pullover_target");
  if (j.at("traffic_light").is_null()) {
    o.traffic_light.reset();
  } else {
    o.traffic_light = ObservedSignal{j.at("traffic_light").at("phase").get<LightPhase>(),
                                     j.at("traffic_light").at("distance").get<double>()};
  }
  o.stop_sign_distance =
      j.at("stop_sign_distance").is_null() ? std::nullopt : std::optional<double>(j.at("stop_sign_distance").get<double>());
}

}  // namespace roadjudge
