#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include "roadjudge/engine.hpp"
#include "roadjudge/events.hpp"
#include "roadjudge/rng.hpp"
#include "roadjudge/world.hpp"

namespace roadjudge {

inline constexpr int kScenarioSchemaVersion = 1;
inline constexpr double kRouteWaypointSpacing = 5.0;
inline constexpr double kReferenceMinSpeed = 1.0;

// ---------------------------------------------------------------------------
// Parameters

struct ParamSpec {
  std::string name;
  bool is_enum = false;
  double min = 0.0;
  double max = 0.0;
  // Enum labels and the number each label stands for in numeric fields.
  std::map<std::string, double> choices;
  json default_value;
};

using ParamValues = std::map<std::string, json>;

inline ParamSpec parse_param_spec(const std::string& name, const json& j) {
  ParamSpec p;
  p.name = name;
  const std::string type = j.at("type").get<std::string>();
  if (type == "number") {
    p.min = j.at("min").get<double>();
    p.max = j.at("max").get<double>();
    if (!(p.min <= p.max)) throw ConfigError("parameter '" + name + "': min > max");
  } else if (type == "enum") {
    p.is_enum = true;
    const auto& c = j.at("choices");
    if (c.is_array()) {
      double i = 0.0;
      for (const auto& label : c) p.choices[label.get<std::string>()] = i++;
    } else {
      for (auto it = c.begin(); it != c.end(); ++it) p.choices[it.key()] = it.value().get<double>();
    }
    if (p.choices.empty()) throw ConfigError("parameter '" + name + "': no choices");
  } else {
    throw ConfigError("parameter '" + name + "': unknown type '" + type + "'");
  }
  p.default_value = j.at("default");
  return p;
}

inline json param_spec_to_json(const ParamSpec& p) {
  json j;
  if (p.is_enum) {
    j["type"] = "enum";
    j["choices"] = p.choices;
  } else {
    j["type"] = "number";
    j["min"] = p.min;
    j["max"] = p.max;
  }
  j["default"] = p.default_value;
  return j;
}

inline void validate_param(const ParamSpec& spec, const json& v) {
  if (spec.is_enum) {
    if (!v.is_string() || !spec.choices.count(v.get<std::string>())) {
      throw ConfigError("parameter '" + spec.name + "': value " + v.dump() + " is not one of its choices");
    }
    return;
  }
  if (!v.is_number()) throw ConfigError("parameter '" + spec.name + "': expected a number, got " + v.dump());
  const double x = v.get<double>();
  if (!std::isfinite(x) || x < spec.min || x > spec.max) {
    throw ConfigError("parameter '" + spec.name + "': value " + v.dump() + " outside [" + json(spec.min).dump() +
                      ", " + json(spec.max).dump() + "]");
  }
}

/// Resolves template values: literals, "$name", or "$name <op> number" with op in + - *.
class Resolver {
 public:
  Resolver(const std::vector<ParamSpec>& specs, const ParamValues& values) : specs_(specs), values_(values) {}

  double num(const json& v) const {
    if (v.is_number()) return v.get<double>();
    if (!v.is_string()) throw ConfigError("expected number or parameter reference, got " + v.dump());
    const auto [name, op, operand] = parse(v.get<std::string>());
    const json& raw = value_of(name);
    double base = 0.0;
    if (raw.is_string()) {
      base = spec_of(name).choices.at(raw.get<std::string>());
    } else {
      base = raw.get<double>();
    }
    switch (op) {
      case '+': return base + operand;
      case '-': return base - operand;
      case '*': return base * operand;
      default: return base;
    }
  }

  std::int64_t ticks(const json& v) const { return static_cast<std::int64_t>(std::llround(num(v))); }

  std::string str(const json& v) const {
    if (!v.is_string()) throw ConfigError("expected string, got " + v.dump());
    const std::string s = v.get<std::string>();
    if (s.empty() || s[0] != '$') return s;
    const auto [name, op, operand] = parse(s);
    const json& raw = value_of(name);
    return raw.is_string() ? raw.get<std::string>() : raw.dump();
  }

  double num_or(const json& obj, const char* key, double fallback) const {
    return obj.contains(key) ? num(obj.at(key)) : fallback;
  }

 private:
  struct Ref {
    std::string name;
    char op;
    double operand;
  };

  static Ref parse(const std::string& s) {
    static const std::regex re(R"(^\$([A-Za-z_][A-Za-z0-9_]*)\s*(?:([-+*])\s*(-?[0-9]*\.?[0-9]+))?$)");
    std::smatch m;
    if (!std::regex_match(s, m, re)) throw ConfigError("malformed parameter reference '" + s + "'");
    return {m[1].str(), m[2].matched ? m[2].str()[0] : '\0', m[3].matched ? std::stod(m[3].str()) : 0.0};
  }

  const ParamSpec& spec_of(const std::string& name) const {
    for (const auto& p : specs_) {
      if (p.name == name) return p;
    }
    throw ConfigError("reference to undeclared parameter '" + name + "'");
  }

  const json& value_of(const std::string& name) const {
    spec_of(name);
    auto it = values_.find(name);
    if (it == values_.end()) throw ConfigError("parameter '" + name + "' has no value");
    return it->second;
  }

  const std::vector<ParamSpec>& specs_;
  const ParamValues& values_;
};

// ---------------------------------------------------------------------------
// Templates

struct ScenarioTemplate {
  std::string template_id;
  std::string ability_id;
  SetTag set_tag = SetTag::Basic;
  std::string description;
  std::vector<ParamSpec> params;
  // Suite variants: partial parameter assignments layered over the defaults.
  std::vector<ParamValues> variants;
  json body;

  ParamValues defaults() const {
    ParamValues v;
    for (const auto& p : params) v[p.name] = p.default_value;
    return v;
  }

  /// Defaults overlaid with `overrides`; rejects unknown names and out-of-range values.
  ParamValues resolve_params(const ParamValues& overrides) const {
    ParamValues v = defaults();
    for (const auto& [name, value] : overrides) {
      auto it = std::find_if(params.begin(), params.end(), [&](const ParamSpec& p) { return p.name == name; });
      if (it == params.end()) throw ConfigError("template '" + template_id + "': unknown parameter '" + name + "'");
      v[name] = value;
    }
    for (const auto& p : params) validate_param(p, v.at(p.name));
    return v;
  }
};

inline const std::vector<std::string>& template_body_keys() {
  static const std::vector<std::string> keys = {"layout",   "paths",    "actors",  "infrastructure",
                                                "phases",   "triggers", "success", "detectors"};
  return keys;
}

inline json template_to_json(const ScenarioTemplate& t) {
  json j;
  j["schema_version"] = kScenarioSchemaVersion;
  j["template_id"] = t.template_id;
  j["ability_id"] = t.ability_id;
  j["set_tag"] = t.set_tag;
  j["description"] = t.description;
  json params = json::object();
  for (const auto& p : t.params) params[p.name] = param_spec_to_json(p);
  j["parameters"] = params;
  j["variants"] = t.variants;
  for (const auto& k : template_body_keys()) {
    if (t.body.contains(k)) j[k] = t.body.at(k);
  }
  return j;
}

// ---------------------------------------------------------------------------
// Obstacle categories

struct ObstacleKindInfo {
  ActorKind kind = ActorKind::static_obstacle;
  double half_length = 0.5;
  double half_width = 0.5;
  std::map<std::string, double> attributes;
};

inline const std::map<std::string, ObstacleKindInfo>& obstacle_kinds() {
  static const std::map<std::string, ObstacleKindInfo> table = {
      {"traffic_cone", {ActorKind::static_obstacle, 0.3, 0.3, {}}},
      {"construction_barrier", {ActorKind::static_obstacle, 0.4, 1.2, {}}},
      {"scattered_debris", {ActorKind::static_obstacle, 1.5, 1.0, {}}},
      {"collapsed_pole", {ActorKind::static_obstacle, 0.4, 1.6, {}}},
      {"fallen_tree", {ActorKind::static_obstacle, 0.6, 1.8, {}}},
      {"suspected_fuel_spill", {ActorKind::static_obstacle, 3.0, 1.6, {{"unknown_object", 1.0}}}},
      {"stray_tire", {ActorKind::static_obstacle, 0.4, 0.4, {{"unknown_object", 1.0}}}},
      {"broken_down_car", {ActorKind::vehicle, 2.3, 0.95, {{"parked", 1.0}, {"hazard_lights", 1.0}}}},
      {"broken_down_truck", {ActorKind::vehicle, 4.5, 1.25, {{"parked", 1.0}, {"hazard_lights", 1.0}}}},
      {"parked_van", {ActorKind::vehicle, 2.6, 1.0, {{"parked", 1.0}}}},
      {"crashed_car", {ActorKind::vehicle, 2.3, 0.95, {{"parked", 1.0}, {"accident", 1.0}}}},
  };
  return table;
}

inline std::pair<double, double> default_extents(ActorKind k) {
  switch (k) {
    case ActorKind::pedestrian: return {0.3, 0.3};
    case ActorKind::cyclist: return {0.9, 0.35};
    case ActorKind::static_obstacle: return {0.5, 0.5};
    case ActorKind::emergency_vehicle: return {3.0, 1.1};
    default: return {2.3, 0.95};
  }
}

// ---------------------------------------------------------------------------
// Scenario program: the resolved, seed-specific form of a template

struct Condition {
  enum class Kind { ego_s_ge, ego_within, ego_stopped_in, tick_ge, phase_ticks_ge, actor_behind_ego, all_of, any_of };
  Kind kind = Kind::tick_ge;
  double value = 0.0;
  std::string target;
  std::vector<Condition> children;
};

struct TriggerCommand {
  enum class Kind { spawn, despawn, set_attribute, set_behavior, inject_fault, fail_light };
  Kind kind = Kind::spawn;
  std::string id;
  std::string key;
  double value = 0.0;
};

struct Trigger {
  std::string id;
  std::optional<std::string> from_phase;
  std::optional<std::string> to_phase;
  Condition when;
  std::vector<TriggerCommand> commands;
};

/// Actor held back until a trigger spawns it. With `ego_anchored`, `s` is relative to the ego.
struct ReservedActor {
  ActorState state;
  bool ego_anchored = false;
  double s = 0.0;
  double d = 0.0;
  double heading_rel = 0.0;
};

struct ScenarioProgram {
  std::string template_id;
  std::vector<std::string> phases;
  std::vector<Trigger> triggers;
  std::map<std::string, ReservedActor> reserve;
  std::map<std::string, Polygon> zones;
  Polyline reference;
  std::optional<int> shortcut_last_waypoint;
  std::optional<std::string> shortcut_phase;
};

struct ScenarioInstance {
  RouteSpec route;
  WorldState world;
  std::shared_ptr<const ScenarioProgram> program;
  DetectorBindings bindings;
};

enum class ScenarioStatus { running, success, timeout_pending };

inline std::string to_string(ScenarioStatus s) {
  switch (s) {
    case ScenarioStatus::running: return "running";
    case ScenarioStatus::success: return "success";
    case ScenarioStatus::timeout_pending: return "timeout_pending";
  }
  return "unknown";
}

struct TriggerLogEntry {
  std::int64_t tick = 0;
  std::string trigger_id;
  friend bool operator==(const TriggerLogEntry&, const TriggerLogEntry&) = default;
};

struct ScenarioRuntime {
  std::shared_ptr<const ScenarioProgram> program;
  std::string phase;
  std::int64_t phase_entered_tick = 0;
  std::set<std::string> fired;
  std::vector<TriggerLogEntry> trigger_log;
  std::vector<std::string> spawned_actor_ids;
  std::map<std::string, std::int64_t> stopped_run;
  int waypoint_cursor = 0;
  bool success = false;
};

// ---------------------------------------------------------------------------
// Instantiation

namespace detail {

/// Integrates layout pieces from a start pose into a densely sampled reference line.
inline Polyline build_reference(const json& pieces, const Resolver& r, const Pose2D& start) {
  std::vector<Vec2> pts{start.position()};
  double x = start.x, y = start.y, h = start.heading;
  for (const auto& piece : pieces) {
    if (piece.contains("straight")) {
      const double len = r.num(piece.at("straight"));
      if (!(len > 0.0)) throw ConfigError("layout: straight length must be positive");
      const int n = std::max(1, static_cast<int>(std::ceil(len / 2.0)));
      for (int i = 1; i <= n; ++i) {
        const double t = len * i / n;
        pts.push_back({x + t * std::cos(h), y + t * std::sin(h)});
      }
      x = pts.back().x;
      y = pts.back().y;
    } else if (piece.contains("arc")) {
      const auto& a = piece.at("arc");
      const double radius = r.num(a.at("radius"));
      const double angle = r.num(a.at("angle")) * std::numbers::pi / 180.0;
      if (!(radius > 0.0)) throw ConfigError("layout: arc radius must be positive");
      const int n = std::max(2, static_cast<int>(std::ceil(std::abs(angle) * radius / 1.0)));
      const double dtheta = angle / n;
      const double chord = 2.0 * radius * std::sin(std::abs(dtheta) / 2.0);
      for (int i = 0; i < n; ++i) {
        const double mid = h + dtheta / 2.0;
        x += chord * std::cos(mid);
        y += chord * std::sin(mid);
        h += dtheta;
        pts.push_back({x, y});
      }
    } else {
      throw ConfigError("layout: unknown piece " + piece.dump());
    }
  }
  return Polyline(std::move(pts));
}

/// Lateral route shift at arc length s: piecewise-linear ramps, last one wins.
inline double route_shift(const std::vector<std::array<double, 4>>& ramps, double s) {
  double d = 0.0;
  for (const auto& [s0, s1, d0, d1] : ramps) {
    if (s < s0) continue;
    if (s >= s1) {
      d = d1;
    } else {
      d = d0 + (d1 - d0) * (s - s0) / std::max(s1 - s0, 1e-9);
    }
  }
  return d;
}

inline Polygon strip_polygon(const Polyline& line, double s0, double s1, double d_right, double d_left) {
  Polygon left, right;
  const int n = std::max(1, static_cast<int>(std::ceil((s1 - s0) / 1.0)));
  for (int i = 0; i <= n; ++i) {
    const double s = s0 + (s1 - s0) * i / n;
    const Pose2D l = line.offset_at(s, d_left);
    const Pose2D rr = line.offset_at(s, d_right);
    left.push_back(l.position());
    right.push_back(rr.position());
  }
  Polygon poly = left;
  for (auto it = right.rbegin(); it != right.rend(); ++it) poly.push_back(*it);
  return poly;
}

inline Polygon rect_polygon(const Polyline& line, double s0, double s1, double d0, double d1) {
  return {line.offset_at(s0, d0).position(), line.offset_at(s1, d0).position(), line.offset_at(s1, d1).position(),
          line.offset_at(s0, d1).position()};
}

inline Condition parse_condition(const json& j, const Resolver& r) {
  if (!j.is_object() || j.size() != 1) throw ConfigError("trigger condition must have exactly one key: " + j.dump());
  const std::string key = j.begin().key();
  const json& v = j.begin().value();
  Condition c;
  using K = Condition::Kind;
  if (key == "ego_s_ge") {
    c.kind = K::ego_s_ge;
    c.value = r.num(v);
  } else if (key == "ego_within") {
    c.kind = K::ego_within;
    c.target = r.str(v.at("actor"));
    c.value = r.num(v.at("distance"));
    if (!(c.value >= 0.0)) throw ConfigError("ego_within distance must be non-negative");
  } else if (key == "ego_stopped_in") {
    c.kind = K::ego_stopped_in;
    c.target = r.str(v.at("zone"));
    c.value = r.num(v.at("ticks"));
  } else if (key == "tick_ge") {
    c.kind = K::tick_ge;
    c.value = r.num(v);
  } else if (key == "phase_ticks_ge") {
    c.kind = K::phase_ticks_ge;
    c.value = r.num(v);
  } else if (key == "actor_behind_ego") {
    c.kind = K::actor_behind_ego;
    c.target = r.str(v);
  } else if (key == "all_of" || key == "any_of") {
    c.kind = key == "all_of" ? K::all_of : K::any_of;
    for (const auto& child : v) c.children.push_back(parse_condition(child, r));
    if (c.children.empty()) throw ConfigError(key + " needs at least one condition");
  } else {
    throw ConfigError("unknown trigger condition '" + key + "'");
  }
  return c;
}

inline TriggerCommand parse_command(const json& j, const Resolver& r) {
  if (!j.is_object() || j.size() != 1) throw ConfigError("trigger command must have exactly one key: " + j.dump());
  const std::string key = j.begin().key();
  const json& v = j.begin().value();
  TriggerCommand c;
  using K = TriggerCommand::Kind;
  if (key == "spawn") {
    c.kind = K::spawn;
    c.id = r.str(v);
  } else if (key == "despawn") {
    c.kind = K::despawn;
    c.id = r.str(v);
  } else if (key == "set_attribute") {
    c.kind = K::set_attribute;
    c.id = r.str(v.at(0));
    c.key = r.str(v.at(1));
    c.value = r.num(v.at(2));
  } else if (key == "set_behavior") {
    c.kind = K::set_behavior;
    c.id = r.str(v.at(0));
    c.key = r.str(v.at(1));
    if (!is_known_behavior(c.key)) throw ConfigError("unknown behavior '" + c.key + "'");
  } else if (key == "inject_fault") {
    c.kind = K::inject_fault;
    c.key = r.str(v);
    fault_from_name(c.key);
  } else if (key == "fail_light") {
    c.kind = K::fail_light;
    c.id = r.str(v);
  } else {
    throw ConfigError("unknown trigger command '" + key + "'");
  }
  return c;
}

}  // namespace detail

/// Expands a template into a concrete route, initial world and scenario program.
inline ScenarioInstance instantiate_scenario(const ScenarioTemplate& tpl, const ParamValues& overrides,
                                             std::uint64_t seed, const std::string& route_id = "") {
  const ParamValues params = tpl.resolve_params(overrides);
  const Resolver r(tpl.params, params);
  const json& body = tpl.body;
  const json& layout = body.at("layout");

  SeqRng placement(splitmix64(seed ^ fnv1a64(tpl.template_id)));
  const Pose2D start = make_pose(placement.uniform(-200.0, 200.0), placement.uniform(-200.0, 200.0),
                                 placement.uniform(-std::numbers::pi, std::numbers::pi));

  auto program = std::make_shared<ScenarioProgram>();
  program->template_id = tpl.template_id;
  program->reference = detail::build_reference(layout.at("pieces"), r, start);
  const Polyline& ref = program->reference;
  const double ref_len = ref.length();

  ScenarioInstance inst;
  RouteSpec& route = inst.route;
  route.route_id = route_id.empty() ? tpl.template_id : route_id;
  route.ability_id = tpl.ability_id;
  route.set_tag = tpl.set_tag;
  route.scenario_bindings = {tpl.template_id};
  route.speed_limit = r.num_or(layout, "speed_limit", 10.0);

  // Route waypoints along the reference, shifted laterally where the layout asks.
  std::vector<std::array<double, 4>> ramps;
  for (const auto& ramp : layout.value("route_shifts", json::array())) {
    ramps.push_back({r.num(ramp.at(0)), r.num(ramp.at(1)), r.num(ramp.at(2)), r.num(ramp.at(3))});
  }
  const double route_start = r.num_or(layout, "route_start_s", 0.0);
  const double route_end = std::min(ref_len, r.num_or(layout, "route_end_s", ref_len));
  std::vector<double> stations;
  for (double s = route_start; s < route_end - 1e-9; s += kRouteWaypointSpacing) stations.push_back(s);
  if (!stations.empty() && route_end - stations.back() < kMinWaypointSpacing) stations.pop_back();
  stations.push_back(route_end);
  for (const double s : stations) {
    const double d = detail::route_shift(ramps, s);
    const Pose2D p = ref.offset_at(s, d);
    const double slope = (detail::route_shift(ramps, s + 0.5) - detail::route_shift(ramps, s - 0.5));
    route.waypoints.push_back(make_pose(p.x, p.y, p.heading + std::atan(slope)));
  }
  route.length = route_polyline(route).length();
  route.timeout_ticks = static_cast<std::int64_t>(std::ceil(route.length / kReferenceMinSpeed / 0.05));

  // Corridor: constant-width strips between breakpoints, plus explicit rectangles.
  {
    const double base_left = r.num_or(layout, "corridor_left", 1.75);
    const double base_right = r.num_or(layout, "corridor_right", 1.75);
    struct Widen {
      double s0, s1, left, right;
    };
    std::vector<Widen> widen;
    std::set<double> breaks = {route_start - 4.0, route_end + 4.0};
    for (const auto& w : layout.value("corridor_overrides", json::array())) {
      Widen x{r.num(w.at("s0")), r.num(w.at("s1")), r.num(w.at("left")), r.num(w.at("right"))};
      widen.push_back(x);
      breaks.insert(std::clamp(x.s0, route_start - 4.0, route_end + 4.0));
      breaks.insert(std::clamp(x.s1, route_start - 4.0, route_end + 4.0));
    }
    for (auto it = breaks.begin(); std::next(it) != breaks.end(); ++it) {
      const double a = *it;
      const double b = *std::next(it);
      if (b - a < 1e-6) continue;
      const double mid = 0.5 * (a + b);
      double left = base_left, right = base_right;
      for (const auto& w : widen) {
        if (mid >= w.s0 && mid <= w.s1) {
          left = w.left;
          right = w.right;
        }
      }
      route.lane_corridor.push_back(detail::strip_polygon(ref, a - 0.05, b + 0.05, -right, left));
    }
    for (const auto& rect : layout.value("corridor_rects", json::array())) {
      route.lane_corridor.push_back(
          detail::rect_polygon(ref, r.num(rect.at(0)), r.num(rect.at(1)), r.num(rect.at(2)), r.num(rect.at(3))));
    }
  }

  WorldState& world = inst.world;
  world.rng_stream = splitmix64(seed ^ 0x5eed5eed5eedULL ^ fnv1a64(route.route_id));
  world.paths["ref"] = ref;
  const json path_specs = body.value("paths", json::object());
  for (const auto& [name, spec] : path_specs.items()) {
    if (name == "ref") throw ConfigError("path name 'ref' is reserved");
    std::vector<Vec2> pts;
    if (spec.contains("points") && spec.contains("anchor_s")) {
      // Local (forward, left) coordinates in the reference frame at anchor_s.
      const Pose2D anchor = ref.at(r.num(spec.at("anchor_s")));
      for (const auto& p : spec.at("points")) pts.push_back(to_world(anchor, {r.num(p.at(0)), r.num(p.at(1))}));
    } else if (spec.contains("points")) {
      for (const auto& p : spec.at("points")) pts.push_back(ref.offset_at(r.num(p.at(0)), r.num(p.at(1))).position());
    } else {
      const double offset = r.num(spec.at("offset"));
      const double s0 = r.num_or(spec, "s0", -20.0);
      const double s1 = r.num_or(spec, "s1", ref_len + 20.0);
      const int n = std::max(1, static_cast<int>(std::ceil((s1 - s0) / 2.0)));
      for (int i = 0; i <= n; ++i) pts.push_back(ref.offset_at(s0 + (s1 - s0) * i / n, offset).position());
    }
    if (spec.value("reverse", false)) std::reverse(pts.begin(), pts.end());
    if (pts.size() < 2) throw ConfigError("path '" + name + "' needs at least two points");
    world.paths[name] = Polyline(std::move(pts));
  }

  // Ego at the route start.
  const Pose2D ego_pose = route.waypoints.front();
  world.ego.pose = ego_pose;
  world.ego.speed = r.num_or(layout, "ego_initial_speed", 0.0);

  // Actors.
  std::set<std::string> ids;
  for (const auto& a : body.value("actors", json::array())) {
    const std::string id = r.str(a.at("id"));
    if (id.empty() || !ids.insert(id).second) throw ConfigError("duplicate or empty actor id '" + id + "'");
    ActorState st;
    st.id = id;
    if (a.contains("obstacle_kind")) {
      const std::string ok = r.str(a.at("obstacle_kind"));
      auto it = obstacle_kinds().find(ok);
      if (it == obstacle_kinds().end()) throw ConfigError("unknown obstacle_kind '" + ok + "'");
      st.kind = it->second.kind;
      st.half_length = it->second.half_length;
      st.half_width = it->second.half_width;
      st.attributes = it->second.attributes;
      st.attributes["obstacle_kind_code"] = static_cast<double>(std::distance(obstacle_kinds().begin(), it));
    } else {
      st.kind = json(r.str(a.at("kind"))).get<ActorKind>();
      std::tie(st.half_length, st.half_width) = default_extents(st.kind);
    }
    if (a.contains("size")) {
      st.half_length = r.num(a.at("size").at(0));
      st.half_width = r.num(a.at("size").at(1));
    }
    st.behavior_tag = a.contains("behavior") ? r.str(a.at("behavior")) : "idle";
    if (st.kind != ActorKind::static_obstacle && !is_known_behavior(st.behavior_tag)) {
      throw ConfigError("actor '" + id + "': unknown behavior '" + st.behavior_tag + "'");
    }
    st.speed = r.num_or(a, "speed", 0.0);
    const json attributes = a.value("attributes", json::object());
    for (const auto& [k, v] : attributes.items()) st.attributes[k] = r.num(v);
    st.path = a.contains("path") ? r.str(a.at("path")) : "ref";
    if (!world.paths.count(st.path)) throw ConfigError("actor '" + id + "': unknown path '" + st.path + "'");
    st.direction = a.contains("direction") ? static_cast<int>(r.num(a.at("direction"))) : 1;
    if (st.direction != 1 && st.direction != -1) throw ConfigError("actor '" + id + "': direction must be 1 or -1");
    double s = r.num_or(a, "s", 0.0);
    const double jitter = r.num_or(a, "s_jitter", 0.0);
    if (jitter > 0.0) s += CounterRng(seed, id, 0).uniform(-jitter, jitter);
    const double d = r.num_or(a, "d", 0.0);
    const double heading_rel = r.num_or(a, "heading", 0.0) * std::numbers::pi / 180.0;
    st.path_s = s;
    st.lateral = d;
    const Polyline& path = world.paths.at(st.path);
    const Pose2D p = path.offset_at(s, d);
    st.pose = make_pose(p.x, p.y, p.heading + (st.direction < 0 ? std::numbers::pi : 0.0) + heading_rel);
    if (a.contains("script")) {
      std::vector<ScriptKey> keys;
      for (const auto& k : a.at("script")) {
        const Pose2D kp = path.offset_at(r.num(k.at(1)), r.num(k.at(2)));
        keys.push_back({r.ticks(k.at(0)),
                        make_pose(kp.x, kp.y, kp.heading + r.num(k.at(3)) * std::numbers::pi / 180.0)});
      }
      attach_script(st, keys);
      st.pose = keys.front().pose;
    }
    const std::string spawn = a.value("spawn", std::string("initial"));
    if (spawn == "initial") {
      world.actors.push_back(st);
    } else if (spawn == "trigger") {
      ReservedActor res{st, a.value("anchor", std::string()) == "ego", s, d, heading_rel};
      program->reserve[id] = res;
    } else {
      throw ConfigError("actor '" + id + "': unknown spawn mode '" + spawn + "'");
    }
  }

  // Infrastructure.
  std::set<std::string> element_ids;
  for (const auto& e : body.value("infrastructure", json::array())) {
    InfrastructureElement el;
    el.id = r.str(e.at("id"));
    if (!element_ids.insert(el.id).second) throw ConfigError("duplicate element id '" + el.id + "'");
    el.kind = json(r.str(e.at("kind"))).get<InfraKind>();
    const auto& rect = e.at("rect");
    el.geometry = detail::rect_polygon(ref, r.num(rect.at(0)), r.num(rect.at(1)), r.num(rect.at(2)), r.num(rect.at(3)));
    if (!polygon_is_simple(el.geometry)) throw ConfigError("element '" + el.id + "' polygon is not simple");
    const json params = e.value("params", json::object());
    for (const auto& [k, v] : params.items()) el.params[k] = r.num(v);
    if (el.kind == InfraKind::traffic_light) {
      for (const auto& span : e.at("cycle")) {
        el.cycle.push_back({json(r.str(span.at(0))).get<LightPhase>(), r.ticks(span.at(1))});
      }
      el.cycle_offset = e.contains("cycle_offset") ? r.ticks(e.at("cycle_offset")) : 0;
      el = traffic_light_update(el, 0);
    }
    program->zones[el.id] = el.geometry;
    world.infrastructure.push_back(std::move(el));
  }

  // Phases and triggers.
  program->phases = body.value("phases", std::vector<std::string>{"main"});
  if (program->phases.empty()) throw ConfigError("template '" + tpl.template_id + "' declares no phases");
  const auto known_phase = [&](const std::string& p) {
    return std::find(program->phases.begin(), program->phases.end(), p) != program->phases.end();
  };
  std::set<std::string> trigger_ids;
  for (const auto& t : body.value("triggers", json::array())) {
    Trigger trig;
    trig.id = r.str(t.at("id"));
    if (!trigger_ids.insert(trig.id).second) throw ConfigError("duplicate trigger id '" + trig.id + "'");
    if (t.contains("from")) trig.from_phase = r.str(t.at("from"));
    if (t.contains("to")) trig.to_phase = r.str(t.at("to"));
    if (trig.from_phase && !known_phase(*trig.from_phase)) throw ConfigError("trigger '" + trig.id + "': unknown phase");
    if (trig.to_phase && !known_phase(*trig.to_phase)) throw ConfigError("trigger '" + trig.id + "': unknown phase");
    trig.when = detail::parse_condition(t.at("when"), r);
    for (const auto& c : t.value("do", json::array())) {
      TriggerCommand cmd = detail::parse_command(c, r);
      if (cmd.kind == TriggerCommand::Kind::spawn && !program->reserve.count(cmd.id)) {
        throw ConfigError("trigger '" + trig.id + "' spawns '" + cmd.id + "', which is not a trigger-spawned actor");
      }
      if (cmd.kind == TriggerCommand::Kind::fail_light && !element_ids.count(cmd.id)) {
        throw ConfigError("trigger '" + trig.id + "' fails unknown light '" + cmd.id + "'");
      }
      if ((cmd.kind == TriggerCommand::Kind::despawn || cmd.kind == TriggerCommand::Kind::set_attribute ||
           cmd.kind == TriggerCommand::Kind::set_behavior) &&
          !ids.count(cmd.id)) {
        throw ConfigError("trigger '" + trig.id + "' references unknown actor '" + cmd.id + "'");
      }
      trig.commands.push_back(cmd);
    }
    program->triggers.push_back(std::move(trig));
  }

  // Shortcut completion.
  if (body.contains("success") && body.at("success").contains("shortcut")) {
    const auto& sc = body.at("success").at("shortcut");
    const double s0 = r.num(sc.at("segment_s").at(0));
    const double s1 = r.num(sc.at("segment_s").at(1));
    int first = -1, last = -1;
    for (std::size_t i = 0; i < stations.size(); ++i) {
      if (first < 0 && stations[i] >= s0) first = static_cast<int>(i);
      if (stations[i] <= s1) last = static_cast<int>(i);
    }
    if (first < 0 || last < first) throw ConfigError("shortcut segment does not cover any waypoint");
    route.rc_shortcut_segment = WaypointRange{first, last};
    program->shortcut_last_waypoint = last;
    if (sc.contains("phase")) {
      program->shortcut_phase = r.str(sc.at("phase"));
      if (!known_phase(*program->shortcut_phase)) throw ConfigError("shortcut: unknown phase");
    }
  }

  // Evaluation bindings.
  DetectorBindings& b = inst.bindings;
  const json det = body.value("detectors", json::object());
  for (const auto& name : det.value("armed", json::array())) b.armed.insert(event_type_from_string(r.str(name)));
  for (const auto& name : det.value("overrides", json::array())) b.overrides.insert(json(r.str(name)).get<OverrideKind>());
  if (det.contains("police_phase")) b.police_phase = r.str(det.at("police_phase"));
  if (det.contains("pullover_zone")) b.pullover_zone = r.str(det.at("pullover_zone"));
  if (det.contains("police_deadline_ticks")) b.police_deadline_ticks = r.ticks(det.at("police_deadline_ticks"));
  if (det.contains("emergency_grace_ticks")) b.emergency_grace_ticks = r.ticks(det.at("emergency_grace_ticks"));
  if (det.contains("slow_lead_patience_ticks")) b.slow_lead_patience_ticks = r.ticks(det.at("slow_lead_patience_ticks"));
  if (b.armed.count(EventType::POLICE_STOP_VIOLATION) && !element_ids.count(b.pullover_zone)) {
    throw ConfigError("police detector armed without a valid pullover_zone");
  }
  route.ethics_applicable = b.ethics_applicable();

  inst.program = program;
  validate_route(route);
  return inst;
}

inline ScenarioTemplate template_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("scenario template must be an object");
  if (!j.contains("schema_version") || !j.at("schema_version").is_number_integer()) {
    throw ConfigError("scenario template lacks an integer schema_version");
  }
  if (j.at("schema_version").get<int>() != kScenarioSchemaVersion) {
    throw ConfigError("unsupported scenario schema_version " + j.at("schema_version").dump());
  }
  static const std::set<std::string> known = {"schema_version", "template_id", "ability_id", "set_tag", "description",
                                              "parameters",     "variants",    "layout",     "paths",   "actors",
                                              "infrastructure", "phases",      "triggers",   "success", "detectors"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!known.count(it.key())) throw ConfigError("scenario template: unknown key '" + it.key() + "'");
  }
  ScenarioTemplate t;
  j.at("template_id").get_to(t.template_id);
  j.at("ability_id").get_to(t.ability_id);
  t.set_tag = parse_set_tag(j.at("set_tag"));
  t.description = j.value("description", std::string{});
  for (auto it = j.at("parameters").begin(); it != j.at("parameters").end(); ++it) {
    t.params.push_back(parse_param_spec(it.key(), it.value()));
  }
  for (const auto& p : t.params) validate_param(p, p.default_value);
  for (const auto& v : j.value("variants", json::array())) t.variants.push_back(v.get<ParamValues>());
  t.body = json::object();
  for (const auto& k : template_body_keys()) {
    if (j.contains(k)) t.body[k] = j.at(k);
  }
  if (!t.body.contains("layout")) throw ConfigError("scenario template lacks a layout");
  // Dry runs surface structural errors at load time rather than mid-episode.
  instantiate_scenario(t, {}, 0);
  for (const auto& v : t.variants) instantiate_scenario(t, v, 0);
  return t;
}

// ---------------------------------------------------------------------------
// Runtime

inline ScenarioRuntime start_runtime(const ScenarioInstance& inst) {
  ScenarioRuntime rt;
  rt.program = inst.program;
  rt.phase = inst.program->phases.front();
  return rt;
}

namespace detail {

inline bool evaluate(const Condition& c, const ScenarioRuntime& rt, const WorldState& world) {
  using K = Condition::Kind;
  const ScenarioProgram& prog = *rt.program;
  switch (c.kind) {
    case K::ego_s_ge:
      return prog.reference.project(world.ego.pose.position()).s >= c.value;
    case K::ego_within: {
      const ActorState* a = world.find_actor(c.target);
      return a && norm(a->pose.position() - world.ego.pose.position()) <= c.value;
    }
    case K::ego_stopped_in: {
      auto it = rt.stopped_run.find(c.target);
      return it != rt.stopped_run.end() && static_cast<double>(it->second) >= c.value;
    }
    case K::tick_ge:
      return static_cast<double>(world.tick) >= c.value;
    case K::phase_ticks_ge:
      return static_cast<double>(world.tick - rt.phase_entered_tick) >= c.value;
    case K::actor_behind_ego: {
      const ActorState* a = world.find_actor(c.target);
      if (!a) return false;
      return prog.reference.project(a->pose.position()).s < prog.reference.project(world.ego.pose.position()).s;
    }
    case K::all_of:
      return std::all_of(c.children.begin(), c.children.end(),
                         [&](const Condition& ch) { return evaluate(ch, rt, world); });
    case K::any_of:
      return std::any_of(c.children.begin(), c.children.end(),
                         [&](const Condition& ch) { return evaluate(ch, rt, world); });
  }
  return false;
}

inline void collect_stop_zones(const Condition& c, std::set<std::string>& out) {
  if (c.kind == Condition::Kind::ego_stopped_in) out.insert(c.target);
  for (const auto& ch : c.children) collect_stop_zones(ch, out);
}

}  // namespace detail

/// Advances the waypoint cursor on `world` and latches shortcut success.
inline void update_progress(ScenarioRuntime& rt, const WorldState& world, const RouteSpec& route) {
  const ScenarioProgram& prog = *rt.program;
  rt.waypoint_cursor = waypoint_pass_check(world.ego, route, rt.waypoint_cursor);
  if (prog.shortcut_last_waypoint && rt.waypoint_cursor > *prog.shortcut_last_waypoint &&
      (!prog.shortcut_phase || *prog.shortcut_phase == rt.phase)) {
    rt.success = true;
  }
}

struct ScenarioTickResult {
  std::vector<ScenarioCommand> commands;
  std::vector<std::string> fired;
  ScenarioStatus status = ScenarioStatus::running;
};

/// Evaluates triggers against `world` and returns the commands for the next step.
/// Each trigger fires at most once; triggers are evaluated in declaration order.
inline ScenarioTickResult scenario_tick(ScenarioRuntime& rt, const WorldState& world, const RouteSpec& route,
                                        double stopped_speed = 0.1) {
  ScenarioTickResult out;
  const ScenarioProgram& prog = *rt.program;

  std::set<std::string> zones;
  for (const auto& t : prog.triggers) detail::collect_stop_zones(t.when, zones);
  for (const auto& z : zones) {
    auto it = prog.zones.find(z);
    const bool inside = it != prog.zones.end() && world.ego.speed < stopped_speed &&
                        point_in_polygon(world.ego.pose.position(), it->second);
    if (inside) {
      ++rt.stopped_run[z];
    } else {
      rt.stopped_run.erase(z);
    }
  }

  for (const auto& t : prog.triggers) {
    if (rt.fired.count(t.id)) continue;
    if (t.from_phase && *t.from_phase != rt.phase) continue;
    if (!detail::evaluate(t.when, rt, world)) continue;
    rt.fired.insert(t.id);
    rt.trigger_log.push_back({world.tick, t.id});
    out.fired.push_back(t.id);
    for (const auto& c : t.commands) {
      using K = TriggerCommand::Kind;
      switch (c.kind) {
        case K::spawn: {
          ReservedActor res = prog.reserve.at(c.id);
          if (res.ego_anchored) {
            const Polyline& path = world.paths.at(res.state.path);
            const double ego_s = path.project(world.ego.pose.position()).s;
            res.state.path_s = ego_s + res.s;
            const Pose2D p = path.offset_at(res.state.path_s, res.d);
            res.state.pose = make_pose(p.x, p.y,
                                       p.heading + (res.state.direction < 0 ? std::numbers::pi : 0.0) + res.heading_rel);
          }
          rt.spawned_actor_ids.push_back(c.id);
          out.commands.push_back(SpawnActor{res.state});
          break;
        }
        case K::despawn: out.commands.push_back(DespawnActor{c.id}); break;
        case K::set_attribute: out.commands.push_back(SetActorAttribute{c.id, c.key, c.value}); break;
        case K::set_behavior: out.commands.push_back(SetActorBehavior{c.id, c.key}); break;
        case K::inject_fault: out.commands.push_back(InjectFault{fault_from_name(c.key)}); break;
        case K::fail_light: out.commands.push_back(FailLight{c.id}); break;
      }
    }
    if (t.to_phase && *t.to_phase != rt.phase) {
      rt.phase = *t.to_phase;
      rt.phase_entered_tick = world.tick;
    }
  }

  if (rt.success) {
    out.status = ScenarioStatus::success;
  } else if (world.tick >= route.timeout_ticks) {
    out.status = ScenarioStatus::timeout_pending;
  }
  return out;
}

}  // namespace roadjudge
