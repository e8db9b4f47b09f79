#pragma once

#include <string>
#include <vector>

#include "roadjudge/catalog.hpp"
#include "roadjudge/detectors.hpp"
#include "roadjudge/harness.hpp"
#include "roadjudge/scenario.hpp"
#include "roadjudge/suite.hpp"

namespace rjtest {

using namespace roadjudge;

/// Straight route along +x from 0 to `length`, waypoints every 5 m, corridor |y| <= half_width.
inline RouteSpec straight_route(double length = 150.0, double half_width = 1.75, const std::string& id = "straight") {
  RouteSpec r;
  r.route_id = id;
  r.ability_id = "test_ability";
  for (double x = 0.0; x <= length + 1e-9; x += 5.0) r.waypoints.push_back({x, 0.0, 0.0});
  r.lane_corridor = {{{-10.0, -half_width}, {length + 10.0, -half_width}, {length + 10.0, half_width}, {-10.0, half_width}}};
  r.length = length;
  r.timeout_ticks = 100000;
  r.speed_limit = 10.0;
  return r;
}

inline Polygon rect(double x0, double x1, double y0, double y1) { return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}; }

inline InfrastructureElement element(const std::string& id, InfraKind kind, const Polygon& geometry) {
  InfrastructureElement e;
  e.id = id;
  e.kind = kind;
  e.geometry = geometry;
  return e;
}

inline ActorState actor(const std::string& id, ActorKind kind, double x, double y, double heading = 0.0,
                        double speed = 0.0) {
  ActorState a;
  a.id = id;
  a.kind = kind;
  a.pose = {x, y, heading};
  a.speed = speed;
  if (kind == ActorKind::pedestrian) {
    a.half_length = 0.3;
    a.half_width = 0.3;
  }
  return a;
}

inline TickFrame frame(std::int64_t tick, double x, double y = 0.0, double speed = 5.0, ControlCommand cmd = {}) {
  TickFrame f;
  f.tick = tick;
  f.command = cmd;
  f.ego.pose = {x, y, 0.0};
  f.ego.speed = speed;
  return f;
}

inline DetectionContext context(RouteSpec route = straight_route(), std::vector<InfrastructureElement> infra = {},
                                DetectorBindings bindings = {}) {
  return {std::move(route), std::move(infra), std::move(bindings), {}};
}

/// Runs frames through a fresh detector and returns every event, finish() included.
inline std::vector<InfractionEvent> detect_all(const DetectionContext& ctx, const std::vector<TickFrame>& frames) {
  EpisodeDetector d(ctx);
  std::vector<InfractionEvent> out;
  for (const auto& f : frames) {
    for (auto& e : d.on_tick(f)) out.push_back(std::move(e));
  }
  for (auto& e : d.finish()) out.push_back(std::move(e));
  return out;
}

inline std::size_t count_type(const std::vector<InfractionEvent>& events, EventType t) {
  std::size_t n = 0;
  for (const auto& e : events) n += e.event_type == t ? 1 : 0;
  return n;
}

/// A plain template with only a straight road; `extra` keys are merged into the body.
inline ScenarioTemplate plain_template(double length = 150.0, const json& extra = json::object()) {
  json j = {{"schema_version", 1},
            {"template_id", "plain_straight"},
            {"ability_id", "reasonable_speed_keeping"},
            {"set_tag", "Basic"},
            {"parameters", json::object()},
            {"layout", {{"pieces", json::array({{{"straight", length}}})}}}};
  for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
  return template_from_json(j);
}

inline ScenarioInstance builtin_instance(const std::string& template_id, std::size_t variant = 0,
                                         std::uint64_t seed = 7) {
  const ScenarioTemplate* t = find_template(builtin_templates(), template_id);
  if (!t) throw std::runtime_error("no template " + template_id);
  const ParamValues v = t->variants.empty() ? ParamValues{} : t->variants.at(variant);
  return instantiate_scenario(*t, v, seed, template_id + "_v" + std::to_string(variant));
}

}  // namespace rjtest
