#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "roadjudge/geometry.hpp"
#include "roadjudge/rng.hpp"
#include "roadjudge/world.hpp"

namespace roadjudge {

struct EngineConfig {
  double dt = 0.05;
  double max_steer = 0.6;
  double max_accel = 3.0;
  double max_brake_decel = 8.0;
  double wheelbase = 2.8;
  double max_speed = 20.0;
  std::uint64_t seed = 0;

  friend bool operator==(const EngineConfig&, const EngineConfig&) = default;
};

inline void validate(const EngineConfig& cfg) {
  if (!(cfg.dt > 0.0)) throw ConfigError("engine: dt must be > 0");
  if (!(cfg.max_steer > 0.0) || !(cfg.max_accel > 0.0) || !(cfg.max_brake_decel > 0.0) ||
      !(cfg.wheelbase > 0.0) || !(cfg.max_speed > 0.0)) {
    throw ConfigError("engine: physical limits must be strictly positive");
  }
}

inline void to_json(json& j, const EngineConfig& c) {
  j = json{{"dt", c.dt},
           {"max_steer", c.max_steer},
           {"max_accel", c.max_accel},
           {"max_brake_decel", c.max_brake_decel},
           {"wheelbase", c.wheelbase},
           {"max_speed", c.max_speed},
           {"seed", c.seed}};
}
inline void from_json(const json& j, EngineConfig& c) {
  const EngineConfig d;
  c.dt = j.value("dt", d.dt);
  c.max_steer = j.value("max_steer", d.max_steer);
  c.max_accel = j.value("max_accel", d.max_accel);
  c.max_brake_decel = j.value("max_brake_decel", d.max_brake_decel);
  c.wheelbase = j.value("wheelbase", d.wheelbase);
  c.max_speed = j.value("max_speed", d.max_speed);
  c.seed = j.value("seed", d.seed);
}

struct CollisionContact {
  std::int64_t tick = 0;
  bool ego_involved = true;
  std::string other_id;
  ActorKind other_kind = ActorKind::vehicle;
  double relative_speed = 0.0;

  friend bool operator==(const CollisionContact&, const CollisionContact&) = default;
};

/// Raised when a step is fed commands that do not match the world.
class StepError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Ego kinematics

inline EgoState bicycle_step(const EgoState& state, ControlCommand cmd, const EngineConfig& cfg) {
  clamp_command(cmd);
  const bool brakes_work = !state.faults.contains(Fault::brake_failure);
  double accel = cmd.throttle * cfg.max_accel;
  if (brakes_work) {
    accel -= cmd.brake * cfg.max_brake_decel;
    if (cmd.hand_brake) accel = -cfg.max_brake_decel;
  }
  EgoState next = state;
  next.speed = std::clamp(state.speed + accel * cfg.dt, 0.0, cfg.max_speed);
  next.steer_angle = cmd.steer * cfg.max_steer;
  const double yaw_rate = next.speed / cfg.wheelbase * std::tan(next.steer_angle);
  const double dtheta = yaw_rate * cfg.dt;
  // Midpoint heading: second-order accurate along constant-steer arcs.
  const double mid = state.pose.heading + 0.5 * dtheta;
  next.pose.x = state.pose.x + next.speed * cfg.dt * std::cos(mid);
  next.pose.y = state.pose.y + next.speed * cfg.dt * std::sin(mid);
  next.pose.heading = normalize_angle(state.pose.heading + dtheta);
  return next;
}

// ---------------------------------------------------------------------------
// Collisions

inline Vec2 velocity_of(const Pose2D& pose, double speed) { return unit_from_heading(pose.heading) * speed; }

inline std::vector<CollisionContact> detect_collisions(const WorldState& world) {
  std::vector<CollisionContact> out;
  const OrientedBox ego_box = world.ego.footprint();
  const Vec2 ego_v = velocity_of(world.ego.pose, world.ego.speed);
  for (const auto& actor : world.actors) {
    if (!boxes_overlap(ego_box, actor.footprint())) continue;
    out.push_back({world.tick, true, actor.id, actor.kind, norm(ego_v - velocity_of(actor.pose, actor.speed))});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Traffic lights

inline InfrastructureElement traffic_light_update(InfrastructureElement element, std::int64_t tick) {
  if (element.kind != InfraKind::traffic_light) return element;
  if (element.phase == LightPhase::failed || element.cycle.empty()) return element;
  std::int64_t period = 0;
  for (const auto& span : element.cycle) period += std::max<std::int64_t>(span.ticks, 1);
  std::int64_t t = (tick + element.cycle_offset) % period;
  if (t < 0) t += period;
  for (const auto& span : element.cycle) {
    const std::int64_t len = std::max<std::int64_t>(span.ticks, 1);
    if (t < len) {
      element.phase = span.phase;
      break;
    }
    t -= len;
  }
  return element;
}

// ---------------------------------------------------------------------------
// Actor behaviors

namespace detail {

struct LeaderInfo {
  double gap = 1e9;
  double speed = 0.0;
  bool found = false;
};

/// Finds the nearest entity ahead of `self` inside its lane band along its path.
inline LeaderInfo find_leader(const ActorState& self, const Polyline& path, const WorldState& world,
                              double lookahead = 80.0) {
  LeaderInfo best;
  const Vec2 travel = unit_from_heading(self.pose.heading);
  const auto consider = [&](const Pose2D& pose, double speed, double hl, double hw) {
    if (norm(pose.position() - self.pose.position()) > lookahead + 10.0) return;
    const auto proj = path.project(pose.position());
    const double ds = (proj.s - self.path_s) * self.direction;
    if (ds <= 0.0) return;
    if (std::abs(proj.lateral - self.lateral) > self.half_width + hw + 0.3) return;
    const double gap = ds - self.half_length - hl;
    if (gap < best.gap) {
      best.gap = gap;
      best.speed = dot(velocity_of(pose, speed), travel);
      best.found = true;
    }
  };
  consider(world.ego.pose, world.ego.speed, world.ego.half_length, world.ego.half_width);
  for (const auto& other : world.actors) {
    if (other.id == self.id) continue;
    consider(other.pose, other.speed, other.half_length, other.half_width);
  }
  return best;
}

inline double idm_accel(double v, double v0, const LeaderInfo& lead, double a_max, double b, double headway,
                        double s0) {
  v0 = std::max(v0, 0.1);
  double acc = a_max * (1.0 - std::pow(v / v0, 4.0));
  if (lead.found) {
    const double dv = v - lead.speed;
    const double s_star = s0 + std::max(0.0, v * headway + v * dv / (2.0 * std::sqrt(a_max * b)));
    const double gap = std::max(lead.gap, 0.1);
    acc -= a_max * (s_star / gap) * (s_star / gap);
  }
  return std::clamp(acc, -8.0, a_max);
}

inline const Polyline& require_path(const ActorState& actor, const WorldState& world) {
  auto it = world.paths.find(actor.path);
  if (it == world.paths.end()) {
    throw StepError("actor '" + actor.id + "' references unknown path '" + actor.path + "'");
  }
  return it->second;
}

inline void place_on_path(ActorState& a, const Polyline& path, double heading_offset = 0.0) {
  const Pose2D p = path.offset_at(a.path_s, a.lateral);
  const double base = a.direction < 0 ? p.heading + std::numbers::pi : p.heading;
  a.pose = make_pose(p.x, p.y, base + heading_offset);
}

/// Gap-controlled longitudinal update along the actor's path.
inline ActorState path_follow(const ActorState& actor, const WorldState& world, const EngineConfig& cfg,
                              double default_target) {
  ActorState next = actor;
  const Polyline& path = require_path(actor, world);
  const LeaderInfo lead = find_leader(actor, path, world);
  const double standstill = actor.attr("standstill", 2.0);
  const double acc = idm_accel(actor.speed, actor.attr("target_speed", default_target), lead,
                               actor.attr("accel", 1.5), actor.attr("comfort_decel", 2.0),
                               actor.attr("headway", 1.5), standstill);
  next.speed = std::max(0.0, actor.speed + acc * cfg.dt);
  if (lead.found) {
    // Never close the gap below the standstill distance within one step.
    const double room = lead.gap + std::max(lead.speed, 0.0) * cfg.dt - standstill;
    next.speed = std::min(next.speed, std::max(room, 0.0) / cfg.dt);
  }
  next.path_s = actor.path_s + actor.direction * next.speed * cfg.dt;
  place_on_path(next, path);
  return next;
}

inline double ego_path_s(const Polyline& path, const WorldState& world) {
  return path.project(world.ego.pose.position()).s;
}

}  // namespace detail

using BehaviorFn = std::function<ActorState(const ActorState&, const WorldState&, const EngineConfig&)>;

inline ActorState behavior_idle(const ActorState& actor, const WorldState&, const EngineConfig&) {
  ActorState next = actor;
  next.speed = 0.0;
  return next;
}

inline ActorState behavior_lane_follow(const ActorState& actor, const WorldState& world, const EngineConfig& cfg) {
  return detail::path_follow(actor, world, cfg, 8.0);
}

/// Pose playback from keys stored on the actor (see attach_script); holds the last key.
inline ActorState behavior_scripted_trajectory(const ActorState& actor, const WorldState& world,
                                               const EngineConfig& cfg);

inline ActorState behavior_cut_in(const ActorState& actor, const WorldState& world, const EngineConfig& cfg) {
  ActorState next = actor;
  const Polyline& path = detail::require_path(actor, world);
  const double ego_s = detail::ego_path_s(path, world);
  const double ahead = (actor.path_s - ego_s) * actor.direction;
  bool cutting = actor.flag("cutting");
  if (!cutting) {
    const double trigger_within = actor.attr("trigger_ego_within", 0.0);
    if (trigger_within > 0.0) {
      cutting = ahead > 0.0 && ahead <= trigger_within;
    } else {
      cutting = ahead >= actor.attr("cut_in_gap", 10.0);
    }
  }
  next.attributes["cutting"] = cutting ? 1.0 : 0.0;
  const double target_speed =
      cutting ? actor.attr("target_speed_after", actor.attr("target_speed", 8.0)) : actor.attr("target_speed", 8.0);
  // Lateral motion first, so the leader search sees the lane being entered.
  double lat_rate = 0.0;
  if (cutting) {
    const double goal = actor.attr("cut_in_to", 0.0);
    const double step = actor.attr("lateral_rate", 1.5) * cfg.dt;
    const double delta = std::clamp(goal - actor.lateral, -step, step);
    next.lateral = actor.lateral + delta;
    lat_rate = delta / cfg.dt;
  }
  const detail::LeaderInfo lead = detail::find_leader(next, path, world);
  const double acc = detail::idm_accel(actor.speed, target_speed, lead, actor.attr("accel", 2.0),
                                       actor.attr("comfort_decel", 3.0), actor.attr("headway", 1.0),
                                       actor.attr("standstill", 2.0));
  next.speed = std::max(0.0, actor.speed + acc * cfg.dt);
  next.path_s = actor.path_s + actor.direction * next.speed * cfg.dt;
  const double heading_offset =
      next.speed > 0.1 ? std::atan2(lat_rate * actor.direction, next.speed) : 0.0;
  detail::place_on_path(next, path, heading_offset);
  return next;
}

inline ActorState behavior_wrong_way(const ActorState& actor, const WorldState& world, const EngineConfig& cfg) {
  ActorState next = actor;
  const Polyline& path = detail::require_path(actor, world);
  next.attributes["wrong_way"] = 1.0;
  next.speed = actor.attr("target_speed", actor.speed);
  next.path_s = actor.path_s + actor.direction * next.speed * cfg.dt;
  detail::place_on_path(next, path);
  return next;
}

inline ActorState behavior_weaving(const ActorState& actor, const WorldState& world, const EngineConfig& cfg) {
  ActorState next = detail::path_follow(actor, world, cfg, 7.0);
  next.attributes["weaving"] = 1.0;
  const double t = static_cast<double>(world.tick + 1) * cfg.dt;
  const double period = std::max(actor.attr("weave_period", 4.0), 0.5);
  CounterRng rng(world.rng_stream, actor.id, world.tick);
  const double jitter = rng.uniform(-0.05, 0.05);
  next.lateral = actor.attr("weave_center", 0.0) +
                 actor.attr("weave_amplitude", 0.8) * std::sin(2.0 * std::numbers::pi * t / period) + jitter;
  detail::place_on_path(next, detail::require_path(actor, world));
  return next;
}

inline ActorState behavior_pedestrian_cross(const ActorState& actor, const WorldState& world, const EngineConfig& cfg) {
  ActorState next = actor;
  bool active = actor.flag("active");
  const double trigger = actor.attr("trigger_ego_within", 0.0);
  if (!active && trigger > 0.0 && norm(world.ego.pose.position() - actor.pose.position()) <= trigger) {
    active = true;
  }
  next.attributes["active"] = active ? 1.0 : 0.0;
  const double walked = actor.attr("walked", 0.0);
  const double limit = actor.attr("walk_distance", 8.0);
  if (!active || walked >= limit) {
    next.speed = 0.0;
    return next;
  }
  const double v = actor.attr("target_speed", 1.4);
  const double step = std::min(v * cfg.dt, limit - walked);
  next.speed = v;
  const Vec2 dir = unit_from_heading(actor.pose.heading);
  next.pose.x += dir.x * step;
  next.pose.y += dir.y * step;
  next.attributes["walked"] = walked + step;
  if (walked + step >= limit) next.speed = 0.0;
  return next;
}

inline ActorState behavior_emergency_approach(const ActorState& actor, const WorldState& world,
                                              const EngineConfig& cfg) {
  ActorState next = detail::path_follow(actor, world, cfg, 14.0);
  next.attributes["emergency"] = 1.0;
  return next;
}

inline ActorState behavior_police_intercept(const ActorState& actor, const WorldState& world,
                                            const EngineConfig& cfg) {
  ActorState next = detail::path_follow(actor, world, cfg, 16.0);
  next.attributes["police"] = 1.0;
  return next;
}

inline ActorState behavior_door_open_when_ego_near(const ActorState& actor, const WorldState& world,
                                                   const EngineConfig&) {
  ActorState next = actor;
  next.speed = 0.0;
  if (!actor.flag("door_open") &&
      norm(world.ego.pose.position() - actor.pose.position()) <= actor.attr("trigger_distance", 20.0)) {
    next.attributes["door_open"] = 1.0;
  }
  return next;
}

inline const std::map<std::string, BehaviorFn>& behavior_registry() {
  static const std::map<std::string, BehaviorFn> registry = {
      {"idle", behavior_idle},
      {"lane_follow", behavior_lane_follow},
      {"scripted_trajectory", behavior_scripted_trajectory},
      {"cut_in", behavior_cut_in},
      {"wrong_way", behavior_wrong_way},
      {"weaving", behavior_weaving},
      {"pedestrian_cross", behavior_pedestrian_cross},
      {"emergency_approach", behavior_emergency_approach},
      {"police_intercept", behavior_police_intercept},
      {"door_open_when_ego_near", behavior_door_open_when_ego_near},
  };
  return registry;
}

inline bool is_known_behavior(const std::string& tag) { return behavior_registry().count(tag) != 0; }

inline ActorState actor_behavior_update(const ActorState& actor, const WorldState& world, const EngineConfig& cfg) {
  if (actor.kind == ActorKind::static_obstacle) {
    ActorState next = actor;
    next.speed = 0.0;
    return next;
  }
  auto it = behavior_registry().find(actor.behavior_tag);
  if (it == behavior_registry().end()) {
    throw StepError("actor '" + actor.id + "' has unknown behavior '" + actor.behavior_tag + "'");
  }
  return it->second(actor, world, cfg);
}

// ---------------------------------------------------------------------------
// Scripted trajectories. Keys ride on the actor's attribute map so the actor stays
// a self-contained value and replays carry the script.

struct ScriptKey {
  std::int64_t tick = 0;
  Pose2D pose;
  friend bool operator==(const ScriptKey&, const ScriptKey&) = default;
};

inline void to_json(json& j, const ScriptKey& k) { j = json::array({k.tick, k.pose}); }
inline void from_json(const json& j, ScriptKey& k) {
  j.at(0).get_to(k.tick);
  j.at(1).get_to(k.pose);
}

/// Stores keys as "key<i>_t", "key<i>_x", "key<i>_y", "key<i>_h" attributes.
inline void attach_script(ActorState& actor, const std::vector<ScriptKey>& keys) {
  actor.attributes["script_keys"] = static_cast<double>(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const std::string p = "key" + std::to_string(i) + "_";
    actor.attributes[p + "t"] = static_cast<double>(keys[i].tick);
    actor.attributes[p + "x"] = keys[i].pose.x;
    actor.attributes[p + "y"] = keys[i].pose.y;
    actor.attributes[p + "h"] = keys[i].pose.heading;
  }
}

inline std::vector<ScriptKey> script_of(const ActorState& actor) {
  std::vector<ScriptKey> keys;
  const auto n = static_cast<std::size_t>(actor.attr("script_keys", 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    const std::string p = "key" + std::to_string(i) + "_";
    keys.push_back({static_cast<std::int64_t>(actor.attr(p + "t")),
                    {actor.attr(p + "x"), actor.attr(p + "y"), actor.attr(p + "h")}});
  }
  return keys;
}

/// Pose of a script at `tick`: linear interpolation between keys, clamped at both ends.
inline Pose2D script_pose_at(const std::vector<ScriptKey>& keys, std::int64_t tick) {
  if (keys.empty()) return {};
  if (tick <= keys.front().tick) return keys.front().pose;
  for (std::size_t i = 0; i + 1 < keys.size(); ++i) {
    const auto& a = keys[i];
    const auto& b = keys[i + 1];
    if (tick <= b.tick) {
      const double t = b.tick == a.tick ? 1.0 : static_cast<double>(tick - a.tick) / static_cast<double>(b.tick - a.tick);
      const double dh = normalize_angle(b.pose.heading - a.pose.heading);
      return make_pose(a.pose.x + (b.pose.x - a.pose.x) * t, a.pose.y + (b.pose.y - a.pose.y) * t,
                       a.pose.heading + dh * t);
    }
  }
  return keys.back().pose;
}

inline ActorState behavior_scripted_trajectory(const ActorState& actor, const WorldState& world,
                                               const EngineConfig& cfg) {
  ActorState next = actor;
  const auto keys = script_of(actor);
  const Pose2D p = script_pose_at(keys, world.tick + 1);
  next.speed = norm(p.position() - actor.pose.position()) / cfg.dt;
  next.pose = p;
  return next;
}

// ---------------------------------------------------------------------------
// Scenario commands and the fixed-order step

struct SpawnActor {
  ActorState actor;
};
struct DespawnActor {
  std::string id;
};
struct SetActorAttribute {
  std::string id;
  std::string key;
  double value = 0.0;
};
struct SetActorBehavior {
  std::string id;
  std::string behavior;
};
struct InjectFault {
  Fault fault = Fault::brake_failure;
};
struct FailLight {
  std::string element_id;
};

using ScenarioCommand =
    std::variant<SpawnActor, DespawnActor, SetActorAttribute, SetActorBehavior, InjectFault, FailLight>;

struct StepResult {
  WorldState world;
  std::vector<CollisionContact> contacts;
};

inline void apply_scenario_command(WorldState& world, const ScenarioCommand& command) {
  std::visit(
      [&world](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, SpawnActor>) {
          if (world.find_actor(c.actor.id)) throw StepError("spawn of duplicate actor id '" + c.actor.id + "'");
          if (c.actor.kind != ActorKind::static_obstacle && !is_known_behavior(c.actor.behavior_tag)) {
            throw StepError("spawn of actor '" + c.actor.id + "' with unknown behavior");
          }
          world.actors.push_back(c.actor);
        } else if constexpr (std::is_same_v<T, DespawnActor>) {
          auto it = std::find_if(world.actors.begin(), world.actors.end(),
                                 [&](const ActorState& a) { return a.id == c.id; });
          if (it == world.actors.end()) throw StepError("despawn of unknown actor id '" + c.id + "'");
          world.actors.erase(it);
        } else if constexpr (std::is_same_v<T, SetActorAttribute>) {
          ActorState* a = world.find_actor(c.id);
          if (!a) throw StepError("attribute change for unknown actor id '" + c.id + "'");
          a->attributes[c.key] = c.value;
        } else if constexpr (std::is_same_v<T, SetActorBehavior>) {
          ActorState* a = world.find_actor(c.id);
          if (!a) throw StepError("behavior change for unknown actor id '" + c.id + "'");
          if (!is_known_behavior(c.behavior)) throw StepError("unknown behavior '" + c.behavior + "'");
          a->behavior_tag = c.behavior;
        } else if constexpr (std::is_same_v<T, InjectFault>) {
          world.ego.faults.insert(c.fault);
        } else if constexpr (std::is_same_v<T, FailLight>) {
          for (auto& e : world.infrastructure) {
            if (e.id == c.element_id && e.kind == InfraKind::traffic_light) {
              e.phase = LightPhase::failed;
              return;
            }
          }
          throw StepError("light failure for unknown element '" + c.element_id + "'");
        }
      },
      command);
}

/// One engine tick: spawns, actor behaviors, ego kinematics, infrastructure, collisions.
inline StepResult step(const WorldState& world, const ControlCommand& cmd,
                       const std::vector<ScenarioCommand>& scenario_commands, const EngineConfig& cfg) {
  StepResult result{world, {}};
  WorldState& next = result.world;

  for (const auto& c : scenario_commands) apply_scenario_command(next, c);

  // Every actor reads the same snapshot, so update order cannot matter.
  const WorldState snapshot = next;
  for (std::size_t i = 0; i < next.actors.size(); ++i) {
    next.actors[i] = actor_behavior_update(snapshot.actors[i], snapshot, cfg);
  }

  next.ego = bicycle_step(snapshot.ego, cmd, cfg);
  next.tick = world.tick + 1;

  for (auto& e : next.infrastructure) e = traffic_light_update(std::move(e), next.tick);

  result.contacts = detect_collisions(next);
  return result;
}

}  // namespace roadjudge
