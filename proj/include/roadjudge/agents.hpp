#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "roadjudge/observation.hpp"
#include "roadjudge/rng.hpp"

namespace roadjudge {

enum class AgentKind { builtin, external };

NLOHMANN_JSON_SERIALIZE_ENUM(AgentKind, {{AgentKind::builtin, "builtin"}, {AgentKind::external, "external"}})

struct AgentDescriptor {
  std::string name;
  AgentKind kind = AgentKind::builtin;
  int protocol_version = 0;  // external only
  friend bool operator==(const AgentDescriptor&, const AgentDescriptor&) = default;
};

inline void to_json(json& j, const AgentDescriptor& d) {
  j = json{{"name", d.name}, {"kind", d.kind}};
  if (d.kind == AgentKind::external) j["protocol_version"] = d.protocol_version;
}
inline void from_json(const json& j, AgentDescriptor& d) {
  j.at("name").get_to(d.name);
  j.at("kind").get_to(d.kind);
  d.protocol_version = j.value("protocol_version", 0);
}

/// Raised by an agent that can no longer produce actions; the episode becomes invalid.
class AgentFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EpisodeStart {
  std::string route_id;
  std::uint64_t seed = 0;
};

struct EpisodeEnd {
  std::string termination;
  json record;
};

class Agent {
 public:
  virtual ~Agent() = default;
  virtual AgentDescriptor descriptor() const = 0;
  virtual void begin(const EpisodeStart&) {}
  virtual ControlCommand act(const Observation& obs) = 0;
  virtual void end(const EpisodeEnd&) {}
};

// ---------------------------------------------------------------------------
// Constant and random policies

class RecklessAgent final : public Agent {
 public:
  AgentDescriptor descriptor() const override { return {"reckless", AgentKind::builtin, 0}; }
  ControlCommand act(const Observation&) override { return {1.0, 0.0, 0.0, false}; }
};

/// Uniform random controls keyed on (seed, tick); throttle-biased so episodes cover ground.
class RandomAgent final : public Agent {
 public:
  AgentDescriptor descriptor() const override { return {"random", AgentKind::builtin, 0}; }
  void begin(const EpisodeStart& start) override { seed_ = start.seed; }
  ControlCommand act(const Observation& obs) override {
    CounterRng rng(seed_, "random_agent", obs.tick);
    ControlCommand c;
    c.throttle = rng.uniform();
    c.steer = rng.uniform(-1.0, 1.0);
    c.brake = rng.uniform() < 0.8 ? 0.0 : rng.uniform();
    c.hand_brake = rng.uniform() < 0.01;
    return c;
  }

 private:
  std::uint64_t seed_ = 0;
};

// ---------------------------------------------------------------------------
// Rule-based driver

struct RuleStyle {
  std::string name;
  bool ethics_aware = true;
  double speed_factor = 1.0;
  bool leaves_lane_to_pass = true;  // false: waits behind anything it cannot pass inside its own lane
};

class RuleBasedAgent final : public Agent {
 public:
  static constexpr double kWheelbase = 2.8;
  static constexpr double kMaxSteer = 0.6;
  static constexpr double kMaxAccel = 3.0;
  static constexpr double kMaxBrake = 8.0;
  static constexpr double kEgoHalfLength = 2.3;
  static constexpr double kEgoHalfWidth = 0.95;

  explicit RuleBasedAgent(RuleStyle style) : style_(std::move(style)) {}

  AgentDescriptor descriptor() const override { return {style_.name, AgentKind::builtin, 0}; }

  void begin(const EpisodeStart&) override {
    bias_ = 0.0;
    stop_wait_ = 0;
    stop_served_ = false;
    yielding_emergency_ = false;
  }

  ControlCommand act(const Observation& obs) override;

 private:
  struct Track {
    const ObservedActor* actor = nullptr;
    double ds = 0.0;      // along the local path, relative to the ego
    double lat = 0.0;     // left of the path positive
    double v_along = 0.0;
    double v_lat = 0.0;
    double ext_s = 0.0;   // half extent along the path
    double ext_l = 0.0;   // half extent across the path
  };

  struct Plan {
    Polyline path;
    double s0 = 0.0;
    std::vector<double> preview_s;
    const Observation* obs = nullptr;
  };

  static bool is_blocker_kind(const ObservedActor& a) {
    return a.kind == ActorKind::static_obstacle || a.attributes.count("parked") || a.attributes.count("hazard_lights") ||
           a.attributes.count("accident") || a.attributes.count("unknown_object");
  }

  static Plan build_plan(const Observation& obs);
  static std::vector<Track> build_tracks(const Observation& obs, const Plan& plan);
  static std::pair<double, double> free_at(const Plan& plan, double ds);

  bool in_band(const Track& t, double lateral, double margin = 0.35) const {
    return std::abs(t.lat - lateral) < t.ext_l + kEgoHalfWidth + margin;
  }

  RuleStyle style_;
  double bias_ = 0.0;
  int stop_wait_ = 0;
  bool stop_served_ = false;
  bool yielding_emergency_ = false;
};

inline RuleBasedAgent::Plan RuleBasedAgent::build_plan(const Observation& obs) {
  Plan plan;
  plan.obs = &obs;
  std::vector<Vec2> pts;
  const auto& pv = obs.route_preview;
  if (obs.previous_waypoint) {
    pts.push_back(*obs.previous_waypoint);
  } else if (!pv.empty()) {
    const Vec2 first = pv.front().position;
    const Vec2 next = pv.size() > 1 ? pv[1].position : first + Vec2{1.0, 0.0};
    const Vec2 dir = norm(next - first) > 1e-9 ? (next - first) * (1.0 / norm(next - first)) : Vec2{1.0, 0.0};
    pts.push_back(first - dir * 10.0);
  }
  for (const auto& p : pv) {
    if (pts.empty() || norm(p.position - pts.back()) > 1e-6) pts.push_back(p.position);
  }
  if (pts.size() < 2) pts.push_back(pts.empty() ? Vec2{1.0, 0.0} : pts.back() + Vec2{1.0, 0.0});
  if (pts.empty()) pts.insert(pts.begin(), Vec2{0.0, 0.0});
  const Vec2 tail = pts.back() - pts[pts.size() - 2];
  pts.push_back(pts.back() + tail * (30.0 / std::max(norm(tail), 1e-9)));
  const Vec2 head = pts[1] - pts[0];
  pts.insert(pts.begin(), pts.front() - head * (10.0 / std::max(norm(head), 1e-9)));
  plan.path = Polyline(std::move(pts));
  plan.s0 = plan.path.project({0.0, 0.0}).s;
  for (const auto& p : pv) plan.preview_s.push_back(plan.path.project(p.position).s - plan.s0);
  return plan;
}

inline std::vector<RuleBasedAgent::Track> RuleBasedAgent::build_tracks(const Observation& obs, const Plan& plan) {
  std::vector<Track> out;
  for (const auto& a : obs.nearby_actors) {
    const Vec2 p = a.relative_pose.position();
    const auto pr = plan.path.project(p);
    if (pr.distance > 30.0) continue;
    const double tangent = plan.path.at(pr.s).heading;
    const double rel = normalize_angle(a.relative_pose.heading - tangent);
    Track t;
    t.actor = &a;
    t.ds = pr.s - plan.s0;
    t.lat = pr.lateral;
    t.v_along = a.speed * std::cos(rel);
    t.v_lat = a.speed * std::sin(rel);
    t.ext_s = std::abs(a.half_length * std::cos(rel)) + std::abs(a.half_width * std::sin(rel));
    t.ext_l = std::abs(a.half_length * std::sin(rel)) + std::abs(a.half_width * std::cos(rel));
    out.push_back(t);
  }
  return out;
}

/// Free corridor width (left, right) from the route line at `ds` ahead of the ego.
inline std::pair<double, double> RuleBasedAgent::free_at(const Plan& plan, double ds) {
  const auto& pv = plan.obs->route_preview;
  if (pv.empty()) return {0.0, 0.0};
  std::size_t best = 0;
  for (std::size_t i = 1; i < pv.size(); ++i) {
    if (std::abs(plan.preview_s[i] - ds) < std::abs(plan.preview_s[best] - ds)) best = i;
  }
  return {pv[best].free_left, pv[best].free_right};
}

inline ControlCommand RuleBasedAgent::act(const Observation& obs) {
  ControlCommand cmd;
  if (obs.route_preview.empty()) {
    cmd.brake = 1.0;
    return cmd;
  }
  const bool ethics = style_.ethics_aware;
  const bool brakes_failed = obs.has_fault("brake_failure");
  const Plan plan = build_plan(obs);
  const std::vector<Track> tracks = build_tracks(obs, plan);
  const double v = obs.speed;

  // ---- desired cruise speed
  double v_des = obs.speed_limit * style_.speed_factor;
  if (obs.has_flag("fog")) v_des = std::min(v_des, 6.0);
  if (obs.has_flag("sensor_degraded")) v_des = std::min(v_des, 5.0);
  {
    double kappa = 0.0;
    const double horizon = std::max(15.0, v * 3.0 + 10.0);
    for (double s = 0.0; s < horizon; s += 2.5) {
      const double h0 = plan.path.at(plan.s0 + s).heading;
      const double h1 = plan.path.at(plan.s0 + s + 5.0).heading;
      kappa = std::max(kappa, std::abs(normalize_angle(h1 - h0)) / 5.0);
    }
    if (kappa > 1e-6) v_des = std::min(v_des, std::sqrt(2.5 / kappa));
  }
  bool door_near = false;
  for (const auto& t : tracks) {
    if (t.actor->attributes.count("door_open") && t.actor->attributes.at("door_open") != 0.0 && t.ds > -8.0 &&
        t.ds < 20.0) {
      door_near = true;
    }
  }
  if (ethics) {
    if (obs.has_flag("in_puddle_zone") || obs.has_flag("near_speed_bump")) v_des = std::min(v_des, 2.5);
    if (door_near) v_des = std::min(v_des, 3.5);
  }

  // ---- lateral target
  double target = 0.0;
  double rate = 0.08;
  std::vector<const Track*> passing;  // blockers the detour clears

  // Emergency vehicle approaching from behind: make room on the right.
  bool ev_close = false;
  for (const auto& t : tracks) {
    if (t.actor->kind == ActorKind::emergency_vehicle && t.ds < 6.0 && t.ds > -40.0 && t.v_along > 0.5) ev_close = true;
  }
  if (ethics && (obs.has_flag("emergency_behind") || (yielding_emergency_ && ev_close))) {
    yielding_emergency_ = true;
  } else if (!ev_close) {
    yielding_emergency_ = false;
  }
  bool ev_blocked = false;
  if (yielding_emergency_) {
    double room = 1e9;
    for (double ds = -2.0; ds <= 12.0; ds += 2.0) room = std::min(room, free_at(plan, ds).second);
    const double shift = room - kEgoHalfWidth - 0.2;
    if (shift >= 2.6) {
      target = -2.6;
    } else {
      ev_blocked = true;
      target = -std::max(0.0, shift);
    }
    v_des = std::min(v_des, 3.0);
  }

  // Blockers in the lane: static or parked obstacles, and slow leads that may be overtaken.
  const Track* blocker = nullptr;
  for (const auto& t : tracks) {
    const auto& a = *t.actor;
    if (t.ds <= 0.0 || t.ds > 45.0 || !in_band(t, 0.0)) continue;
    bool blocks = is_blocker_kind(a) && t.v_along < 0.5;
    if (ethics && a.attributes.count("overtake_allowed") && a.speed < 0.5 * obs.speed_limit) blocks = true;
    if (a.kind == ActorKind::pedestrian || a.kind == ActorKind::cyclist) blocks = false;
    if (blocks && (!blocker || t.ds < blocker->ds)) blocker = &t;
  }
  bool detour_waiting = false;
  if (blocker && !yielding_emergency_) {
    const auto& b = *blocker;
    // Treat nearby lane blockers (including ones alongside) as a single obstacle.
    const auto blocks_lane = [&](const Track& t) {
      return is_blocker_kind(*t.actor) && std::abs(t.v_along) < 0.5 && in_band(t, 0.0);
    };
    std::vector<const Track*> cluster{&b};
    double cluster_end = b.ds + b.ext_s;
    for (bool grew = true; grew;) {
      grew = false;
      for (const auto& t : tracks) {
        if (std::find(cluster.begin(), cluster.end(), &t) != cluster.end() || !blocks_lane(t)) continue;
        if (t.ds - t.ext_s > cluster_end + 10.0 || t.ds < -(t.ext_s + kEgoHalfLength + 2.0)) continue;
        cluster.push_back(&t);
        cluster_end = std::max(cluster_end, t.ds + t.ext_s);
        grew = true;
      }
    }
    double edge_left = -1e9;
    double edge_right = 1e9;
    double clear = 0.8;
    for (const Track* t : cluster) {
      edge_left = std::max(edge_left, t->lat + t->ext_l);
      edge_right = std::min(edge_right, t->lat - t->ext_l);
      if (ethics && t->actor->attributes.count("unknown_object")) clear = 1.6;
    }
    const auto side_ok = [&](double lat_target) {
      for (double ds = b.ds - 12.0; ds <= cluster_end + 12.0; ds += 2.0) {
        const auto [fl, fr] = free_at(plan, ds);
        if (lat_target + kEgoHalfWidth + 0.15 > fl || -lat_target + kEgoHalfWidth + 0.15 > fr) return false;
      }
      for (const auto& o : tracks) {
        if (std::find(cluster.begin(), cluster.end(), &o) != cluster.end() || std::abs(o.v_along) > 0.5) continue;
        if (o.ds > b.ds - 10.0 && o.ds < cluster_end + 10.0 && in_band(o, lat_target, 0.3)) return false;
      }
      return true;
    };
    const double left = edge_left + kEgoHalfWidth + clear;
    const double right = edge_right - kEgoHalfWidth - clear;
    std::optional<double> chosen;
    const auto allowed = [&](double lat) {
      return style_.leaves_lane_to_pass || std::abs(lat) + kEgoHalfWidth <= 1.75;
    };
    if (allowed(left) && side_ok(left)) {
      chosen = left;
    } else if (allowed(right) && side_ok(right)) {
      chosen = right;
    }
    if (chosen) {
      // Wait for a gap in oncoming traffic before entering the opposing side.
      const bool committed = bias_ * *chosen > 0.5 * *chosen * *chosen && b.ds < 10.0;
      if (!committed) {
        const double v_pass = std::max(v, 3.0);
        const double t_clear = (cluster_end + kEgoHalfLength + 6.0) / v_pass;
        for (const auto& o : tracks) {
          if (o.v_along > -0.5 || o.ds < -5.0 || !in_band(o, *chosen, 0.8)) continue;
          const double t_meet = std::max(0.0, o.ds - o.ext_s - kEgoHalfLength) / (v_pass + std::abs(o.v_along));
          if (t_meet < t_clear + 1.5) detour_waiting = true;
        }
      }
      if (detour_waiting) {
        // Wait lined up behind the blockage, inside our own lane.
        target = std::max(0.5 * (edge_left + edge_right), -(free_at(plan, 0.0).second - kEgoHalfWidth - 0.15));
      } else if (b.ds < std::max(14.0, 2.5 * v + 8.0) || bias_ * *chosen > 0.0) {
        target = *chosen;
        passing = cluster;
      }
    }
  }
  // Keep the offset while still alongside an obstacle already being passed.
  if (!blocker && std::abs(bias_) > 0.3) {
    for (const auto& t : tracks) {
      if (t.ds > -(t.ext_s + kEgoHalfLength + 2.0) && t.ds <= 0.0 && in_band(t, 0.0) && t.v_along < 0.5 &&
          !in_band(t, bias_)) {
        target = bias_;
      }
    }
  }

  // Oncoming vehicle in our lane: move aside without stopping, since stopping cannot avoid it.
  std::vector<const Track*> evading;
  for (const auto& t : tracks) {
    if (t.v_along < -1.0 && t.ds > 0.0 && t.ds < 70.0 && in_band(t, bias_)) {
      const auto [fl, fr] = free_at(plan, 5.0);
      const double right = t.lat - t.ext_l - kEgoHalfWidth - 0.8;
      const double left = t.lat + t.ext_l + kEgoHalfWidth + 0.8;
      if (-right + kEgoHalfWidth + 0.1 <= fr) {
        target = right;
        evading.push_back(&t);
      } else if (left + kEgoHalfWidth + 0.1 <= fl) {
        target = left;
        evading.push_back(&t);
      }
      rate = 0.25;
      v_des = std::min(v_des, 6.0);
    }
  }

  // Police pull-over.
  std::optional<double> pullover_stop;
  if (obs.has_flag("police_pullover_armed") && obs.pullover_target) {
    const auto pr = plan.path.project(*obs.pullover_target);
    const double ds = pr.s - plan.s0;
    if (ds < 40.0) target = pr.lateral;
    pullover_stop = ds;
    v_des = std::min(v_des, 5.0);
  }

  // Harm-minimizing evasion when the car cannot stop.
  if (brakes_failed && ethics) {
    const double horizon = v * 4.0 + 10.0;
    double best_cost = 1e18;
    double best = bias_;
    for (double cand = -3.5; cand <= 3.51; cand += 0.25) {
      double cost = 0.02 * std::abs(cand - bias_);
      const auto [fl, fr] = free_at(plan, 8.0);
      if (cand + kEgoHalfWidth > fl || -cand + kEgoHalfWidth > fr) cost += 2.0;
      for (const auto& t : tracks) {
        if (t.ds <= 0.0 || t.ds > horizon) continue;
        const double t_arrive = t.ds / std::max(v, 0.5);
        const double lat_then = t.lat + t.v_lat * t_arrive;
        if (std::abs(lat_then - cand) >= t.ext_l + kEgoHalfWidth + 0.3) continue;
        const ActorKind k = t.actor->kind;
        cost += (k == ActorKind::pedestrian || k == ActorKind::cyclist) ? 10.0
                : k == ActorKind::static_obstacle                          ? 1.0
                                                                           : 3.0;
      }
      if (cost < best_cost - 1e-9) {
        best_cost = cost;
        best = cand;
      }
    }
    target = best;
    rate = 0.25;
  }

  const double step = std::clamp(target - bias_, -rate, rate);
  bias_ += step;

  // ---- longitudinal control
  const double a_max = 2.0;
  const double b_comf = 3.0;
  double acc = a_max * (1.0 - std::pow(std::max(v, 0.0) / std::max(v_des, 0.1), 4.0));
  if (v > v_des) acc = std::max(-4.0, -(v - v_des) * 1.5);
  bool hold = false;

  const auto follow = [&](double gap, double lead_speed, double headway, double s0) {
    const double dv = v - lead_speed;
    const double s_star = s0 + std::max(0.0, v * headway + v * dv / (2.0 * std::sqrt(a_max * b_comf)));
    const double g = std::max(gap, 0.05);
    const double free = a_max * (1.0 - std::pow(std::max(v, 0.0) / std::max(v_des, 0.1), 4.0));
    acc = std::min(acc, free - a_max * (s_star / g) * (s_star / g));
  };
  const auto stop_at = [&](double gap) {
    follow(gap, 0.0, 0.8, 0.5);
    if (gap < 1.5 && v < 0.6) hold = true;
  };

  for (const auto& t : tracks) {
    if (t.ds <= 0.0) continue;
    if (std::find(passing.begin(), passing.end(), &t) != passing.end() && !in_band(t, bias_)) continue;
    if (std::find(evading.begin(), evading.end(), &t) != evading.end()) continue;
    const double lateral_here = t.ds > 6.0 ? bias_ : std::clamp(t.lat, std::min(0.0, bias_), std::max(0.0, bias_));
    if (!in_band(t, lateral_here) && !(t.ds <= 6.0 && in_band(t, bias_))) continue;
    const double gap = t.ds - t.ext_s - kEgoHalfLength;
    const bool weaving = t.actor->attributes.count("weaving") && t.actor->attributes.at("weaving") != 0.0;
    const double headway = ethics && weaving ? 3.2 : 1.2;
    const double s0 = is_blocker_kind(*t.actor) ? 4.0 : 2.5;
    follow(gap, std::max(0.0, t.v_along), headway, s0);
  }

  // Crossing traffic and pedestrians about to enter our lane.
  for (const auto& t : tracks) {
    if (t.ds < -t.ext_s - kEgoHalfLength || t.ds > 45.0) continue;
    if (std::abs(t.v_lat) < 0.3) continue;
    const double half = t.ext_l + kEgoHalfWidth + 0.6;
    const double rel = t.lat - bias_;
    const double t1 = (-half - rel) / t.v_lat;
    const double t2 = (half - rel) / t.v_lat;
    const double t_in = std::min(t1, t2);
    const double t_out = std::max(t1, t2);
    if (t_out < -0.2 || t_in > 6.0) continue;
    const double gap = t.ds - t.ext_s - kEgoHalfLength - 1.5;
    if (gap < -1.0) continue;
    if (gap > std::max(10.0, v * v / (2.0 * b_comf) + v * 1.5 + 4.0)) continue;
    if (t.v_along > 1.0) {
      follow(gap + 1.5, t.v_along, 1.0, 2.0);  // merging ahead of us: keep a gap, no full stop
    } else {
      stop_at(std::max(gap, 0.0));
    }
  }

  // Curbside start: hold while main-lane traffic approaches.
  if (ethics && obs.has_flag("curbside")) {
    for (const auto& t : tracks) {
      if (t.ds >= 2.0 || t.v_along < 0.5 || std::abs(t.lat) > 4.0) continue;
      const double gap = -t.ds - t.ext_s - kEgoHalfLength;
      if (gap < 0.0 || gap / t.v_along < 3.5 || gap < 15.0) hold = true;
    }
  }

  // Traffic control.
  if (obs.traffic_light) {
    const auto& light = *obs.traffic_light;
    const double gap = light.distance - kEgoHalfLength - 0.6;
    if (light.phase == LightPhase::failed) {
      // Treated like an all-way stop below.
    } else if (light.phase == LightPhase::red && gap > -0.4) {
      if (!(yielding_emergency_ && ev_blocked)) stop_at(gap);
      else v_des = std::min(v_des, 3.0);
    } else if (light.phase == LightPhase::yellow && gap > v * v / (2.0 * 4.0)) {
      stop_at(gap);
    }
  }
  std::optional<double> stop_line;
  if (obs.stop_sign_distance) stop_line = *obs.stop_sign_distance;
  if (obs.traffic_light && obs.traffic_light->phase == LightPhase::failed) {
    stop_line = stop_line ? std::min(*stop_line, obs.traffic_light->distance) : obs.traffic_light->distance;
  }
  if (stop_line) {
    const double gap = *stop_line - kEgoHalfLength - 0.6;
    if (!stop_served_ && gap > -0.4) {
      stop_at(gap);
      if (v < 0.05 && gap < 3.0) {
        if (++stop_wait_ >= 20) stop_served_ = true;
      }
    }
  } else {
    stop_wait_ = 0;
    stop_served_ = false;
  }

  if (pullover_stop) {
    const double gap = *pullover_stop;
    if (gap < 30.0) stop_at(std::max(gap, 0.0));
    if (std::abs(gap) < 3.0 && v < 0.5) hold = true;
  }
  if (detour_waiting && blocker) stop_at(blocker->ds - blocker->ext_s - kEgoHalfLength - 6.0);

  // ---- steering (pure pursuit on the biased path)
  const double lookahead = std::max(4.0, 0.8 * v + 3.0);
  const Pose2D aim = plan.path.offset_at(plan.s0 + lookahead, bias_);
  const double ld = std::max(norm(aim.position()), 1.0);
  const double alpha = std::atan2(aim.y, aim.x);
  const double delta = std::atan(2.0 * kWheelbase * std::sin(alpha) / ld);
  cmd.steer = std::clamp(delta / kMaxSteer, -1.0, 1.0);

  if (brakes_failed) {
    cmd.throttle = 0.0;
    cmd.brake = 1.0;
    return cmd;
  }
  if (hold) {
    cmd.brake = std::max(0.5, std::clamp(-acc / kMaxBrake, 0.0, 1.0));
    return cmd;
  }
  if (acc >= 0.0) {
    cmd.throttle = std::clamp(acc / kMaxAccel, 0.0, 1.0);
  } else {
    cmd.brake = std::clamp(-acc / kMaxBrake, 0.0, 1.0);
    if (v < 0.05) cmd.brake = std::max(cmd.brake, 0.2);
  }
  return cmd;
}

// ---------------------------------------------------------------------------
// Registry

inline const std::vector<std::string>& builtin_agent_names() {
  static const std::vector<std::string> names = {"lawful_follower", "ethics_blind", "timid", "reckless", "random"};
  return names;
}

inline std::unique_ptr<Agent> make_builtin_agent(const std::string& name) {
  if (name == "lawful_follower") return std::make_unique<RuleBasedAgent>(RuleStyle{name, true, 1.0});
  if (name == "ethics_blind") return std::make_unique<RuleBasedAgent>(RuleStyle{name, false, 1.0});
  if (name == "timid") return std::make_unique<RuleBasedAgent>(RuleStyle{name, true, 0.45, false});
  if (name == "reckless") return std::make_unique<RecklessAgent>();
  if (name == "random") return std::make_unique<RandomAgent>();
  throw ConfigError("unknown built-in agent '" + name + "'");
}

}  // namespace roadjudge
