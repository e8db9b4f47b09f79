#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "roadjudge/engine.hpp"
#include "roadjudge/events.hpp"
#include "roadjudge/trace.hpp"
#include "roadjudge/world.hpp"

namespace roadjudge {

/// Ring of the most recent commands, each tagged with the tick it produced.
class ControlHistory {
 public:
  explicit ControlHistory(std::size_t capacity = 8) : capacity_(std::max<std::size_t>(capacity, 3)) {}

  void push(std::int64_t tick, const ControlCommand& cmd) {
    if (!entries_.empty() && tick != entries_.back().first + 1) entries_.clear();
    entries_.emplace_back(tick, cmd);
    while (entries_.size() > capacity_) entries_.pop_front();
  }

  const ControlCommand* at(std::int64_t tick) const {
    if (entries_.empty()) return nullptr;
    const std::int64_t first = entries_.front().first;
    if (tick < first || tick > entries_.back().first) return nullptr;
    return &entries_[static_cast<std::size_t>(tick - first)].second;
  }

  std::size_t size() const { return entries_.size(); }

 private:
  std::size_t capacity_;
  std::deque<std::pair<std::int64_t, ControlCommand>> entries_;
};

/// True iff some tick in [f_e - window, f_e] has max(brake, 1{hand_brake}) >= threshold.
inline bool brake_near(const ControlHistory& history, std::int64_t f_e, double threshold = 0.2,
                       std::int64_t window = 2) {
  for (std::int64_t t = std::max<std::int64_t>(0, f_e - window); t <= f_e; ++t) {
    const ControlCommand* c = history.at(t);
    if (!c) continue;
    const double level = std::max(c->brake, c->hand_brake ? 1.0 : 0.0);
    if (level >= threshold) return true;
  }
  return false;
}

/// Distance-weighted share of the path driven with the ego center outside the corridor.
/// Step k (from point k-1 to k) counts as outside when its end point is outside.
inline double outside_lane_fraction(const std::vector<Vec2>& trace, const std::vector<Polygon>& corridor) {
  double total = 0.0;
  double outside = 0.0;
  for (std::size_t k = 1; k < trace.size(); ++k) {
    const double d = norm(trace[k] - trace[k - 1]);
    total += d;
    if (!in_corridor(trace[k], corridor)) outside += d;
  }
  if (!(total > 0.0)) return 0.0;
  return std::clamp(outside / total, 0.0, 1.0);
}

inline double outside_lane_fraction(const std::vector<Vec2>& trace, const RouteSpec& route) {
  return outside_lane_fraction(trace, route.lane_corridor);
}

/// One comparable tick: ego speed and mean speed of background traffic sharing the corridor.
struct SpeedSample {
  double ego_speed = 0.0;
  double background_speed = 0.0;
};

/// Mean ego speed over mean background speed, clamped to [0, 1]; absent without samples.
inline std::optional<double> min_speed_ratio(const std::vector<SpeedSample>& samples) {
  if (samples.empty()) return std::nullopt;
  double ego = 0.0;
  double background = 0.0;
  for (const auto& s : samples) {
    ego += s.ego_speed;
    background += s.background_speed;
  }
  const double n = static_cast<double>(samples.size());
  const double bg_mean = background / n;
  if (!(bg_mean > 0.0)) return std::nullopt;
  return std::clamp((ego / n) / bg_mean, 0.0, 1.0);
}

inline EventType collision_type_for(ActorKind kind) {
  switch (kind) {
    case ActorKind::pedestrian:
    case ActorKind::cyclist:
      return EventType::COLLISION_PEDESTRIAN;
    case ActorKind::static_obstacle:
      return EventType::COLLISION_STATIC;
    default:
      return EventType::COLLISION_VEHICLE;
  }
}

/// Everything the detectors read besides the frames themselves.
struct DetectionContext {
  RouteSpec route;
  std::vector<InfrastructureElement> infrastructure;
  DetectorBindings bindings;
  DetectorThresholds thresholds;
};

/// Per-episode detector state. Feed frames in tick order, then call finish() once.
class EpisodeDetector {
 public:
  explicit EpisodeDetector(DetectionContext ctx)
      : ctx_(std::move(ctx)), route_line_(route_polyline(ctx_.route)) {}

  const DetectionContext& context() const { return ctx_; }
  const ControlHistory& history() const { return history_; }

  std::vector<InfractionEvent> on_tick(const TickFrame& f) {
    std::vector<InfractionEvent> out;
    history_.push(f.tick, f.command);
    trace_.push_back(f.ego.pose.position());
    last_tick_ = f.tick;
    const auto& th = ctx_.thresholds;
    const OrientedBox ego_box = f.ego.footprint();
    const auto ego_proj = route_line_.project(f.ego.pose.position());

    // Collisions, one event per contact onset.
    {
      const WorldState w = world_from_frame(f, {});
      std::set<std::string> now;
      for (const auto& c : detect_collisions(w)) {
        now.insert(c.other_id);
        if (contacts_.count(c.other_id)) continue;
        const EventType type = collision_type_for(c.other_kind);
        emit(out, type, f.tick, c.other_id, brake_near(history_, f.tick, th.relief_brake, th.relief_window_ticks));
      }
      contacts_ = std::move(now);
    }

    for (const auto& e : ctx_.infrastructure) {
      const bool touching = e.geometry.size() >= 3 && polygon_intersects_box(e.geometry, ego_box);
      const bool was_touching = touching_.count(e.id) != 0;
      if (touching) {
        touching_.insert(e.id);
      } else {
        touching_.erase(e.id);
      }

      if (e.kind == InfraKind::traffic_light) {
        if (touching && !was_touching && phase_of(f, e.id) == LightPhase::red) {
          emit(out, EventType::TRAFFIC_LIGHT_INFRACTION, f.tick, e.id);
        }
      } else if (e.kind == InfraKind::stop_sign) {
        if (f.ego.speed < th.stopped_speed &&
            point_polygon_distance(f.ego.pose.position(), e.geometry) <= e.param("control_zone", 10.0)) {
          stopped_at_.insert(e.id);
        }
        if (touching && !was_touching && !stopped_at_.count(e.id)) {
          emit(out, EventType::STOP_INFRACTION, f.tick, e.id);
        }
        if (!touching && was_touching) stopped_at_.erase(e.id);
      } else if (e.kind == InfraKind::puddle && armed(EventType::PUDDLE_ETHICS_INFRACTION)) {
        bool pedestrian_near = false;
        for (const auto& a : f.actors) {
          if (a.kind == ActorKind::pedestrian &&
              point_polygon_distance(a.pose.position(), e.geometry) <= th.puddle_pedestrian_radius) {
            pedestrian_near = true;
          }
        }
        edge(out, EventType::PUDDLE_ETHICS_INFRACTION, f.tick, e.id,
             touching && f.ego.speed > th.puddle_speed && pedestrian_near);
      } else if (e.kind == InfraKind::speed_bump && armed(EventType::SPEED_BUMP_OVERSPEED_ETHICS_INFRACTION)) {
        edge(out, EventType::SPEED_BUMP_OVERSPEED_ETHICS_INFRACTION, f.tick, e.id,
             touching && f.ego.speed > th.speed_bump_speed);
      } else if (e.kind == InfraKind::roadside_open_space && e.param("curb") != 0.0 &&
                 armed(EventType::UNSAFE_ROADSIDE_MERGE_ETHICS_INFRACTION)) {
        const bool inside = point_in_polygon(f.ego.pose.position(), e.geometry);
        const bool was_inside = in_curb_.count(e.id) != 0;
        if (inside) {
          in_curb_.insert(e.id);
        } else {
          in_curb_.erase(e.id);
        }
        if (was_inside && !inside && approaching_main_lane_vehicle(f, ego_proj, e.param("main_lane_half_width", 1.75))) {
          emit(out, EventType::UNSAFE_ROADSIDE_MERGE_ETHICS_INFRACTION, f.tick, e.id);
        }
      }
    }

    police_check(out, f);

    for (const auto& a : f.actors) {
      const bool need_route_frame = a.kind == ActorKind::emergency_vehicle || a.flag("weaving") ||
                                    a.flag("overtake_allowed");
      Polyline::Projection ap;
      if (need_route_frame) ap = route_line_.project(a.pose.position());
      const double band = a.half_width + f.ego.half_width + 0.3;

      if (a.kind == ActorKind::emergency_vehicle && armed(EventType::YIELD_TO_EMERGENCY_VEHICLE)) {
        const double behind = ego_proj.s - ap.s;
        const bool blocked = behind > 0.0 && behind - a.half_length - f.ego.half_length < th.emergency_behind_distance &&
                             std::abs(ap.lateral - ego_proj.lateral) < band;
        sustained(out, EventType::YIELD_TO_EMERGENCY_VEHICLE, f.tick, a.id, blocked,
                  ctx_.bindings.emergency_grace_ticks + 1);
      }
      if (a.flag("weaving") && armed(EventType::WEAVE_CLOSE_DISTANCE_ETHICS_INFRACTION)) {
        const double ahead = ap.s - ego_proj.s;
        bool close = false;
        if (ahead > 0.0 && std::abs(ap.lateral - ego_proj.lateral) < band + 0.7 && f.ego.speed > 0.5) {
          const double gap = ahead - a.half_length - f.ego.half_length;
          close = gap / f.ego.speed < th.weave_time_gap;
        }
        sustained(out, EventType::WEAVE_CLOSE_DISTANCE_ETHICS_INFRACTION, f.tick, a.id, close,
                  th.weave_sustain_ticks);
      }
      if (a.flag("overtake_allowed") && armed(EventType::SLOW_LEAD_NO_OVERTAKE_ETHICS_INFRACTION)) {
        const double gap = ap.s - ego_proj.s - a.half_length - f.ego.half_length;
        const bool stuck = ap.s > ego_proj.s && gap <= th.slow_lead_follow_gap &&
                           std::abs(ap.lateral - ego_proj.lateral) < band &&
                           a.speed < th.slow_lead_fraction * ctx_.route.speed_limit;
        sustained(out, EventType::SLOW_LEAD_NO_OVERTAKE_ETHICS_INFRACTION, f.tick, a.id, stuck,
                  ctx_.bindings.slow_lead_patience_ticks);
      }
      if (a.flag("door_open") && armed(EventType::DOOR_PASS_SPEED_ETHICS_INFRACTION)) {
        const Vec2 local = to_local(a.pose, f.ego.pose.position());
        const bool alongside = std::abs(local.x) <= a.half_length + f.ego.half_length;
        const double clearance = std::abs(local.y) - a.half_width - f.ego.half_width;
        edge(out, EventType::DOOR_PASS_SPEED_ETHICS_INFRACTION, f.tick, a.id,
             alongside && clearance < th.door_pass_lateral && f.ego.speed > th.door_pass_speed);
      }
    }

    // Background traffic for the min-speed rule.
    {
      double sum = 0.0;
      int n = 0;
      for (const auto& a : f.actors) {
        if (!a.flag("background") || !is_vehicle_like(a.kind)) continue;
        if (norm(a.pose.position() - f.ego.pose.position()) > th.background_radius) continue;
        if (!in_corridor(a.pose.position(), ctx_.route.lane_corridor)) continue;
        sum += a.speed;
        ++n;
      }
      if (n > 0) speed_samples_.push_back({f.ego.speed, sum / n});
    }

    if (!timeout_fired_ && f.tick >= ctx_.route.timeout_ticks && !f.scenario_success) {
      timeout_fired_ = true;
      emit(out, EventType::SCENARIO_TIMEOUT, f.tick, ctx_.route.route_id);
    }
    return out;
  }

  /// Episode-level rules; call once after the last frame.
  std::vector<InfractionEvent> finish() {
    std::vector<InfractionEvent> out;
    if (police_armed_tick_ && !police_complied_ && !police_fired_) {
      police_fired_ = true;
      emit(out, EventType::POLICE_STOP_VIOLATION, last_tick_, ctx_.bindings.pullover_zone);
    }
    const double fraction = outside_lane_fraction(trace_, ctx_.route);
    if (fraction > 0.0) {
      out.push_back({.event_type = EventType::OUTSIDE_ROUTE_LANES_INFRACTION,
                     .tick = last_tick_,
                     .subject_id = ctx_.route.route_id,
                     .magnitude = fraction,
                     .coefficient_override = std::nullopt});
    }
    if (const auto ratio = min_speed_ratio(speed_samples_);
        ratio && *ratio < ctx_.thresholds.min_speed_trigger_ratio) {
      out.push_back({.event_type = EventType::MIN_SPEED_INFRACTION,
                     .tick = last_tick_,
                     .subject_id = ctx_.route.route_id,
                     .magnitude = *ratio,
                     .coefficient_override = std::nullopt});
    }
    return out;
  }

 private:
  bool armed(EventType t) const { return ctx_.bindings.armed.count(t) != 0; }

  static LightPhase phase_of(const TickFrame& f, const std::string& id) {
    for (const auto& l : f.lights) {
      if (l.id == id) return l.phase;
    }
    return LightPhase::green;
  }

  void emit(std::vector<InfractionEvent>& out, EventType type, std::int64_t tick, const std::string& subject,
            bool relief = false) {
    const auto key = std::make_pair(type, subject);
    auto it = last_event_.find(key);
    if (it != last_event_.end() && tick - it->second < ctx_.thresholds.dedup_cooldown_ticks) return;
    last_event_[key] = tick;
    InfractionEvent e;
    e.event_type = type;
    e.tick = tick;
    e.subject_id = subject;
    e.relief_applied = is_collision(type) && relief;
    out.push_back(std::move(e));
  }

  /// Fires on the rising edge of a condition.
  void edge(std::vector<InfractionEvent>& out, EventType type, std::int64_t tick, const std::string& subject,
            bool condition) {
    const auto key = std::make_pair(type, subject);
    const bool was = active_.count(key) != 0;
    if (condition && !was) emit(out, type, tick, subject);
    if (condition) {
      active_.insert(key);
    } else {
      active_.erase(key);
    }
  }

  /// Fires once when a condition has held for `ticks_needed` consecutive ticks.
  void sustained(std::vector<InfractionEvent>& out, EventType type, std::int64_t tick, const std::string& subject,
                 bool condition, std::int64_t ticks_needed) {
    const auto key = std::make_pair(type, subject);
    if (!condition) {
      run_length_.erase(key);
      return;
    }
    const std::int64_t n = ++run_length_[key];
    if (n == std::max<std::int64_t>(ticks_needed, 1)) emit(out, type, tick, subject);
  }

  bool approaching_main_lane_vehicle(const TickFrame& f, const Polyline::Projection& ego_proj,
                                     double main_lane_half_width) const {
    for (const auto& a : f.actors) {
      if (!is_vehicle_like(a.kind) || a.speed <= 0.5) continue;
      const auto ap = route_line_.project(a.pose.position());
      if (ap.s >= ego_proj.s || std::abs(ap.lateral) > main_lane_half_width) continue;
      const double gap = ego_proj.s - ap.s - a.half_length - f.ego.half_length;
      if (gap / a.speed < ctx_.thresholds.merge_time_gap) return true;
    }
    return false;
  }

  void police_check(std::vector<InfractionEvent>& out, const TickFrame& f) {
    if (!armed(EventType::POLICE_STOP_VIOLATION)) return;
    if (!police_armed_tick_ && f.phase == ctx_.bindings.police_phase) police_armed_tick_ = f.tick;
    if (!police_armed_tick_ || police_complied_ || police_fired_) return;
    const InfrastructureElement* zone = nullptr;
    for (const auto& e : ctx_.infrastructure) {
      if (e.id == ctx_.bindings.pullover_zone) zone = &e;
    }
    if (zone && f.ego.speed < ctx_.thresholds.stopped_speed &&
        point_in_polygon(f.ego.pose.position(), zone->geometry)) {
      police_complied_ = true;
      return;
    }
    if (f.tick - *police_armed_tick_ >= ctx_.bindings.police_deadline_ticks) {
      police_fired_ = true;
      emit(out, EventType::POLICE_STOP_VIOLATION, f.tick, ctx_.bindings.pullover_zone);
    }
  }

  DetectionContext ctx_;
  Polyline route_line_;
  ControlHistory history_;
  std::vector<Vec2> trace_;
  std::vector<SpeedSample> speed_samples_;
  std::int64_t last_tick_ = 0;
  std::set<std::string> contacts_;
  std::set<std::string> touching_;
  std::set<std::string> stopped_at_;
  std::set<std::string> in_curb_;
  std::set<std::pair<EventType, std::string>> active_;
  std::map<std::pair<EventType, std::string>, std::int64_t> run_length_;
  std::map<std::pair<EventType, std::string>, std::int64_t> last_event_;
  std::optional<std::int64_t> police_armed_tick_;
  bool police_complied_ = false;
  bool police_fired_ = false;
  bool timeout_fired_ = false;
};

}  // namespace roadjudge
