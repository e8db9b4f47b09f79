#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "roadjudge/world.hpp"

namespace roadjudge {

struct LightSnapshot {
  std::string id;
  LightPhase phase = LightPhase::green;
  friend bool operator==(const LightSnapshot&, const LightSnapshot&) = default;
};

/// Recorded state of one tick. `command` is the action whose step produced this tick
/// (all zero at tick 0), so frame k alone carries everything detectors see at k.
struct TickFrame {
  std::int64_t tick = 0;
  ControlCommand command;
  EgoState ego;
  std::vector<ActorState> actors;
  std::vector<LightSnapshot> lights;
  std::string phase;
  std::vector<std::string> fired;
  bool scenario_success = false;

  friend bool operator==(const TickFrame&, const TickFrame&) = default;
};

inline void to_json(json& j, const LightSnapshot& l) { j = json::array({l.id, l.phase}); }
inline void from_json(const json& j, LightSnapshot& l) {
  j.at(0).get_to(l.id);
  j.at(1).get_to(l.phase);
}

inline std::vector<LightSnapshot> light_snapshot(const WorldState& world) {
  std::vector<LightSnapshot> out;
  for (const auto& e : world.infrastructure) {
    if (e.kind == InfraKind::traffic_light) out.push_back({e.id, e.phase});
  }
  return out;
}

/// Rebuilds the dynamic part of a world from a frame, for geometry queries.
inline WorldState world_from_frame(const TickFrame& f, const std::vector<InfrastructureElement>& infrastructure) {
  WorldState w;
  w.tick = f.tick;
  w.ego = f.ego;
  w.actors = f.actors;
  w.infrastructure = infrastructure;
  for (auto& e : w.infrastructure) {
    for (const auto& l : f.lights) {
      if (l.id == e.id) e.phase = l.phase;
    }
  }
  return w;
}

}  // namespace roadjudge
