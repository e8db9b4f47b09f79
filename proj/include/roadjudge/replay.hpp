#pragma once

#include <cstdio>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "roadjudge/agents.hpp"
#include "roadjudge/detectors.hpp"
#include "roadjudge/engine.hpp"
#include "roadjudge/rng.hpp"
#include "roadjudge/scoring.hpp"
#include "roadjudge/trace.hpp"

namespace roadjudge {

inline constexpr int kReplaySchemaVersion = 1;

class ReplayIntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline std::string engine_config_digest(const EngineConfig& cfg) { return hex64(fnv1a64(json(cfg).dump())); }

/// Actor as recorded in a frame: geometry, motion and attributes, without controller state.
inline ActorState actor_summary(const ActorState& a) {
  ActorState s;
  s.id = a.id;
  s.kind = a.kind;
  s.pose = a.pose;
  s.speed = a.speed;
  s.half_length = a.half_length;
  s.half_width = a.half_width;
  s.attributes = a.attributes;
  return s;
}

inline TickFrame make_frame(const WorldState& world, const ControlCommand& cmd, const std::string& phase,
                            std::vector<std::string> fired, bool success) {
  TickFrame f;
  f.tick = world.tick;
  f.command = cmd;
  f.ego = world.ego;
  f.actors.reserve(world.actors.size());
  for (const auto& a : world.actors) f.actors.push_back(actor_summary(a));
  f.lights = light_snapshot(world);
  f.phase = phase;
  f.fired = std::move(fired);
  f.scenario_success = success;
  return f;
}

inline void to_json(json& j, const TickFrame& f) {
  json actors = json::array();
  for (const auto& a : f.actors) {
    actors.push_back(json{{"id", a.id},
                          {"kind", a.kind},
                          {"pose", a.pose},
                          {"speed", a.speed},
                          {"half_length", a.half_length},
                          {"half_width", a.half_width},
                          {"attributes", a.attributes}});
  }
  j = json{{"tick", f.tick},     {"command", f.command}, {"ego", f.ego},     {"actors", std::move(actors)},
           {"lights", f.lights}, {"phase", f.phase},     {"fired", f.fired}, {"scenario_success", f.scenario_success}};
}

inline void from_json(const json& j, TickFrame& f) {
  j.at("tick").get_to(f.tick);
  j.at("command").get_to(f.command);
  j.at("ego").get_to(f.ego);
  f.actors.clear();
  for (const auto& ja : j.at("actors")) {
    ActorState a;
    ja.at("id").get_to(a.id);
    ja.at("kind").get_to(a.kind);
    ja.at("pose").get_to(a.pose);
    ja.at("speed").get_to(a.speed);
    ja.at("half_length").get_to(a.half_length);
    ja.at("half_width").get_to(a.half_width);
    ja.at("attributes").get_to(a.attributes);
    f.actors.push_back(std::move(a));
  }
  j.at("lights").get_to(f.lights);
  j.at("phase").get_to(f.phase);
  j.at("fired").get_to(f.fired);
  j.at("scenario_success").get_to(f.scenario_success);
}

struct ReplayHeader {
  int schema_version = kReplaySchemaVersion;
  std::string route_id;
  std::uint64_t seed = 0;
  EngineConfig engine;
  std::string engine_config_digest;
  AgentDescriptor agent;
  std::string template_id;
  RouteSpec route;
  std::vector<InfrastructureElement> infrastructure;
  DetectorBindings bindings;
  DetectorThresholds thresholds;

  DetectionContext detection_context() const { return {route, infrastructure, bindings, thresholds}; }
  friend bool operator==(const ReplayHeader&, const ReplayHeader&) = default;
};

struct ReplayTick {
  TickFrame frame;
  std::vector<InfractionEvent> events;
  friend bool operator==(const ReplayTick&, const ReplayTick&) = default;
};

struct ReplayFooter {
  std::string termination;
  ScoreRecord record;
  std::string body_digest;
  friend bool operator==(const ReplayFooter&, const ReplayFooter&) = default;
};

struct EpisodeReplay {
  ReplayHeader header;
  std::vector<ReplayTick> ticks;
  std::optional<ReplayFooter> footer;
  friend bool operator==(const EpisodeReplay&, const EpisodeReplay&) = default;
};

inline json header_to_json(const ReplayHeader& h) {
  return json{{"kind", "header"},
              {"schema_version", h.schema_version},
              {"route_id", h.route_id},
              {"seed", h.seed},
              {"engine", h.engine},
              {"engine_config_digest", h.engine_config_digest},
              {"agent", h.agent},
              {"template_id", h.template_id},
              {"route", h.route},
              {"infrastructure", h.infrastructure},
              {"bindings", h.bindings},
              {"thresholds", h.thresholds}};
}

inline ReplayHeader header_from_json(const json& j) {
  ReplayHeader h;
  j.at("schema_version").get_to(h.schema_version);
  if (h.schema_version != kReplaySchemaVersion) {
    throw ReplayIntegrityError("unsupported replay schema version " + std::to_string(h.schema_version));
  }
  j.at("route_id").get_to(h.route_id);
  j.at("seed").get_to(h.seed);
  j.at("engine").get_to(h.engine);
  j.at("engine_config_digest").get_to(h.engine_config_digest);
  j.at("agent").get_to(h.agent);
  j.at("template_id").get_to(h.template_id);
  j.at("route").get_to(h.route);
  j.at("infrastructure").get_to(h.infrastructure);
  j.at("bindings").get_to(h.bindings);
  j.at("thresholds").get_to(h.thresholds);
  if (engine_config_digest(h.engine) != h.engine_config_digest) {
    throw ReplayIntegrityError("engine config digest does not match the recorded config");
  }
  return h;
}

inline std::string tick_line(const ReplayTick& t) {
  json j = t.frame;
  j["events"] = t.events;
  return j.dump();
}

inline std::string body_digest(const std::vector<ReplayTick>& ticks) {
  std::uint64_t h = fnv1a64("");
  for (const auto& t : ticks) {
    h = fnv1a64(tick_line(t), h);
    h = fnv1a64("\n", h);
  }
  return hex64(h);
}

inline std::string footer_line(const ReplayFooter& f) {
  return json{{"kind", "footer"}, {"termination", f.termination}, {"record", f.record}, {"body_digest", f.body_digest}}
      .dump();
}

/// JSON-lines form: header, one line per tick, footer.
inline std::string write_replay(const EpisodeReplay& r) {
  std::string out = header_to_json(r.header).dump();
  out += '\n';
  for (const auto& t : r.ticks) {
    out += tick_line(t);
    out += '\n';
  }
  if (r.footer) {
    out += footer_line(*r.footer);
    out += '\n';
  }
  return out;
}

inline EpisodeReplay parse_replay(std::istream& in) {
  EpisodeReplay r;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::uint64_t digest = fnv1a64("");
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (r.footer) throw ReplayIntegrityError("line " + std::to_string(line_no) + ": content after footer");
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ReplayIntegrityError("line " + std::to_string(line_no) + ": malformed JSON (" + e.what() + ")");
    }
    try {
      if (!have_header) {
        if (j.value("kind", std::string{}) != "header") throw ReplayIntegrityError("first line is not a replay header");
        r.header = header_from_json(j);
        have_header = true;
        continue;
      }
      if (j.contains("kind") && j.at("kind") == "footer") {
        ReplayFooter f;
        j.at("termination").get_to(f.termination);
        j.at("record").get_to(f.record);
        j.at("body_digest").get_to(f.body_digest);
        r.footer = std::move(f);
        continue;
      }
      ReplayTick t;
      t.frame = j.get<TickFrame>();
      j.at("events").get_to(t.events);
      const std::int64_t expected = static_cast<std::int64_t>(r.ticks.size());
      if (t.frame.tick != expected) {
        throw ReplayIntegrityError("tick gap: expected tick " + std::to_string(expected) + ", found " +
                                   std::to_string(t.frame.tick));
      }
      digest = fnv1a64(line, digest);
      digest = fnv1a64("\n", digest);
      r.ticks.push_back(std::move(t));
    } catch (const ReplayIntegrityError& e) {
      throw ReplayIntegrityError("line " + std::to_string(line_no) + ": " + e.what());
    } catch (const std::exception& e) {
      throw ReplayIntegrityError("line " + std::to_string(line_no) + ": invalid record (" + e.what() + ")");
    }
  }
  if (!have_header) throw ReplayIntegrityError("empty replay");
  if (r.ticks.empty()) throw ReplayIntegrityError("replay has no tick records");
  if (r.footer && r.footer->body_digest != hex64(digest)) {
    throw ReplayIntegrityError("body digest mismatch: footer says " + r.footer->body_digest + ", body hashes to " +
                               hex64(digest));
  }
  return r;
}

inline EpisodeReplay parse_replay(const std::string& text) {
  std::istringstream in(text);
  return parse_replay(in);
}

}  // namespace roadjudge
