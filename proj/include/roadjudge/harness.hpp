#pragma once

#include <algorithm>
#include <atomic>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "roadjudge/agents.hpp"
#include "roadjudge/detectors.hpp"
#include "roadjudge/engine.hpp"
#include "roadjudge/observation.hpp"
#include "roadjudge/replay.hpp"
#include "roadjudge/scenario.hpp"
#include "roadjudge/scoring.hpp"

namespace roadjudge {

inline constexpr double kRouteDeviationDistance = 20.0;

namespace termination {
inline const std::string route_complete = "route_complete";
inline const std::string scenario_success = "scenario_success";
inline const std::string timeout = "timeout";
inline const std::string route_deviation = "route_deviation";
inline const std::string invalid = "invalid";
}  // namespace termination

/// Detection, overrides and the incremental LS/ES fold for one episode.
class EpisodeEvaluator {
 public:
  explicit EpisodeEvaluator(DetectionContext ctx, const RuleTable& rules = default_rules())
      : detector_(std::move(ctx)), rules_(&rules) {}

  std::vector<InfractionEvent> on_frame(const TickFrame& f) {
    const auto& ctx = detector_.context();
    auto events = apply_overrides(detector_.on_tick(f), ctx.bindings.overrides, *rules_);
    for (const auto& e : events) accept(e);
    cursor_ = waypoint_pass_check(f.ego, ctx.route, cursor_);
    success_ = success_ || f.scenario_success;
    last_ = f;
    return events;
  }

  std::vector<InfractionEvent> finish() {
    auto events = apply_overrides(detector_.finish(), detector_.context().bindings.overrides, *rules_);
    for (const auto& e : events) accept(e);
    return events;
  }

  int waypoint_cursor() const { return cursor_; }
  bool success() const { return success_; }

  /// Termination reason implied by the last frame alone.
  std::string derived_termination() const {
    const auto& route = detector_.context().route;
    if (success_) return termination::scenario_success;
    if (cursor_ >= static_cast<int>(route.waypoints.size())) return termination::route_complete;
    if (last_.tick >= route.timeout_ticks) return termination::timeout;
    return termination::route_deviation;
  }

  ScoreRecord record(const std::string& termination_reason, bool valid = true, std::string invalid_reason = {}) const {
    const auto& ctx = detector_.context();
    ScoreRecord r;
    r.route_id = ctx.route.route_id;
    r.ability_id = ctx.route.ability_id;
    r.set_tag = ctx.route.set_tag;
    r.rc = route_completion(cursor_, static_cast<int>(ctx.route.waypoints.size()),
                            success_ && ctx.route.rc_shortcut_segment.has_value());
    r.ls = acc_.ls;
    r.es = acc_.es;
    r.ds = compose_drive_score(r.rc, r.ls, r.es);
    r.ethics_applicable = ctx.route.ethics_applicable;
    r.valid = valid;
    r.termination = termination_reason;
    r.invalid_reason = std::move(invalid_reason);
    r.events = events_;
    return r;
  }

 private:
  void accept(const InfractionEvent& e) {
    acc_.apply(e, *rules_);
    events_.push_back(e);
  }

  EpisodeDetector detector_;
  const RuleTable* rules_;
  ScoreAccumulator acc_;
  std::vector<InfractionEvent> events_;
  int cursor_ = 0;
  bool success_ = false;
  TickFrame last_;
};

struct EpisodeOptions {
  EngineConfig engine;
  DetectorThresholds thresholds;
  bool keep_replay = true;
};

struct EpisodeOutcome {
  ScoreRecord record;
  EpisodeReplay replay;
};

/// Closed loop for one route: observe, act, scenario tick, step, detect, score.
inline EpisodeOutcome run_episode(const ScenarioInstance& inst, Agent& agent, std::uint64_t seed,
                                  const EpisodeOptions& opts = {}) {
  validate(opts.engine);
  validate_route(inst.route);
  EngineConfig engine = opts.engine;
  engine.seed = seed;

  EpisodeOutcome out;
  ReplayHeader& h = out.replay.header;
  h.route_id = inst.route.route_id;
  h.seed = seed;
  h.engine = engine;
  h.engine_config_digest = engine_config_digest(engine);
  h.agent = agent.descriptor();
  h.template_id = inst.program ? inst.program->template_id : std::string{};
  h.route = inst.route;
  h.infrastructure = inst.world.infrastructure;
  h.bindings = inst.bindings;
  h.thresholds = opts.thresholds;

  EpisodeEvaluator evaluator(h.detection_context());
  const RouteContext rctx(inst.route, inst.bindings);
  WorldState world = inst.world;
  ScenarioRuntime rt = start_runtime(inst);
  const auto n_waypoints = static_cast<int>(inst.route.waypoints.size());

  const auto record_frame = [&](TickFrame frame) {
    auto events = evaluator.on_frame(frame);
    if (opts.keep_replay) out.replay.ticks.push_back({std::move(frame), std::move(events)});
  };

  std::string reason;
  bool valid = true;
  std::string invalid_reason;
  try {
    agent.begin({inst.route.route_id, seed});
    update_progress(rt, world, inst.route);
    record_frame(make_frame(world, ControlCommand{}, rt.phase, {}, rt.success));
    while (true) {
      if (rt.success) {
        reason = termination::scenario_success;
      } else if (rt.waypoint_cursor >= n_waypoints) {
        reason = termination::route_complete;
      } else if (world.tick >= inst.route.timeout_ticks) {
        reason = termination::timeout;
      } else if (rctx.line.project(world.ego.pose.position()).distance > kRouteDeviationDistance) {
        reason = termination::route_deviation;
      }
      if (!reason.empty()) break;

      const Observation obs = observe(world, rctx, rt.phase, rt.waypoint_cursor);
      ControlCommand cmd;
      try {
        cmd = agent.act(obs);
      } catch (const AgentFailure& e) {
        valid = false;
        invalid_reason = std::string("agent failure: ") + e.what();
        reason = termination::invalid;
        break;
      }
      clamp_command(cmd);
      auto tick = scenario_tick(rt, world, inst.route, opts.thresholds.stopped_speed);
      world = step(world, cmd, tick.commands, engine).world;
      update_progress(rt, world, inst.route);
      record_frame(make_frame(world, cmd, rt.phase, std::move(tick.fired), rt.success));
    }
  } catch (const AgentFailure& e) {
    valid = false;
    invalid_reason = std::string("agent failure: ") + e.what();
    reason = termination::invalid;
  } catch (const std::exception& e) {
    valid = false;
    invalid_reason = std::string("harness error: ") + e.what();
    reason = termination::invalid;
  }

  evaluator.finish();
  out.record = evaluator.record(reason, valid, invalid_reason);
  try {
    agent.end({reason, json(out.record)});
  } catch (const std::exception&) {
    // The record is already final; a failing goodbye does not change it.
  }
  if (opts.keep_replay) {
    out.replay.footer = ReplayFooter{reason, out.record, body_digest(out.replay.ticks)};
  }
  return out;
}

/// Recomputes the score record purely from a replay's header and tick records.
inline ScoreRecord score_replay(const EpisodeReplay& replay, const RuleTable& rules = default_rules()) {
  if (replay.header.schema_version != kReplaySchemaVersion) {
    throw ReplayIntegrityError("unsupported replay schema version " + std::to_string(replay.header.schema_version));
  }
  if (replay.ticks.empty()) throw ReplayIntegrityError("replay has no tick records");
  EpisodeEvaluator evaluator(replay.header.detection_context(), rules);
  for (std::size_t i = 0; i < replay.ticks.size(); ++i) {
    if (replay.ticks[i].frame.tick != static_cast<std::int64_t>(i)) {
      throw ReplayIntegrityError("tick gap at record " + std::to_string(i));
    }
    evaluator.on_frame(replay.ticks[i].frame);
  }
  evaluator.finish();
  if (replay.footer) {
    const auto& f = *replay.footer;
    return evaluator.record(f.termination, f.record.valid, f.record.invalid_reason);
  }
  return evaluator.record(evaluator.derived_termination());
}

// ---------------------------------------------------------------------------
// Suites

using AgentFactory = std::function<std::unique_ptr<Agent>()>;

struct SuiteJob {
  ScenarioInstance instance;
  std::uint64_t seed = 0;
};

struct SuiteRunOptions {
  int parallelism = 1;
  EpisodeOptions episode;
  // Called from worker threads once per finished episode; must be thread safe.
  std::function<void(const EpisodeOutcome&)> on_episode;
};

struct SuiteReport {
  std::string agent;
  std::vector<ScoreRecord> records;  // sorted by route_id
  std::vector<SplitReport> splits;   // Overall, then Basic/Hard/Thorny when present

  friend bool operator==(const SuiteReport&, const SuiteReport&) = default;
};

inline std::vector<SplitReport> split_reports(const std::vector<ScoreRecord>& records) {
  std::vector<SplitReport> out;
  for (const std::string tag : {"Overall", "Basic", "Hard", "Thorny"}) {
    const bool any = std::any_of(records.begin(), records.end(), [&](const ScoreRecord& r) {
      return r.valid && (tag == "Overall" || to_string(r.set_tag) == tag);
    });
    if (any) out.push_back(aggregate_split(records, tag));
  }
  return out;
}

inline SuiteReport make_suite_report(std::string agent, std::vector<ScoreRecord> records) {
  std::stable_sort(records.begin(), records.end(),
                   [](const ScoreRecord& a, const ScoreRecord& b) { return a.route_id < b.route_id; });
  SuiteReport rep{std::move(agent), std::move(records), {}};
  rep.splits = split_reports(rep.records);
  return rep;
}

inline void to_json(json& j, const SuiteReport& r) {
  j = json{{"agent", r.agent}, {"records", r.records}, {"splits", r.splits}};
}
inline void from_json(const json& j, SuiteReport& r) {
  j.at("agent").get_to(r.agent);
  j.at("records").get_to(r.records);
  j.at("splits").get_to(r.splits);
}

/// Runs every job with its own agent instance; results do not depend on scheduling.
inline SuiteReport run_suite(const std::vector<SuiteJob>& jobs, const AgentFactory& make_agent,
                             const SuiteRunOptions& opts = {}) {
  std::vector<ScoreRecord> records(jobs.size());
  std::atomic<std::size_t> next{0};
  std::string agent_name;
  std::mutex name_mutex;

  const auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      const auto& job = jobs[i];
      try {
        auto agent = make_agent();
        {
          std::lock_guard lock(name_mutex);
          if (agent_name.empty()) agent_name = agent->descriptor().name;
        }
        EpisodeOutcome outcome = run_episode(job.instance, *agent, job.seed, opts.episode);
        if (opts.on_episode) opts.on_episode(outcome);
        records[i] = std::move(outcome.record);
      } catch (const std::exception& e) {
        ScoreRecord r;
        r.route_id = job.instance.route.route_id;
        r.ability_id = job.instance.route.ability_id;
        r.set_tag = job.instance.route.set_tag;
        r.ethics_applicable = job.instance.route.ethics_applicable;
        r.valid = false;
        r.termination = termination::invalid;
        r.invalid_reason = std::string("harness error: ") + e.what();
        records[i] = std::move(r);
      }
    }
  };

  const int n_threads = std::max(1, std::min<int>(opts.parallelism, static_cast<int>(jobs.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  }
  if (agent_name.empty()) agent_name = make_agent()->descriptor().name;
  return make_suite_report(agent_name, std::move(records));
}

}  // namespace roadjudge
