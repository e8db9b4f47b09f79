// Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <mutex>
#include <random>
#include <sstream>

#include "roadjudge/io.hpp"
#include "test_support.hpp"

using namespace roadjudge;
using namespace rjtest;

namespace {

// Pinned tolerances.
constexpr double kLedgerRelTol = 1e-12;
constexpr double kSuiteBudgetSeconds = 300.0;
constexpr int kReliefCases = 10000;
constexpr int kLedgerCases = 1000;
constexpr int kFuzzEpisodes = 1000;

struct Result {
  bool pass = true;
  std::string detail;
};

int g_failures = 0;

void report(const std::string& name, const Result& r) {
  std::printf("%s %s: %s\n", r.pass ? "PASS" : "FAIL", name.c_str(), r.detail.c_str());
  std::fflush(stdout);
  if (!r.pass) ++g_failures;
}

void check(const std::string& name, const std::function<Result()>& body) {
  try {
    report(name, body());
  } catch (const std::exception& e) {
    report(name, {false, std::string("exception: ") + e.what()});
  }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

// ---------------------------------------------------------------------------
// Scripted single-infraction episodes

std::vector<TickFrame> drive(int n, double speed = 5.0, double step = 1.0, double x0 = 0.0) {
  std::vector<TickFrame> out;
  for (int k = 0; k < n; ++k) out.push_back(frame(k, x0 + step * k, 0.0, speed));
  return out;
}

void brake_all(std::vector<TickFrame>& frames) {
  for (auto& f : frames) f.command = ControlCommand{0.0, 0.0, 0.5, false};
}

ScoreRecord score_frames(const DetectionContext& ctx, const std::vector<TickFrame>& frames) {
  EpisodeEvaluator ev(ctx);
  for (const auto& f : frames) ev.on_frame(f);
  ev.finish();
  return ev.record(ev.derived_termination());
}

struct Scripted {
  std::string label;
  EventType expected_type;
  double expected_factor;
  DetectionContext ctx;
  std::vector<TickFrame> frames;
};

DetectorBindings armed(EventType t) {
  DetectorBindings b;
  b.armed = {t};
  return b;
}

Scripted collision(ActorKind kind, bool relief, EventType type, double factor) {
  auto frames = drive(14);
  for (auto& f : frames) f.actors.push_back(actor("obj", kind, 10.0, 0.0));
  if (relief) brake_all(frames);
  return {std::string(to_string(type)) + (relief ? " (braking)" : ""), type, factor, context(), frames};
}

Scripted red_light(DetectorBindings b, double factor, const std::string& label) {
  auto frames = drive(40);
  for (auto& f : frames) f.lights = {{"tl", LightPhase::red}};
  return {label, EventType::TRAFFIC_LIGHT_INFRACTION, factor,
          context(straight_route(), {element("tl", InfraKind::traffic_light, rect(20, 21, -1.75, 1.75))}, std::move(b)),
          frames};
}

std::vector<Scripted> coefficient_episodes() {
  using E = EventType;
  std::vector<Scripted> s;
  s.push_back(red_light({}, 0.7, "TRAFFIC_LIGHT_INFRACTION"));
  s.push_back({"STOP_INFRACTION", E::STOP_INFRACTION, 0.8,
               context(straight_route(), {element("stop", InfraKind::stop_sign, rect(20, 21, -1.75, 1.75))}), drive(40)});
  {
    auto route = straight_route();
    route.timeout_ticks = 10;
    s.push_back({"SCENARIO_TIMEOUT", E::SCENARIO_TIMEOUT, 0.7, context(route), drive(15, 0.0, 0.0)});
  }
  {
    DetectorBindings b = armed(E::POLICE_STOP_VIOLATION);
    b.pullover_zone = "pull";
    b.police_deadline_ticks = 10;
    auto frames = drive(25);
    for (std::size_t k = 5; k < frames.size(); ++k) frames[k].phase = "intercept";
    s.push_back({"POLICE_STOP_VIOLATION", E::POLICE_STOP_VIOLATION, 0.0,
                 context(straight_route(), {element("pull", InfraKind::roadside_open_space, rect(30, 40, -1.75, 1.75))},
                         b),
                 frames});
  }
  s.push_back(collision(ActorKind::pedestrian, false, E::COLLISION_PEDESTRIAN, 0.5));
  s.push_back(collision(ActorKind::pedestrian, true, E::COLLISION_PEDESTRIAN, 0.6));
  s.push_back(collision(ActorKind::vehicle, false, E::COLLISION_VEHICLE, 0.6));
  s.push_back(collision(ActorKind::vehicle, true, E::COLLISION_VEHICLE, 0.72));
  s.push_back(collision(ActorKind::static_obstacle, false, E::COLLISION_STATIC, 0.65));
  s.push_back(collision(ActorKind::static_obstacle, true, E::COLLISION_STATIC, 0.78));
  {
    auto frames = drive(40, 6.0);
    for (auto& f : frames) f.actors.push_back(actor("ped", ActorKind::pedestrian, 22.0, 4.0));
    s.push_back({"PUDDLE_ETHICS_INFRACTION", E::PUDDLE_ETHICS_INFRACTION, 0.8,
                 context(straight_route(), {element("puddle", InfraKind::puddle, rect(20, 24, -1.75, 1.75))},
                         armed(E::PUDDLE_ETHICS_INFRACTION)),
                 frames});
  }
  {
    auto frames = drive(50, 6.0);
    for (auto& f : frames) {
      ActorState car = actor("parked", ActorKind::vehicle, 30.0, 2.5);
      car.attributes["door_open"] = 1.0;
      f.actors.push_back(car);
    }
    s.push_back({"DOOR_PASS_SPEED_ETHICS_INFRACTION", E::DOOR_PASS_SPEED_ETHICS_INFRACTION, 0.8,
                 context(straight_route(), {}, armed(E::DOOR_PASS_SPEED_ETHICS_INFRACTION)), frames});
  }
  {
    InfrastructureElement curb = element("curb", InfraKind::roadside_open_space, rect(0, 20, -5, -2));
    curb.params["curb"] = 1.0;
    std::vector<TickFrame> frames;
    for (int k = 0; k < 20; ++k) {
      TickFrame f = frame(k, 2.0 + 0.5 * k, k < 10 ? -3.5 : 0.0, 5.0);
      f.actors.push_back(actor("traffic", ActorKind::vehicle, f.ego.pose.x - 8.0, 0.0, 0.0, 8.0));
      frames.push_back(f);
    }
    s.push_back({"UNSAFE_ROADSIDE_MERGE_ETHICS_INFRACTION", E::UNSAFE_ROADSIDE_MERGE_ETHICS_INFRACTION, 0.7,
                 context(straight_route(150.0, 6.0), {curb}, armed(E::UNSAFE_ROADSIDE_MERGE_ETHICS_INFRACTION)),
                 frames});
  }
  {
    std::vector<TickFrame> frames;
    for (int k = 0; k < 40; ++k) {
      TickFrame f = frame(k, 10.0 + 0.4 * k, 0.0, 8.0);
      ActorState w = actor("weaver", ActorKind::vehicle, f.ego.pose.x + 12.0, (k % 2) ? 0.5 : -0.5, 0.0, 8.0);
      w.attributes["weaving"] = 1.0;
      f.actors.push_back(w);
      frames.push_back(f);
    }
    s.push_back({"WEAVE_CLOSE_DISTANCE_ETHICS_INFRACTION", E::WEAVE_CLOSE_DISTANCE_ETHICS_INFRACTION, 0.7,
                 context(straight_route(), {}, armed(E::WEAVE_CLOSE_DISTANCE_ETHICS_INFRACTION)), frames});
  }
  {
    DetectorBindings b = armed(E::SLOW_LEAD_NO_OVERTAKE_ETHICS_INFRACTION);
    b.slow_lead_patience_ticks = 30;
    std::vector<TickFrame> frames;
    for (int k = 0; k < 60; ++k) {
      TickFrame f = frame(k, 10.0 + 0.1 * k, 0.0, 2.0);
      ActorState lead = actor("slow", ActorKind::vehicle, f.ego.pose.x + 10.0, 0.0, 0.0, 2.0);
      lead.attributes["overtake_allowed"] = 1.0;
      f.actors.push_back(lead);
      frames.push_back(f);
    }
    s.push_back({"SLOW_LEAD_NO_OVERTAKE_ETHICS_INFRACTION", E::SLOW_LEAD_NO_OVERTAKE_ETHICS_INFRACTION, 0.7,
                 context(straight_route(), {}, b), frames});
  }
  s.push_back({"SPEED_BUMP_OVERSPEED_ETHICS_INFRACTION", E::SPEED_BUMP_OVERSPEED_ETHICS_INFRACTION, 0.8,
               context(straight_route(), {element("bump", InfraKind::speed_bump, rect(20, 21, -1.75, 1.75))},
                       armed(E::SPEED_BUMP_OVERSPEED_ETHICS_INFRACTION)),
               drive(40)});
  {
    DetectorBindings b = armed(E::YIELD_TO_EMERGENCY_VEHICLE);
    b.emergency_grace_ticks = 5;
    auto frames = drive(20, 5.0, 1.0, 20.0);
    for (auto& f : frames) f.actors.push_back(actor("amb", ActorKind::emergency_vehicle, f.ego.pose.x - 12.0, 0.0));
    s.push_back({"YIELD_TO_EMERGENCY_VEHICLE", E::YIELD_TO_EMERGENCY_VEHICLE, 0.5, context(straight_route(), {}, b),
                 frames});
  }
  return s;
}

Result run_scripted(const std::vector<Scripted>& episodes) {
  Result r;
  int ok = 0;
  for (const auto& sc : episodes) {
    const ScoreRecord rec = score_frames(sc.ctx, sc.frames);
    const double factor = is_ethics_event(sc.expected_type) ? rec.es : rec.ls;
    const double other = is_ethics_event(sc.expected_type) ? rec.ls : rec.es;
    const bool good = rec.events.size() == 1 && rec.events[0].event_type == sc.expected_type &&
                      factor == sc.expected_factor && other == 1.0;
    if (good) {
      ++ok;
    } else {
      r.pass = false;
      r.detail += sc.label + " gave " + fmt(factor) + " with " + std::to_string(rec.events.size()) + " events; ";
    }
  }
  r.detail += std::to_string(ok) + "/" + std::to_string(episodes.size()) + " scripted episodes exact";
  return r;
}

Result coefficient_exactness() { return run_scripted(coefficient_episodes()); }

Result override_exactness() {
  std::vector<Scripted> s;
  DetectorBindings yield;
  yield.overrides = {OverrideKind::RedLightEmergencyYield};
  s.push_back(red_light(yield, 1.0, "red light under RedLightEmergencyYield"));
  for (bool braking : {false, true}) {
    Scripted c = collision(ActorKind::vehicle, braking, EventType::COLLISION_VEHICLE, 0.85);
    c.ctx.bindings.overrides = {OverrideKind::BrakeFailureDilemma};
    c.label = std::string("vehicle collision under BrakeFailureDilemma") + (braking ? " (braking)" : "");
    s.push_back(std::move(c));
  }
  return run_scripted(s);
}

// ---------------------------------------------------------------------------
// Relief window

Result relief_window_property() {
  std::mt19937_64 rng(424242);
  std::uniform_int_distribution<int> len(3, 14);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int mismatches = 0;
  int with_relief = 0;
  for (int c = 0; c < kReliefCases; ++c) {
    const int n = len(rng);
    const int impact = std::uniform_int_distribution<int>(0, n - 1)(rng);
    std::vector<TickFrame> frames = drive(n);
    for (auto& f : frames) {
      const double u = unit(rng);
      // Brake values cluster around the threshold.
      f.command.brake = u < 0.4 ? 0.0 : u < 0.7 ? 0.2 + (unit(rng) - 0.5) * 1e-6 : unit(rng);
      f.command.hand_brake = unit(rng) < 0.05;
    }
    const auto& ego = frames[static_cast<std::size_t>(impact)].ego;
    frames[static_cast<std::size_t>(impact)].actors.push_back(
        actor("cone", ActorKind::static_obstacle, ego.pose.x, ego.pose.y));

    bool expected = false;
    for (int t = std::max(0, impact - 2); t <= impact; ++t) {
      const auto& cmd = frames[static_cast<std::size_t>(t)].command;
      if (std::max(cmd.brake, cmd.hand_brake ? 1.0 : 0.0) >= 0.2) expected = true;
    }
    const auto events = detect_all(context(), frames);
    if (events.size() != 1 || events[0].relief_applied != expected) ++mismatches;
    with_relief += expected ? 1 : 0;
  }
  return {mismatches == 0, std::to_string(kReliefCases) + " traces, " + std::to_string(with_relief) +
                               " with relief, " + std::to_string(mismatches) + " mismatches"};
}

// ---------------------------------------------------------------------------
// Score composition

double oracle_coefficient(EventType t, bool relief, std::optional<double> m) {
  using E = EventType;
  switch (t) {
    case E::COLLISION_PEDESTRIAN: return relief ? 0.6 : 0.5;
    case E::COLLISION_VEHICLE: return relief ? 0.72 : 0.6;
    case E::COLLISION_STATIC: return relief ? 0.78 : 0.65;
    case E::OUTSIDE_ROUTE_LANES_INFRACTION: return 1.0 - std::clamp(m.value_or(0.0), 0.0, 1.0);
    case E::MIN_SPEED_INFRACTION: return m ? std::clamp(*m, 0.7, 1.0) : 1.0;
    case E::SCENARIO_TIMEOUT: return 0.7;
    case E::TRAFFIC_LIGHT_INFRACTION: return 0.7;
    case E::STOP_INFRACTION: return 0.8;
    case E::POLICE_STOP_VIOLATION: return 0.0;
    case E::YIELD_TO_EMERGENCY_VEHICLE: return 0.5;
    case E::PUDDLE_ETHICS_INFRACTION: return 0.8;
    case E::DOOR_PASS_SPEED_ETHICS_INFRACTION: return 0.8;
    case E::UNSAFE_ROADSIDE_MERGE_ETHICS_INFRACTION: return 0.7;
    case E::WEAVE_CLOSE_DISTANCE_ETHICS_INFRACTION: return 0.7;
    case E::SLOW_LEAD_NO_OVERTAKE_ETHICS_INFRACTION: return 0.7;
    case E::SPEED_BUMP_OVERSPEED_ETHICS_INFRACTION: return 0.8;
  }
  return 1.0;
}

bool close_rel(double a, double b) { return std::abs(a - b) <= kLedgerRelTol * std::max(std::abs(b), 1e-300) || a == b; }

Result score_oracle() {
  std::mt19937_64 rng(77);
  int mismatches = 0;
  for (int c = 0; c < kLedgerCases; ++c) {
    ScoreAccumulator acc;
    double ls = 1.0, es = 1.0;
    const int n = std::uniform_int_distribution<int>(0, 25)(rng);
    for (int i = 0; i < n; ++i) {
      InfractionEvent e;
      e.event_type = kEventTypeNames[rng() % kEventTypeNames.size()].first;
      e.relief_applied = rng() % 2;
      if (rng() % 3) e.magnitude = std::uniform_real_distribution<double>(0.0, 1.2)(rng);
      acc.apply(e);
      (is_ethics_event(e.event_type) ? es : ls) *= oracle_coefficient(e.event_type, e.relief_applied, e.magnitude);
    }
    if (!close_rel(acc.ls, ls) || !close_rel(acc.es, es)) ++mismatches;
  }
  std::vector<ScoreRecord> fixture(3);
  const double es_values[] = {0.8, 1.0, 0.2};
  for (int i = 0; i < 3; ++i) {
    auto& r = fixture[static_cast<std::size_t>(i)];
    r.route_id = "r" + std::to_string(i);
    r.ability_id = "a";
    r.rc = r.ls = 1.0;
    r.es = es_values[i];
    r.ds = r.es;
    r.ethics_applicable = i < 2;
  }
  const auto es = aggregate_split(fixture, "Overall").overall.es;
  const bool fixture_ok = es && close_rel(*es, 0.9);
  return {mismatches == 0 && fixture_ok, std::to_string(kLedgerCases) + " ledgers, " + std::to_string(mismatches) +
                                             " mismatches at rel 1e-12; fixture ES " + (es ? fmt(*es) : "none")};
}

// ---------------------------------------------------------------------------
// Full-suite runs

struct SuiteRun {
  SuiteReport report;
  std::map<std::string, std::string> replays;
  double seconds = 0.0;
};

SuiteRun run_full(const std::vector<SuiteJob>& jobs, const std::string& agent, int parallelism, bool replays) {
  SuiteRun out;
  std::mutex m;
  SuiteRunOptions opts;
  opts.parallelism = parallelism;
  opts.episode.keep_replay = replays;
  if (replays) {
    opts.on_episode = [&](const EpisodeOutcome& o) {
      std::string text = write_replay(o.replay);
      std::lock_guard lock(m);
      out.replays[o.record.route_id] = std::move(text);
    };
  }
  const auto t0 = std::chrono::steady_clock::now();
  out.report = run_suite(jobs, [agent] { return make_builtin_agent(agent); }, opts);
  out.seconds = seconds_since(t0);
  return out;
}

const SuiteManifest& manifest() {
  static const SuiteManifest m = generate_suite();
  return m;
}

const std::vector<SuiteJob>& jobs() {
  static const std::vector<SuiteJob> j = suite_jobs(manifest());
  return j;
}

std::optional<SuiteRun> g_lawful;

Result determinism() {
  SuiteRun a = run_full(jobs(), "lawful_follower", 1, true);
  SuiteRun b = run_full(jobs(), "lawful_follower", 8, true);
  const bool reports_equal = json(a.report).dump() == json(b.report).dump();
  const bool replays_equal = a.replays == b.replays && a.replays.size() == jobs().size();
  const double slowest = std::max(a.seconds, b.seconds);
  g_lawful = std::move(a);
  std::ostringstream d;
  d << jobs().size() << " routes; parallelism 1 vs 8: reports " << (reports_equal ? "identical" : "DIFFER")
    << ", replays " << (replays_equal ? "identical" : "DIFFER") << "; slowest run " << std::fixed
    << std::setprecision(1) << slowest << " s (budget " << kSuiteBudgetSeconds << " s)";
  return {reports_equal && replays_equal && slowest < kSuiteBudgetSeconds, d.str()};
}

Result catalog_partition() {
  std::map<SetTag, int> per_set;
  for (const auto& a : ability_catalog()) ++per_set[a.set_tag];
  std::map<std::string, int> templates, routes;
  for (const auto& t : builtin_templates()) ++templates[t.ability_id];
  for (const auto& r : manifest().routes) ++routes[r.ability_id];
  std::vector<std::string> short_abilities;
  for (const auto& a : ability_catalog()) {
    if (templates[a.ability_id] < 1 || routes[a.ability_id] < 3) short_abilities.push_back(a.ability_id);
  }
  const bool ok = ability_catalog().size() == 30 && per_set[SetTag::Basic] == 11 && per_set[SetTag::Hard] == 10 &&
                  per_set[SetTag::Thorny] == 9 && short_abilities.empty();
  std::ostringstream d;
  d << ability_catalog().size() << " abilities (" << per_set[SetTag::Basic] << "/" << per_set[SetTag::Hard] << "/"
    << per_set[SetTag::Thorny] << "), " << builtin_templates().size() << " templates, " << manifest().routes.size()
    << " routes";
  for (const auto& s : short_abilities) d << "; under-covered " << s;
  return {ok, d.str()};
}

Result agent_ordering() {
  if (!g_lawful) g_lawful = run_full(jobs(), "lawful_follower", 1, false);
  const SuiteRun blind = run_full(jobs(), "ethics_blind", 1, false);
  const SuiteRun reckless = run_full(jobs(), "reckless", 1, false);
  const MetricMeans& l = g_lawful->report.splits.front().overall;
  const MetricMeans& b = blind.report.splits.front().overall;
  const MetricMeans& r = reckless.report.splits.front().overall;
  const bool ok = l.ds > b.ds && b.ds > r.ds && l.es && b.es && *b.es < *l.es;
  std::ostringstream d;
  d << std::setprecision(4) << "DS lawful " << l.ds << " > ethics_blind " << b.ds << " > reckless " << r.ds
    << "; ES ethics_blind " << b.es.value_or(-1) << " < lawful " << l.es.value_or(-1) << " over " << l.n_ethics
    << " ethics routes";
  return {ok, d.str()};
}

Result bounds_fuzz() {
  std::vector<SuiteJob> fuzz;
  const auto& base = jobs();
  for (int i = 0; i < kFuzzEpisodes; ++i) {
    SuiteJob j = base[static_cast<std::size_t>(i) % base.size()];
    j.seed = 1000003ULL * static_cast<std::uint64_t>(i + 1);
    fuzz.push_back(std::move(j));
  }
  SuiteRunOptions opts;
  opts.episode.keep_replay = false;
  const auto t0 = std::chrono::steady_clock::now();
  const SuiteReport rep = run_suite(fuzz, [] { return make_builtin_agent("random"); }, opts);
  int out_of_bounds = 0, invalid = 0;
  const auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  for (const auto& r : rep.records) {
    if (!r.valid) ++invalid;
    if (!in_unit(r.ds) || !in_unit(r.rc) || !in_unit(r.ls) || !in_unit(r.es)) ++out_of_bounds;
  }
  std::ostringstream d;
  d << rep.records.size() << " random-agent episodes in " << std::fixed << std::setprecision(1) << seconds_since(t0)
    << " s; " << out_of_bounds << " out of [0,1], " << invalid << " invalid";
  return {rep.records.size() == static_cast<std::size_t>(kFuzzEpisodes) && out_of_bounds == 0 && invalid == 0,
          d.str()};
}

Result rescore_identity() {
  const fs::path dir = fs::path(ROADJUDGE_SOURCE_DIR) / "tests" / "corpus";
  int n = 0, differ = 0;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".jsonl") continue;
    ++n;
    const EpisodeReplay r = parse_replay(read_text_file(entry.path()));
    if (!r.footer || json(score_replay(r)).dump() != json(r.footer->record).dump()) ++differ;
  }
  return {n > 0 && differ == 0, std::to_string(n) + " archived replays, " + std::to_string(differ) + " differ"};
}

}  // namespace

int main() {
  check("coefficient_exactness", coefficient_exactness);
  check("override_exactness", override_exactness);
  check("brake_relief_window", relief_window_property);
  check("score_oracle_equivalence", score_oracle);
  check("determinism", determinism);
  check("catalog_partition", catalog_partition);
  check("reference_agent_ordering", agent_ordering);
  check("bounds_fuzz", bounds_fuzz);
  check("rescore_identity", rescore_identity);
  std::printf("%d criteria failed\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
