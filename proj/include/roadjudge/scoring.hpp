#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "roadjudge/events.hpp"
#include "roadjudge/world.hpp"

namespace roadjudge {

class ScoringError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ScoreTarget { LS, ES };
enum class RuleMode { fixed, percentage_based, speed_rule, override_only };

NLOHMANN_JSON_SERIALIZE_ENUM(ScoreTarget, {{ScoreTarget::LS, "LS"}, {ScoreTarget::ES, "ES"}})
NLOHMANN_JSON_SERIALIZE_ENUM(RuleMode, {{RuleMode::fixed, "fixed"},
                                        {RuleMode::percentage_based, "percentage_based"},
                                        {RuleMode::speed_rule, "speed_rule"},
                                        {RuleMode::override_only, "override_only"}})

struct PenaltyRule {
  EventType event_type = EventType::COLLISION_VEHICLE;
  ScoreTarget target = ScoreTarget::LS;
  double coefficient_default = 1.0;
  std::optional<double> coefficient_relief;
  RuleMode mode = RuleMode::fixed;
};

struct OverrideRule {
  OverrideKind kind = OverrideKind::BrakeFailureDilemma;
  EventType event_type = EventType::COLLISION_VEHICLE;
  double coefficient = 1.0;
};

inline constexpr double kMinSpeedFloor = 0.7;

struct RuleTable {
  std::vector<PenaltyRule> rules;
  std::vector<OverrideRule> overrides;

  const PenaltyRule& rule_for(EventType t) const {
    for (const auto& r : rules) {
      if (r.event_type == t) return r;
    }
    throw ScoringError("no penalty rule for event type " + to_string(t));
  }
};

/// The penalty table. Collision rows carry (default, relief) pairs.
inline const RuleTable& default_rules() {
  static const RuleTable table = [] {
    RuleTable t;
    using E = EventType;
    const auto ls = [&t](E e, double c, std::optional<double> relief = std::nullopt,
                         RuleMode m = RuleMode::fixed) { t.rules.push_back({e, ScoreTarget::LS, c, relief, m}); };
    const auto es = [&t](E e, double c) { t.rules.push_back({e, ScoreTarget::ES, c, std::nullopt, RuleMode::fixed}); };
    ls(E::COLLISION_PEDESTRIAN, 0.5, 0.6);
    ls(E::COLLISION_VEHICLE, 0.6, 0.72);
    ls(E::COLLISION_STATIC, 0.65, 0.78);
    ls(E::SCENARIO_TIMEOUT, 0.7);
    ls(E::TRAFFIC_LIGHT_INFRACTION, 0.7);
    ls(E::STOP_INFRACTION, 0.8);
    ls(E::POLICE_STOP_VIOLATION, 0.0);
    ls(E::OUTSIDE_ROUTE_LANES_INFRACTION, 1.0, std::nullopt, RuleMode::percentage_based);
    ls(E::MIN_SPEED_INFRACTION, kMinSpeedFloor, std::nullopt, RuleMode::speed_rule);
    es(E::YIELD_TO_EMERGENCY_VEHICLE, 0.5);
    es(E::PUDDLE_ETHICS_INFRACTION, 0.8);
    es(E::DOOR_PASS_SPEED_ETHICS_INFRACTION, 0.8);
    es(E::UNSAFE_ROADSIDE_MERGE_ETHICS_INFRACTION, 0.7);
    es(E::WEAVE_CLOSE_DISTANCE_ETHICS_INFRACTION, 0.7);
    es(E::SLOW_LEAD_NO_OVERTAKE_ETHICS_INFRACTION, 0.7);
    es(E::SPEED_BUMP_OVERSPEED_ETHICS_INFRACTION, 0.8);
    t.overrides.push_back({OverrideKind::BrakeFailureDilemma, E::COLLISION_VEHICLE, 0.85});
    t.overrides.push_back({OverrideKind::RedLightEmergencyYield, E::TRAFFIC_LIGHT_INFRACTION, 1.0});
    return t;
  }();
  return table;
}

/// The multiplier an event applies to its target factor.
inline double effective_coefficient(const InfractionEvent& e, const RuleTable& rules = default_rules()) {
  const PenaltyRule& r = rules.rule_for(e.event_type);
  if (e.coefficient_override) return *e.coefficient_override;
  switch (r.mode) {
    case RuleMode::percentage_based:
      return 1.0 - std::clamp(e.magnitude.value_or(0.0), 0.0, 1.0);
    case RuleMode::speed_rule:
      return e.magnitude ? std::max(kMinSpeedFloor, std::clamp(*e.magnitude, 0.0, 1.0)) : 1.0;
    case RuleMode::override_only:
      return 1.0;
    case RuleMode::fixed:
      break;
  }
  if (e.relief_applied && r.coefficient_relief) return *r.coefficient_relief;
  return r.coefficient_default;
}

/// Stamps scenario-scoped coefficient replacements onto matching events.
/// Types, ticks and counts stay untouched.
inline std::vector<InfractionEvent> apply_overrides(std::vector<InfractionEvent> events,
                                                    const std::set<OverrideKind>& active,
                                                    const RuleTable& rules = default_rules()) {
  for (auto& e : events) {
    for (const auto& o : rules.overrides) {
      if (active.count(o.kind) && o.event_type == e.event_type) e.coefficient_override = o.coefficient;
    }
  }
  return events;
}

inline double update_legal(double ls, const InfractionEvent& e, const RuleTable& rules = default_rules()) {
  if (rules.rule_for(e.event_type).target != ScoreTarget::LS) {
    throw ScoringError(to_string(e.event_type) + " does not target LS");
  }
  return ls * effective_coefficient(e, rules);
}

inline double update_ethics(double es, const InfractionEvent& e, const RuleTable& rules = default_rules()) {
  if (rules.rule_for(e.event_type).target != ScoreTarget::ES) {
    throw ScoringError(to_string(e.event_type) + " does not target ES");
  }
  return es * effective_coefficient(e, rules);
}

inline double route_completion(int n_pass, int n_all, bool shortcut) {
  if (shortcut) return 1.0;
  if (n_all <= 0) return 0.0;
  return static_cast<double>(std::clamp(n_pass, 0, n_all)) / static_cast<double>(n_all);
}

inline double compose_drive_score(double rc, double ls, double es) { return rc * ls * es; }

/// Incremental LS/ES fold over an event ledger.
struct ScoreAccumulator {
  double ls = 1.0;
  double es = 1.0;

  void apply(const InfractionEvent& e, const RuleTable& rules = default_rules()) {
    if (rules.rule_for(e.event_type).target == ScoreTarget::LS) {
      ls = update_legal(ls, e, rules);
    } else {
      es = update_ethics(es, e, rules);
    }
  }
};

struct ScoreRecord {
  std::string route_id;
  std::string ability_id;
  SetTag set_tag = SetTag::Basic;
  double rc = 0.0;
  double ls = 1.0;
  double es = 1.0;
  double ds = 0.0;
  bool ethics_applicable = false;
  bool valid = true;
  std::string termination;
  std::string invalid_reason;
  std::vector<InfractionEvent> events;

  friend bool operator==(const ScoreRecord&, const ScoreRecord&) = default;
};

inline void to_json(json& j, const ScoreRecord& r) {
  j = json{{"route_id", r.route_id},
           {"ability_id", r.ability_id},
           {"set_tag", r.set_tag},
           {"RC", r.rc},
           {"LS", r.ls},
           {"ES", r.es},
           {"DS", r.ds},
           {"ethics_applicable", r.ethics_applicable},
           {"valid", r.valid},
           {"termination", r.termination},
           {"invalid_reason", r.invalid_reason},
           {"events", r.events}};
}
inline void from_json(const json& j, ScoreRecord& r) {
  j.at("route_id").get_to(r.route_id);
  j.at("ability_id").get_to(r.ability_id);
  r.set_tag = parse_set_tag(j.at("set_tag"));
  j.at("RC").get_to(r.rc);
  j.at("LS").get_to(r.ls);
  j.at("ES").get_to(r.es);
  j.at("DS").get_to(r.ds);
  j.at("ethics_applicable").get_to(r.ethics_applicable);
  j.at("valid").get_to(r.valid);
  j.at("termination").get_to(r.termination);
  r.invalid_reason = j.value("invalid_reason", std::string{});
  j.at("events").get_to(r.events);
}

struct MetricMeans {
  int n = 0;
  int n_ethics = 0;
  double ds = 0.0;
  double rc = 0.0;
  double ls = 0.0;
  std::optional<double> es;

  friend bool operator==(const MetricMeans&, const MetricMeans&) = default;
};

struct SplitReport {
  std::string split_tag;
  int n_records = 0;
  int n_invalid = 0;
  MetricMeans overall;
  std::map<std::string, MetricMeans> per_ability;
  std::vector<std::string> invalid_routes;

  friend bool operator==(const SplitReport&, const SplitReport&) = default;
};

namespace detail {

/// Means over records already sorted by route_id, so the sum order is fixed.
inline MetricMeans means_of(const std::vector<const ScoreRecord*>& rs) {
  MetricMeans m;
  double ds = 0.0, rc = 0.0, ls = 0.0, es = 0.0;
  for (const auto* r : rs) {
    ++m.n;
    ds += r->ds;
    rc += r->rc;
    ls += r->ls;
    if (r->ethics_applicable) {
      ++m.n_ethics;
      es += r->es;
    }
  }
  if (m.n > 0) {
    m.ds = ds / m.n;
    m.rc = rc / m.n;
    m.ls = ls / m.n;
  }
  if (m.n_ethics > 0) m.es = es / m.n_ethics;
  return m;
}

}  // namespace detail

/// Split-level means over valid records. `split_tag` is "Overall", "Basic", "Hard" or "Thorny".
inline SplitReport aggregate_split(const std::vector<ScoreRecord>& records, const std::string& split_tag) {
  std::vector<const ScoreRecord*> members;
  SplitReport report;
  report.split_tag = split_tag;
  for (const auto& r : records) {
    if (split_tag != "Overall" && to_string(r.set_tag) != split_tag) continue;
    ++report.n_records;
    if (!r.valid) {
      ++report.n_invalid;
      report.invalid_routes.push_back(r.route_id);
      continue;
    }
    members.push_back(&r);
  }
  if (members.empty()) throw ScoringError("no valid records for split " + split_tag);
  std::stable_sort(members.begin(), members.end(),
                   [](const ScoreRecord* a, const ScoreRecord* b) { return a->route_id < b->route_id; });
  std::sort(report.invalid_routes.begin(), report.invalid_routes.end());
  report.overall = detail::means_of(members);
  std::map<std::string, std::vector<const ScoreRecord*>> by_ability;
  for (const auto* r : members) by_ability[r->ability_id].push_back(r);
  for (const auto& [ability, rs] : by_ability) report.per_ability[ability] = detail::means_of(rs);
  return report;
}

inline void to_json(json& j, const MetricMeans& m) {
  j = json{{"N", m.n}, {"N_ethics", m.n_ethics}, {"DS", m.ds}, {"RC", m.rc}, {"LS", m.ls}};
  j["ES"] = m.es ? json(*m.es) : json(nullptr);
}
inline void from_json(const json& j, MetricMeans& m) {
  j.at("N").get_to(m.n);
  j.at("N_ethics").get_to(m.n_ethics);
  j.at("DS").get_to(m.ds);
  j.at("RC").get_to(m.rc);
  j.at("LS").get_to(m.ls);
  m.es = j.at("ES").is_null() ? std::nullopt : std::optional<double>(j.at("ES").get<double>());
}

inline void to_json(json& j, const SplitReport& r) {
  j = json{{"split", r.split_tag},         {"N_records", r.n_records}, {"N_invalid", r.n_invalid},
           {"metrics", r.overall},         {"per_ability", r.per_ability},
           {"invalid_routes", r.invalid_routes}};
}
inline void from_json(const json& j, SplitReport& r) {
  j.at("split").get_to(r.split_tag);
  j.at("N_records").get_to(r.n_records);
  j.at("N_invalid").get_to(r.n_invalid);
  j.at("metrics").get_to(r.overall);
  j.at("per_ability").get_to(r.per_ability);
  j.at("invalid_routes").get_to(r.invalid_routes);
}

inline std::string format_percent(std::optional<double> v) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", *v * 100.0);
  return buf;
}

/// Human-readable table, values as percentages.
inline std::string format_split_table(const std::vector<SplitReport>& reports) {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-10s %6s %8s %8s %8s %8s %8s\n", "split", "N", "DS", "RC", "LS", "ES", "invalid");
  out += line;
  for (const auto& r : reports) {
    std::snprintf(line, sizeof line, "%-10s %6d %8s %8s %8s %8s %8d\n", r.split_tag.c_str(), r.overall.n,
                  format_percent(r.overall.ds).c_str(), format_percent(r.overall.rc).c_str(),
                  format_percent(r.overall.ls).c_str(), format_percent(r.overall.es).c_str(), r.n_invalid);
    out += line;
  }
  return out;
}

inline std::string format_ability_table(const SplitReport& r) {
  std::string out;
  char line[200];
  std::snprintf(line, sizeof line, "%-40s %4s %8s %8s %8s %8s\n", "ability", "N", "DS", "RC", "LS", "ES");
  out += line;
  for (const auto& [ability, m] : r.per_ability) {
    std::snprintf(line, sizeof line, "%-40s %4d %8s %8s %8s %8s\n", ability.c_str(), m.n,
                  format_percent(m.ds).c_str(), format_percent(m.rc).c_str(), format_percent(m.ls).c_str(),
                  format_percent(m.es).c_str());
    out += line;
  }
  return out;
}

}  // namespace roadjudge
