#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "roadjudge/catalog.hpp"
#include "roadjudge/harness.hpp"

namespace roadjudge {

inline constexpr int kManifestSchemaVersion = 1;

/// How routes and per-route seeds are derived from the template catalog.
struct SeedPolicy {
  std::uint64_t seed = 20250101;
  friend bool operator==(const SeedPolicy&, const SeedPolicy&) = default;
};

struct ManifestRoute {
  std::string route_id;
  std::string template_id;
  std::string ability_id;
  SetTag set_tag = SetTag::Basic;
  ParamValues params;  // fully resolved
  std::uint64_t seed = 0;
  bool ethics_applicable = false;
  friend bool operator==(const ManifestRoute&, const ManifestRoute&) = default;
};

struct SuiteManifest {
  int schema_version = kManifestSchemaVersion;
  std::string suite_id;
  SeedPolicy seed_policy;
  std::map<std::string, int> set_counts;
  std::vector<ManifestRoute> routes;
  friend bool operator==(const SuiteManifest&, const SuiteManifest&) = default;
};

inline void to_json(json& j, const SeedPolicy& p) { j = json{{"seed", p.seed}}; }
inline void from_json(const json& j, SeedPolicy& p) { j.at("seed").get_to(p.seed); }

inline void to_json(json& j, const ManifestRoute& r) {
  j = json{{"route_id", r.route_id}, {"template_id", r.template_id}, {"ability_id", r.ability_id},
           {"set_tag", r.set_tag},   {"params", r.params},           {"seed", r.seed},
           {"ethics_applicable", r.ethics_applicable}};
}
inline void from_json(const json& j, ManifestRoute& r) {
  j.at("route_id").get_to(r.route_id);
  j.at("template_id").get_to(r.template_id);
  j.at("ability_id").get_to(r.ability_id);
  r.set_tag = parse_set_tag(j.at("set_tag"));
  r.params = j.at("params").get<ParamValues>();
  j.at("seed").get_to(r.seed);
  j.at("ethics_applicable").get_to(r.ethics_applicable);
}

inline void to_json(json& j, const SuiteManifest& m) {
  j = json{{"schema_version", m.schema_version}, {"suite_id", m.suite_id}, {"seed_policy", m.seed_policy},
           {"set_counts", m.set_counts},         {"routes", m.routes}};
}
inline void from_json(const json& j, SuiteManifest& m) {
  j.at("schema_version").get_to(m.schema_version);
  if (m.schema_version != kManifestSchemaVersion) {
    throw ConfigError("unsupported manifest schema version " + std::to_string(m.schema_version));
  }
  j.at("suite_id").get_to(m.suite_id);
  j.at("seed_policy").get_to(m.seed_policy);
  j.at("set_counts").get_to(m.set_counts);
  j.at("routes").get_to(m.routes);
}

inline std::uint64_t route_seed(const SeedPolicy& policy, const std::string& route_id) {
  return splitmix64(policy.seed ^ fnv1a64(route_id));
}

inline std::string variant_route_id(const std::string& template_id, std::size_t variant) {
  return template_id + "_v" + std::to_string(variant);
}

/// One route per declared template variant, in catalog order.
inline SuiteManifest generate_suite(const SeedPolicy& policy = {},
                                    const std::vector<ScenarioTemplate>& templates = builtin_templates()) {
  SuiteManifest m;
  m.suite_id = "builtin-" + std::to_string(policy.seed);
  m.seed_policy = policy;
  for (const auto& tpl : templates) {
    const std::size_t n = std::max<std::size_t>(tpl.variants.size(), 1);
    for (std::size_t i = 0; i < n; ++i) {
      ManifestRoute r;
      r.route_id = variant_route_id(tpl.template_id, i);
      r.template_id = tpl.template_id;
      r.ability_id = tpl.ability_id;
      r.set_tag = tpl.set_tag;
      r.params = tpl.resolve_params(tpl.variants.empty() ? ParamValues{} : tpl.variants[i]);
      r.seed = route_seed(policy, r.route_id);
      r.ethics_applicable = instantiate_scenario(tpl, r.params, r.seed, r.route_id).route.ethics_applicable;
      ++m.set_counts[to_string(r.set_tag)];
      m.routes.push_back(std::move(r));
    }
  }
  return m;
}

/// Checks internal consistency of a manifest against a template set; throws ConfigError.
inline void validate_manifest(const SuiteManifest& m, const std::vector<ScenarioTemplate>& templates) {
  if (m.schema_version != kManifestSchemaVersion) {
    throw ConfigError("unsupported manifest schema version " + std::to_string(m.schema_version));
  }
  std::set<std::string> ids;
  std::map<std::string, int> counts;
  for (const auto& r : m.routes) {
    if (!ids.insert(r.route_id).second) throw ConfigError("duplicate route id '" + r.route_id + "'");
    const ScenarioTemplate* tpl = find_template(templates, r.template_id);
    if (!tpl) throw ConfigError("route '" + r.route_id + "': unknown template '" + r.template_id + "'");
    if (tpl->ability_id != r.ability_id || tpl->set_tag != r.set_tag) {
      throw ConfigError("route '" + r.route_id + "': ability or set tag disagrees with template");
    }
    tpl->resolve_params(r.params);
    ++counts[to_string(r.set_tag)];
  }
  if (counts != m.set_counts) throw ConfigError("manifest set counts do not match its routes");
}

/// Expands every manifest route into a runnable job.
inline std::vector<SuiteJob> suite_jobs(const SuiteManifest& m,
                                        const std::vector<ScenarioTemplate>& templates = builtin_templates()) {
  validate_manifest(m, templates);
  std::vector<SuiteJob> jobs;
  jobs.reserve(m.routes.size());
  for (const auto& r : m.routes) {
    const ScenarioTemplate& tpl = *find_template(templates, r.template_id);
    jobs.push_back({instantiate_scenario(tpl, r.params, r.seed, r.route_id), r.seed});
  }
  return jobs;
}

}  // namespace roadjudge
