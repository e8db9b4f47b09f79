// roadjudge command-line entry point: catalog, generate, run, rescore, report.

#include <cstdlib>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "roadjudge/io.hpp"
#include "roadjudge/protocol.hpp"

using namespace roadjudge;

namespace {

constexpr int kExitInvalidInput = 2;
constexpr int kExitMismatch = 3;

struct InvalidInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

fs::path default_out_dir() {
  if (const char* env = std::getenv("ROADJUDGE_OUT"); env && *env) return env;
  return "roadjudge_out";
}

std::vector<ScenarioTemplate> templates_from(const std::string& dir) {
  return dir.empty() ? builtin_templates() : load_templates(dir);
}

/// Builds the agent factory for "builtin:<name>" or "external:<host:port>".
struct AgentSpec {
  AgentFactory factory;
  std::unique_ptr<TcpListener> listener;
};

AgentSpec make_agent_spec(const std::string& spec, int deadline_ms) {
  AgentSpec out;
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? std::string{} : spec.substr(colon + 1);
  if (kind == "builtin") {
    make_builtin_agent(arg);  // validates the name
    out.factory = [arg] { return make_builtin_agent(arg); };
  } else if (kind == "external") {
    out.listener = std::make_unique<TcpListener>(parse_endpoint(arg));
    std::cerr << "waiting for agents on port " << out.listener->port() << '\n';
    auto* listener = out.listener.get();
    out.factory = [listener, spec, deadline_ms] {
      ExternalAgentOptions o;
      o.action_deadline = std::chrono::milliseconds(deadline_ms);
      return std::make_unique<ExternalAgent>(spec, *listener, o);
    };
  } else {
    throw InvalidInput("agent must be builtin:<name> or external:<host:port>, got '" + spec + "'");
  }
  return out;
}

void print_splits(const SuiteReport& rep) {
  std::cout << "agent: " << rep.agent << "\n\n" << format_split_table(rep.splits);
  if (!rep.splits.empty()) std::cout << '\n' << format_ability_table(rep.splits.front());
}

// ---------------------------------------------------------------------------

int cmd_catalog(bool as_json, const std::string& export_dir, const std::string& template_dir) {
  const auto templates = templates_from(template_dir);
  if (!export_dir.empty()) {
    save_templates(export_dir, templates);
    std::cerr << "wrote " << templates.size() << " templates to " << export_dir << '\n';
    return 0;
  }
  std::map<std::string, std::vector<std::string>> by_ability;
  for (const auto& t : templates) by_ability[t.ability_id].push_back(t.template_id);
  if (as_json) {
    json j = json::array();
    for (const auto& a : ability_catalog()) {
      j.push_back({{"ability_id", a.ability_id},
                   {"set_tag", a.set_tag},
                   {"title", a.title},
                   {"description", a.description},
                   {"templates", by_ability[a.ability_id]}});
    }
    std::cout << pretty(j);
    return 0;
  }
  for (const SetTag tag : {SetTag::Basic, SetTag::Hard, SetTag::Thorny}) {
    std::cout << to_string(tag) << '\n';
    for (const auto& a : ability_catalog()) {
      if (a.set_tag != tag) continue;
      std::cout << "  " << a.ability_id << " (" << by_ability[a.ability_id].size() << " templates): " << a.title
                << '\n';
    }
  }
  return 0;
}

int cmd_generate(std::uint64_t seed, const std::string& out, const std::string& template_dir) {
  const auto manifest = generate_suite(SeedPolicy{seed}, templates_from(template_dir));
  const std::string text = pretty(manifest);
  if (out.empty()) {
    std::cout << text;
  } else {
    write_text_file(out, text);
    std::cerr << "wrote " << manifest.routes.size() << " routes to " << out << '\n';
  }
  return 0;
}

struct RunArgs {
  std::string manifest;
  std::vector<std::string> routes;
  std::string agent = "builtin:lawful_follower";
  std::uint64_t seed = SeedPolicy{}.seed;
  int parallel = 1;
  std::string out;
  std::string template_dir;
  bool no_replays = false;
  int deadline_ms = static_cast<int>(kDefaultActionDeadline.count());
};

int cmd_run(const RunArgs& a) {
  const auto templates = templates_from(a.template_dir);
  SuiteManifest manifest =
      a.manifest.empty() ? generate_suite(SeedPolicy{a.seed}, templates) : read_json_file(a.manifest).get<SuiteManifest>();
  if (!a.routes.empty()) {
    std::vector<ManifestRoute> keep;
    for (const auto& id : a.routes) {
      const auto it = std::find_if(manifest.routes.begin(), manifest.routes.end(),
                                   [&](const ManifestRoute& r) { return r.route_id == id; });
      if (it == manifest.routes.end()) throw InvalidInput("route '" + id + "' is not in the suite");
      keep.push_back(*it);
    }
    manifest.routes = std::move(keep);
    manifest.set_counts.clear();
    for (const auto& r : manifest.routes) ++manifest.set_counts[to_string(r.set_tag)];
  }
  const auto jobs = suite_jobs(manifest, templates);
  if (a.parallel < 1) throw InvalidInput("--parallel must be at least 1");
  AgentSpec agent = make_agent_spec(a.agent, a.deadline_ms);

  const fs::path out_dir = a.out.empty() ? default_out_dir() : fs::path(a.out);
  fs::create_directories(out_dir);
  SuiteRunOptions opts;
  opts.parallelism = a.parallel;
  opts.episode.keep_replay = !a.no_replays;
  std::mutex log_mutex;
  opts.on_episode = [&](const EpisodeOutcome& o) {
    if (!a.no_replays) write_text_file(replay_path(out_dir, o.record.route_id), write_replay(o.replay));
    std::lock_guard lock(log_mutex);
    std::cerr << o.record.route_id << ": DS " << o.record.ds << " (" << o.record.termination << ")\n";
  };
  const SuiteReport rep = run_suite(jobs, agent.factory, opts);
  write_text_file(out_dir / "report.json", pretty(report_to_json(rep, manifest.suite_id)));
  write_text_file(out_dir / "manifest.json", pretty(manifest));
  print_splits(rep);
  return 0;
}

int cmd_rescore(const std::vector<std::string>& files, const std::string& out) {
  std::vector<ScoreRecord> records;
  std::string agent;
  int mismatches = 0;
  for (const auto& f : files) {
    EpisodeReplay replay;
    try {
      replay = read_replay_file(f);
    } catch (const ReplayIntegrityError& e) {
      throw InvalidInput(f + ": " + e.what());
    }
    ScoreRecord r = score_replay(replay);
    if (replay.footer && !(replay.footer->record == r)) {
      ++mismatches;
      std::cerr << f << ": rescored record differs from the recorded footer\n";
    }
    if (agent.empty()) agent = replay.header.agent.name;
    records.push_back(std::move(r));
  }
  const SuiteReport rep = make_suite_report(agent, std::move(records));
  if (!out.empty()) write_text_file(out, pretty(report_to_json(rep)));
  print_splits(rep);
  return mismatches ? kExitMismatch : 0;
}

int cmd_report(const std::vector<std::string>& files, const std::string& out, bool as_json) {
  std::vector<ScoreRecord> records;
  std::set<std::string> seen;
  std::string agent;
  for (const auto& f : files) {
    const json j = read_json_file(f);
    const std::string file_agent = j.is_object() ? j.value("agent", std::string{}) : std::string{};
    if (agent.empty()) {
      agent = file_agent;
    } else if (!file_agent.empty() && file_agent != agent) {
      throw InvalidInput(f + ": agent '" + file_agent + "' differs from '" + agent + "'; merge one agent at a time");
    }
    for (auto& r : records_from_json(j)) {
      if (!seen.insert(r.route_id).second) throw InvalidInput(f + ": route '" + r.route_id + "' appears twice");
      records.push_back(std::move(r));
    }
  }
  const SuiteReport rep = make_suite_report(agent, std::move(records));
  if (!out.empty()) write_text_file(out, pretty(report_to_json(rep)));
  if (as_json) {
    std::cout << pretty(report_to_json(rep));
  } else {
    print_splits(rep);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"roadjudge: closed-loop driving scenario evaluation"};
  app.require_subcommand(1);

  std::string template_dir;
  app.add_option("--templates", template_dir, "Load scenario templates from a directory instead of the built-ins");

  bool catalog_json = false;
  std::string export_dir;
  auto* catalog = app.add_subcommand("catalog", "List abilities and templates");
  catalog->add_flag("--json", catalog_json, "Machine-readable output");
  catalog->add_option("--export", export_dir, "Write one JSON file per template into this directory");

  std::uint64_t gen_seed = SeedPolicy{}.seed;
  std::string gen_out;
  auto* generate = app.add_subcommand("generate", "Emit a suite manifest");
  generate->add_option("--seed", gen_seed, "Suite seed");
  generate->add_option("--out", gen_out, "Output file (default: stdout)");

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "Run a suite or selected routes");
  run->add_option("--manifest", run_args.manifest, "Suite manifest (default: generated from --seed)");
  run->add_option("--route", run_args.routes, "Run only these route ids");
  run->add_option("--agent", run_args.agent, "builtin:<name> or external:<host:port>");
  run->add_option("--seed", run_args.seed, "Suite seed when no manifest is given");
  run->add_option("--parallel", run_args.parallel, "Concurrent episodes");
  run->add_option("--out", run_args.out, "Output directory (default: $ROADJUDGE_OUT or ./roadjudge_out)");
  run->add_option("--deadline-ms", run_args.deadline_ms, "Per-tick action deadline for external agents");
  run->add_flag("--no-replays", run_args.no_replays, "Skip writing replay logs");

  std::vector<std::string> rescore_files;
  std::string rescore_out;
  auto* rescore = app.add_subcommand("rescore", "Recompute scores from replay logs");
  rescore->add_option("replays", rescore_files, "Replay files")->required()->check(CLI::ExistingFile);
  rescore->add_option("--out", rescore_out, "Write the report here");

  std::vector<std::string> report_files;
  std::string report_out;
  bool report_json = false;
  auto* report = app.add_subcommand("report", "Merge record or report files into split tables");
  report->add_option("files", report_files, "Report or record files")->required()->check(CLI::ExistingFile);
  report->add_option("--out", report_out, "Write the merged report here");
  report->add_flag("--json", report_json, "Print JSON instead of tables");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInvalidInput;
  }

  try {
    if (*catalog) return cmd_catalog(catalog_json, export_dir, template_dir);
    if (*generate) return cmd_generate(gen_seed, gen_out, template_dir);
    run_args.template_dir = template_dir;
    if (*run) return cmd_run(run_args);
    if (*rescore) return cmd_rescore(rescore_files, rescore_out);
    if (*report) return cmd_report(report_files, report_out, report_json);
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const json::exception& e) {
    std::cerr << "error: malformed input: " << e.what() << '\n';
    return kExitInvalidInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
