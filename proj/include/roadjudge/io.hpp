#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "roadjudge/replay.hpp"
#include "roadjudge/suite.hpp"

namespace roadjudge {

namespace fs = std::filesystem;

inline constexpr int kReportSchemaVersion = 1;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string read_text_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot open '" + p.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Writes through a temporary sibling and renames, so readers never see half a file.
inline void write_text_file(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out << text;
    if (!out) throw IoError("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, p);
}

inline json read_json_file(const fs::path& p) {
  try {
    return json::parse(read_text_file(p));
  } catch (const json::parse_error& e) {
    throw IoError("'" + p.string() + "' is not valid JSON: " + e.what());
  }
}

inline std::string pretty(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Templates on disk: one <template_id>.json per template.

inline void save_templates(const fs::path& dir, const std::vector<ScenarioTemplate>& templates) {
  for (const auto& t : templates) write_text_file(dir / (t.template_id + ".json"), pretty(template_to_json(t)));
}

inline std::vector<ScenarioTemplate> load_templates(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("template directory '" + dir.string() + "' does not exist");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<ScenarioTemplate> out;
  for (const auto& f : files) {
    try {
      out.push_back(template_from_json(read_json_file(f)));
    } catch (const ConfigError& e) {
      throw ConfigError(f.filename().string() + ": " + e.what());
    }
  }
  if (out.empty()) throw IoError("no templates found in '" + dir.string() + "'");
  return out;
}

// ---------------------------------------------------------------------------
// Reports

inline json report_to_json(const SuiteReport& r, const std::string& suite_id = {}) {
  json j = r;
  j["schema_version"] = kReportSchemaVersion;
  j["suite_id"] = suite_id;
  return j;
}

/// Accepts a report file or a bare array of score records.
inline std::vector<ScoreRecord> records_from_json(const json& j) {
  if (j.is_array()) return j.get<std::vector<ScoreRecord>>();
  if (j.is_object() && j.contains("records")) {
    if (j.value("schema_version", kReportSchemaVersion) != kReportSchemaVersion) {
      throw ConfigError("unsupported report schema version " + j.at("schema_version").dump());
    }
    return j.at("records").get<std::vector<ScoreRecord>>();
  }
  throw ConfigError("expected a report object or an array of score records");
}

inline EpisodeReplay read_replay_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot open '" + p.string() + "'");
  return parse_replay(in);
}

inline fs::path replay_path(const fs::path& out_dir, const std::string& route_id) {
  return out_dir / "replays" / (route_id + ".jsonl");
}

}  // namespace roadjudge
