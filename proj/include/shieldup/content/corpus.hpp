#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "shieldup/content/coverage.hpp"
#include "shieldup/content/parse.hpp"
#include "shieldup/content/taxonomy.hpp"

namespace shieldup {

namespace fs = std::filesystem;

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, path.string(), "cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const fs::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::Io, path.string(), "cannot open for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(Errc::Io, path.string(), "write failed");
}

struct FileDiagnostic {
  std::string file;
  Errc code;
  std::string subject;
  std::string message;
};

struct Corpus {
  std::optional<Taxonomy> taxonomy;
  std::vector<ScenarioGraph> scenarios;  // sorted by id
  std::vector<FileDiagnostic> failures;

  const ScenarioGraph* find(std::string_view id) const {
    for (const auto& g : scenarios) {
      if (g.id == id) return &g;
    }
    return nullptr;
  }
};

// Corpus layout: <dir>/taxonomy.json (optional) and one scenario per file in
// <dir>/scenarios/*.json. Files that fail to parse are collected as
// diagnostics instead of aborting the load.
inline Corpus load_corpus(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(Errc::Io, dir.string(), "not a directory");
  Corpus corpus;
  auto record_failure = [&](const fs::path& file, const Error& e) {
    corpus.failures.push_back({file.filename().string(), e.code(), e.subject(), e.what()});
  };

  const fs::path taxonomy_path = dir / "taxonomy.json";
  if (fs::exists(taxonomy_path)) {
    try {
      corpus.taxonomy = Taxonomy::parse(read_file(taxonomy_path));
    } catch (const Error& e) {
      record_failure(taxonomy_path, e);
    }
  }

  const fs::path scenario_dir = dir / "scenarios";
  if (!fs::is_directory(scenario_dir)) return corpus;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(scenario_dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    try {
      ScenarioGraph g = parse_scenario(read_file(file));
      if (corpus.find(g.id)) throw Error(Errc::Schema, "id", "duplicate scenario id '" + g.id + "'");
      corpus.scenarios.push_back(std::move(g));
    } catch (const Error& e) {
      record_failure(file, e);
    }
  }
  std::sort(corpus.scenarios.begin(), corpus.scenarios.end(),
            [](const ScenarioGraph& a, const ScenarioGraph& b) { return a.id < b.id; });
  return corpus;
}

}  // namespace shieldup
