#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "shieldup/content/parse.hpp"

namespace shieldup {

struct CoverageReport {
  std::map<Tactic, int> scenarios_per_tactic;
  std::map<int, int> scenarios_per_level;
  std::vector<Tactic> uncovered_tactics;
  std::vector<int> empty_levels;
  int scenario_count = 0;

  bool clean() const { return uncovered_tactics.empty() && empty_levels.empty(); }

  int tactics_covered() const {
    return static_cast<int>(scenarios_per_tactic.size() - uncovered_tactics.size());
  }
  int levels_covered() const { return static_cast<int>(scenarios_per_level.size() - empty_levels.size()); }

  json to_json() const {
    json tactics = json::object();
    for (const auto& [t, n] : scenarios_per_tactic) tactics[std::string(name_of(t))] = n;
    json levels = json::object();
    for (const auto& [l, n] : scenarios_per_level) levels[std::to_string(l)] = n;
    json uncovered = json::array();
    for (Tactic t : uncovered_tactics) uncovered.push_back(name_of(t));
    return {{"scenarios", scenario_count},
            {"tactics", tactics},
            {"levels", levels},
            {"uncovered_tactics", uncovered},
            {"empty_levels", empty_levels},
            {"clean", clean()}};
  }
};

// Report-only pass over a corpus: per-tactic and per-level scenario counts,
// with flags for any tactic or level that nothing exercises.
inline CoverageReport lint_corpus(std::span<const ScenarioGraph> corpus) {
  CoverageReport report;
  report.scenario_count = static_cast<int>(corpus.size());
  for (Tactic t : all_values<Tactic>()) report.scenarios_per_tactic[t] = 0;
  for (int level = 1; level <= 3; ++level) report.scenarios_per_level[level] = 0;
  for (const auto& g : corpus) {
    for (Tactic t : g.tactics_used()) ++report.scenarios_per_tactic[t];
    ++report.scenarios_per_level[g.level];
  }
  for (const auto& [t, n] : report.scenarios_per_tactic) {
    if (n == 0) report.uncovered_tactics.push_back(t);
  }
  for (const auto& [l, n] : report.scenarios_per_level) {
    if (n == 0) report.empty_levels.push_back(l);
  }
  return report;
}

using ScenarioPath = std::vector<NodeId>;

// All root-to-terminal paths, in choice order.
inline std::vector<ScenarioPath> scenario_paths(const ScenarioGraph& g) {
  std::vector<ScenarioPath> paths;
  ScenarioPath current;
  auto walk = [&](auto&& self, const NodeId& id) -> void {
    current.push_back(id);
    const Node& n = g.node(id);
    if (n.terminal()) {
      paths.push_back(current);
    } else {
      for (const auto& c : n.choices) self(self, c.target);
    }
    current.pop_back();
  };
  walk(walk, g.root);
  return paths;
}

inline std::size_t longest_path_length(const ScenarioGraph& g) {
  std::size_t longest = 0;
  for (const auto& p : scenario_paths(g)) longest = std::max(longest, p.size());
  return longest;
}

}  // namespace shieldup
