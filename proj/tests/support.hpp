#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "shieldup/content/corpus.hpp"
#include "shieldup/core/random.hpp"
#include "shieldup/engine/session.hpp"

namespace testing_support {

inline std::filesystem::path source_dir() { return SHIELDUP_SOURCE_DIR; }
inline std::filesystem::path corpus_dir() { return source_dir() / "corpus"; }
inline std::filesystem::path fixtures_dir() { return source_dir() / "tests" / "fixtures"; }

inline std::string read_text(const std::filesystem::path& p) { return shieldup::read_file(p); }

inline const shieldup::Corpus& demo_corpus() {
  static const shieldup::Corpus corpus = shieldup::load_corpus(corpus_dir());
  return corpus;
}

// Adjacency straight from a scenario file's JSON, bypassing the parser.
inline std::map<std::string, std::vector<std::string>> raw_adjacency(const nlohmann::json& doc) {
  std::map<std::string, std::vector<std::string>> adj;
  for (const auto& [id, node] : doc.at("nodes").items()) {
    auto& out = adj[id];
    if (node.contains("choices")) {
      for (const auto& c : node.at("choices")) out.push_back(c.at("target").get<std::string>());
    }
  }
  return adj;
}

struct WalkResult {
  shieldup::SessionState live;
  std::size_t steps = 0;
};

// Uniformly random choices from the root until the session completes or
// `max_steps` choices have been made.
inline WalkResult random_walk(const shieldup::ScenarioGraph& g, shieldup::RandomStream& rng, std::size_t max_steps,
                              shieldup::Timestamp start = {}) {
  using namespace shieldup;
  WalkResult w;
  w.live = start_session({"walk", "P000001", start}, g, LadderState{"P000001", kMaxLevel, {}});
  while (!w.live.completed() && w.steps < max_steps) {
    const auto& choices = g.node(w.live.current_node).choices;
    const auto& c = choices[rng.below(choices.size())];
    w.live = apply_choice(g, w.live, c.id, start + std::chrono::seconds(static_cast<long>(w.steps + 1)));
    ++w.steps;
  }
  return w;
}

}  // namespace testing_support

#include "shieldup/psychometrics/response_matrix.hpp"
#include "shieldup/simulation/cohort.hpp"
#include "shieldup/simulation/pilot.hpp"

namespace testing_support {

// One-factor 2PL correctness matrix generated through the simulation
// module's responder: every item is keyed "scam" so the scam ability drives
// all of them.
inline shieldup::ResponseMatrix simulate_2pl(const std::vector<shieldup::IrtItemParams>& params, int n,
                                             std::uint64_t seed) {
  using namespace shieldup;
  std::vector<std::pair<SdatItem, IrtItemParams>> items;
  std::vector<std::string> ids;
  for (std::size_t j = 0; j < params.size(); ++j) {
    SdatItem it;
    it.item_id = "I" + std::to_string(100 + j);
    it.is_scam = true;
    ids.push_back(it.item_id);
    items.emplace_back(std::move(it), params[j]);
  }
  Eigen::MatrixXd cells(n, static_cast<Eigen::Index>(params.size()));
  for (int i = 0; i < n; ++i) {
    RandomStream rng = RandomStream::derive(seed, static_cast<std::uint64_t>(i), "irt-test");
    const double theta = rng.normal();
    const auto rs = sim::respond_2pl(theta, theta, items, rng);
    for (std::size_t j = 0; j < rs.size(); ++j) {
      cells(i, static_cast<Eigen::Index>(j)) = rs[j].discernment == Discernment::Scam ? 1.0 : 0.0;
    }
  }
  return ResponseMatrix(std::move(cells), std::move(ids));
}

// Two-factor pilot over the default ten-storyline bank.
inline shieldup::sim::PilotConfig bank_pilot(int n, std::uint64_t seed) {
  shieldup::sim::PilotConfig cfg;
  cfg.n = n;
  cfg.seed = seed;
  for (const auto& b : shieldup::sim::default_item_bank()) {
    cfg.items.push_back({b.storyline_id, b.storyline_id, b.is_scam, b.params});
  }
  return cfg;
}

inline const std::vector<shieldup::IrtItemParams>& recovery_bank() {
  static const std::vector<shieldup::IrtItemParams> bank{{1.5, 0.5}, {1.0, -1.0}, {1.2, -0.5}, {1.8, 0.0},
                                                         {1.3, 0.8}, {1.0, -0.2}, {1.6, 0.3}, {1.4, -0.7},
                                                         {1.2, 0.6}, {1.7, 0.1}};
  return bank;
}

}  // namespace testing_support

#include "shieldup/analysis/dataset.hpp"
#include "shieldup/simulation/virtual_trial.hpp"

namespace testing_support {

inline std::vector<shieldup::ExportRow> simulated_export(const shieldup::sim::CohortConfig& cfg) {
  const auto t = shieldup::sim::run_virtual_trial(cfg);
  return shieldup::parse_export_csv(shieldup::export_dataset(t.log));
}

inline shieldup::sim::CohortConfig cohort(std::uint64_t seed, int n = 3000) {
  auto cfg = shieldup::sim::default_cohort_config();
  cfg.seed = seed;
  cfg.n = n;
  return cfg;
}

}  // namespace testing_support
