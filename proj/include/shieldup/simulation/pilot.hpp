#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "shieldup/sdat/response_csv.hpp"
#include "shieldup/simulation/cohort.hpp"

namespace shieldup::sim {

struct PilotItem {
  std::string item_id;
  std::string storyline_id;
  bool is_scam = true;
  IrtItemParams params;
};

// Candidate pool administered once to a calibration sample.
struct PilotConfig {
  int n = 360;
  std::uint64_t seed = 7;
  double factor_correlation = 0.0;
  std::vector<PilotItem> items;

  void validate() const {
    if (n < 3) throw Error(Errc::InvalidConfig, "n", "at least 3 respondents");
    if (!(std::abs(factor_correlation) < 1.0)) throw Error(Errc::InvalidConfig, "factor_correlation", "must be in (-1,1)");
    if (items.size() < 2) throw Error(Errc::InvalidConfig, "items", "at least 2 items");
    for (const auto& it : items) {
      if (it.item_id.empty()) throw Error(Errc::InvalidConfig, "items", "item_id required");
      if (!(it.params.a > 0.0) || !std::isfinite(it.params.b)) {
        throw Error(Errc::InvalidConfig, "items." + it.item_id, "a must be positive and b finite");
      }
    }
  }
};

// 23 candidates: 12 scam and 11 genuine, discrimination spread from weak to
// strong so selection has something to choose between.
inline PilotConfig default_pilot_config() {
  PilotConfig cfg;
  static constexpr double kA[] = {0.6, 1.9, 1.1, 2.2, 0.8, 1.5, 0.5, 1.7, 1.3, 0.7, 2.0, 1.0,
                                  1.8, 0.6, 1.4, 2.1, 0.9, 1.6, 0.5, 1.2, 2.3, 0.8, 1.5};
  static constexpr double kB[] = {-0.8, -0.3, 0.2, -0.5, 0.6, 0.0, -1.0, 0.4, -0.2, 0.9, -0.6, 0.3,
                                  -0.4, 0.7, -0.1, 0.1, -0.7, 0.5, 0.8, -0.9, -0.2, 0.0, 0.3};
  for (int i = 0; i < 23; ++i) {
    char id[8];
    std::snprintf(id, sizeof id, "C%02d", i + 1);
    cfg.items.push_back({id, std::string("story-") + id, i < 12, {kA[i], kB[i]}});
  }
  return cfg;
}

inline PilotConfig pilot_config_from_json(const nlohmann::json& j) {
  PilotConfig cfg = default_pilot_config();
  try {
    if (j.contains("n")) cfg.n = j.at("n").get<int>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("factor_correlation")) cfg.factor_correlation = j.at("factor_correlation").get<double>();
    if (j.contains("items")) {
      cfg.items.clear();
      for (const auto& it : j.at("items")) {
        const auto id = it.at("item_id").get<std::string>();
        cfg.items.push_back({id, it.value("storyline_id", id), it.at("is_scam").get<bool>(),
                             {it.at("a").get<double>(), it.at("b").get<double>()}});
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidConfig, "$", e.what());
  }
  cfg.validate();
  return cfg;
}

// Two-factor 2PL responses, one record per respondent and item, in the
// response CSV layout (form A, pre phase).
inline std::vector<ResponseRecord> generate_pilot(const PilotConfig& cfg) {
  cfg.validate();
  std::vector<ResponseRecord> out;
  out.reserve(static_cast<std::size_t>(cfg.n) * cfg.items.size());
  const double rho = cfg.factor_correlation;
  std::vector<std::pair<SdatItem, IrtItemParams>> items;
  for (const auto& it : cfg.items) {
    SdatItem s;
    s.item_id = it.item_id;
    s.storyline_id = it.storyline_id;
    s.is_scam = it.is_scam;
    items.emplace_back(std::move(s), it.params);
  }
  for (int i = 1; i <= cfg.n; ++i) {
    RandomStream rng = RandomStream::derive(cfg.seed, static_cast<std::uint64_t>(i), "pilot");
    const double shared = rng.normal();
    const double f1 = std::sqrt(std::abs(rho)) * shared + std::sqrt(1 - std::abs(rho)) * rng.normal();
    const double f2 =
        (rho < 0 ? -1.0 : 1.0) * std::sqrt(std::abs(rho)) * shared + std::sqrt(1 - std::abs(rho)) * rng.normal();
    const auto responses = respond_2pl(f1, f2, items, rng);
    char pid[16];
    std::snprintf(pid, sizeof pid, "R%05d", i);
    for (std::size_t k = 0; k < items.size(); ++k) {
      const auto& item = items[k].first;
      out.push_back({pid, Form::A, item.item_id, item.storyline_id, item.is_scam, responses[k].compliance,
                     responses[k].discernment, responses[k].confidence, TestPhase::Pre});
    }
  }
  return out;
}

}  // namespace shieldup::sim
