#pragma once

#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "shieldup/psychometrics/efa.hpp"
#include "shieldup/psychometrics/reliability.hpp"
#include "shieldup/psychometrics/selection.hpp"
#include "shieldup/sdat/response_csv.hpp"

namespace shieldup {

struct CalibrationReport {
  std::vector<ItemMeta> items;  // id order
  std::size_t respondents = 0;
  ReliabilityReport pool;
  FactorLoadings efa;
  Selection selection;
  double selected_alpha = 0.0;
};

// Item statistics for a pilot pool: reliability, two-factor EFA, 2PL
// calibration and the balanced selection of `target` items.
inline CalibrationReport calibrate(std::span<const ResponseRecord> records, int target = kSdatItems,
                                   const IrtFitOptions& irt = {}) {
  const CorrectnessData data = correctness_matrix(records);
  CalibrationReport r;
  r.items = data.items;
  r.respondents = data.respondents.size();
  r.pool = reliability(data.matrix);
  r.efa = efa_principal(data.matrix, 2);
  r.selection = select_items(data.matrix, data.items, target, irt);
  std::vector<Eigen::Index> cols;
  for (const auto& id : r.selection.selected) {
    for (std::size_t j = 0; j < data.items.size(); ++j) {
      if (data.items[j].item_id == id) cols.push_back(static_cast<Eigen::Index>(j));
    }
  }
  std::sort(cols.begin(), cols.end());
  r.selected_alpha = cronbach_alpha(data.matrix.select_columns(cols));
  return r;
}

inline nlohmann::json to_json(const CalibrationReport& r) {
  using nlohmann::json;
  json items = json::array();
  const auto primary = r.efa.primary_factor();
  for (std::size_t j = 0; j < r.items.size(); ++j) {
    const auto& st = r.selection.statistics[j];
    const auto& p = r.selection.irt.items[j];
    json loadings = json::array();
    for (Eigen::Index f = 0; f < r.efa.loadings.cols(); ++f) loadings.push_back(r.efa.loadings(Eigen::Index(j), f));
    items.push_back({{"item_id", r.items[j].item_id},
                     {"storyline_id", r.items[j].storyline_id},
                     {"is_scam", r.items[j].is_scam},
                     {"a", p.a},
                     {"b", p.b},
                     {"item_total", st.item_total},
                     {"composite_rank", st.composite},
                     {"loadings", loadings},
                     {"primary_factor", primary[j]},
                     {"communality", r.efa.communalities[j]}});
  }
  return {{"respondents", r.respondents},
          {"items", items},
          {"alpha_pool", r.pool.alpha},
          {"efa",
           {{"factors", r.efa.loadings.cols()},
            {"eigenvalues", r.efa.eigenvalues},
            {"explained_variance", r.efa.explained_variance},
            {"varimax_converged", r.efa.varimax_converged}}},
          {"irt",
           {{"loglik", r.selection.irt.loglik},
            {"iterations", r.selection.irt.iterations},
            {"converged", r.selection.irt.converged},
            {"monotone", r.selection.irt.monotone},
            {"warnings", r.selection.irt.warnings}}},
          {"selection", {{"selected", r.selection.selected}, {"alpha", r.selected_alpha}}}};
}

}  // namespace shieldup
