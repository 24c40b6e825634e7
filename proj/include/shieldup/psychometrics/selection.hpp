#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "shieldup/psychometrics/irt.hpp"
#include "shieldup/psychometrics/reliability.hpp"
#include "shieldup/sdat/response_csv.hpp"

namespace shieldup {

struct ItemStatistics {
  std::string item_id;
  bool is_scam = true;
  double item_total = 0.0;
  double discrimination = 0.0;
  double rank_item_total = 0.0;  // 1 = best; ties share the average rank
  double rank_discrimination = 0.0;
  double composite = 0.0;        // mean of the two ranks
};

struct Selection {
  std::vector<std::string> selected;     // in pick order
  std::vector<ItemStatistics> statistics;  // every candidate, sorted by item id
  IrtFit irt;                            // fit on the id-sorted matrix
};

// Average ranks, descending: the largest value gets rank 1.
inline std::vector<double> descending_average_ranks(const std::vector<double>& values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = avg;
    i = j + 1;
  }
  return ranks;
}

// Greedy selection by composite rank (mean of the item-total and 2PL
// discrimination ranks) under a hard equal split between scam and non-scam
// items. Columns are canonicalized by item id first, so the result does not
// depend on input column order; ties go to the lower item id.
inline Selection select_items(const ResponseMatrix& m, std::span<const ItemMeta> meta, int target = 10,
                              const IrtFitOptions& irt_options = {}) {
  if (static_cast<Eigen::Index>(meta.size()) != m.items()) {
    throw Error(Errc::InvalidMatrix, "meta", "one metadata entry per item required");
  }
  std::map<std::string, const ItemMeta*> meta_by_id;
  for (const auto& im : meta) meta_by_id[im.item_id] = &im;
  for (const auto& id : m.item_ids()) {
    if (!meta_by_id.contains(id)) throw Error(Errc::InvalidMatrix, id, "no metadata for item");
  }
  if (target <= 0 || target % 2 != 0 || target > m.items()) {
    throw Error(Errc::InfeasibleConstraint, std::to_string(target), "target must be even, positive and at most the item count");
  }
  const int half = target / 2;
  const auto scam_count = std::count_if(meta.begin(), meta.end(), [](const ItemMeta& im) { return im.is_scam; });
  if (scam_count < half || static_cast<long>(meta.size()) - scam_count < half) {
    throw Error(Errc::InfeasibleConstraint, std::to_string(target),
                "need " + std::to_string(half) + " items per class, have " + std::to_string(scam_count) + " scam / " +
                    std::to_string(meta.size() - static_cast<std::size_t>(scam_count)) + " non-scam");
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(m.items()));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return m.item_ids()[static_cast<std::size_t>(a)] < m.item_ids()[static_cast<std::size_t>(b)];
  });
  const ResponseMatrix sorted = m.select_columns(order);

  Selection out;
  const std::vector<double> itc = item_total_correlation(sorted);
  out.irt = fit_2pl(sorted, irt_options);
  std::vector<double> disc;
  for (const auto& p : out.irt.items) disc.push_back(p.a);
  const auto rank_itc = descending_average_ranks(itc);
  const auto rank_disc = descending_average_ranks(disc);
  for (std::size_t j = 0; j < itc.size(); ++j) {
    const std::string& id = sorted.item_ids()[j];
    out.statistics.push_back({id, meta_by_id.at(id)->is_scam, itc[j], disc[j], rank_itc[j], rank_disc[j],
                              0.5 * (rank_itc[j] + rank_disc[j])});
  }

  std::vector<const ItemStatistics*> ranked;
  for (const auto& s : out.statistics) ranked.push_back(&s);
  std::stable_sort(ranked.begin(), ranked.end(), [](const ItemStatistics* a, const ItemStatistics* b) {
    if (a->composite != b->composite) return a->composite < b->composite;
    return a->item_id < b->item_id;
  });
  int scam = 0, notscam = 0;
  for (const ItemStatistics* s : ranked) {
    int& count = s->is_scam ? scam : notscam;
    if (count < half) {
      ++count;
      out.selected.push_back(s->item_id);
    }
  }
  return out;
}

}  // namespace shieldup
