#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "shieldup/content/parse.hpp"
#include "shieldup/psychometrics/response_matrix.hpp"

namespace shieldup {

enum class Form { A, B };
enum class Discernment { Scam, NotScam };

inline std::string_view name_of(Form f) { return f == Form::A ? "A" : "B"; }
inline std::string_view name_of(Discernment d) { return d == Discernment::Scam ? "Scam" : "NotScam"; }

inline std::optional<Form> parse_form(std::string_view s) {
  if (s == "A") return Form::A;
  if (s == "B") return Form::B;
  return std::nullopt;
}
inline std::optional<Discernment> parse_discernment(std::string_view s) {
  if (s == "Scam") return Discernment::Scam;
  if (s == "NotScam") return Discernment::NotScam;
  return std::nullopt;
}

inline constexpr int kSdatItems = 10;
inline constexpr int kLikertMin = 1;
inline constexpr int kLikertMax = 5;

struct SdatItem {
  std::string item_id;
  std::string storyline_id;
  Form form = Form::A;
  bool is_scam = true;
  ScamType scam_type = ScamType::OtherUpi;
  // Medium-fidelity content shown to the respondent. Absent for synthetic
  // items used only in simulation.
  std::shared_ptr<const ScenarioGraph> scenario;
  int scale_max = kLikertMax;
};

struct SdatForm {
  Form form = Form::A;
  std::vector<SdatItem> items;

  const SdatItem* find(std::string_view item_id) const {
    for (const auto& it : items) {
      if (it.item_id == item_id) return &it;
    }
    return nullptr;
  }
};

struct SdatResponse {
  std::string item_id;
  int compliance = 3;  // likelihood of continuing engagement
  Discernment discernment = Discernment::Scam;
  int confidence = 3;

  bool operator==(const SdatResponse&) const = default;
};

struct SdatScoreReport {
  int scam_score = 0;     // scam items labeled Scam
  int notscam_score = 0;  // non-scam items labeled NotScam
  double mean_compliance_scam = 0.0;
  double mean_compliance_notscam = 0.0;
  double mean_confidence = 0.0;

  bool operator==(const SdatScoreReport&) const = default;
};

inline bool correct(const SdatItem& item, Discernment d) {
  return (d == Discernment::Scam) == item.is_scam;
}

// Picks five scam and five non-scam items of `form`, in canonical order
// (storyline id, then item id).
inline SdatForm assemble_form(std::span<const SdatItem> candidates, Form form) {
  std::vector<SdatItem> pool;
  for (const auto& it : candidates) {
    if (it.form == form) pool.push_back(it);
  }
  if (pool.size() < static_cast<std::size_t>(kSdatItems)) {
    throw Error(Errc::InsufficientItems, std::string(name_of(form)),
                std::to_string(pool.size()) + " candidate items, need " + std::to_string(kSdatItems));
  }
  std::sort(pool.begin(), pool.end(), [](const SdatItem& a, const SdatItem& b) {
    return std::tie(a.storyline_id, a.item_id) < std::tie(b.storyline_id, b.item_id);
  });
  SdatForm out{form, {}};
  int scam = 0, notscam = 0;
  constexpr int half = kSdatItems / 2;
  for (auto& it : pool) {
    int& count = it.is_scam ? scam : notscam;
    if (count < half) {
      ++count;
      out.items.push_back(std::move(it));
    }
  }
  if (scam != half || notscam != half) {
    throw Error(Errc::SplitViolation, std::string(name_of(form)),
                "need 5 scam and 5 non-scam items, have " + std::to_string(scam) + "/" +
                    std::to_string(notscam));
  }
  return out;
}

inline void validate_response(const SdatResponse& r) {
  auto in_range = [](int v) { return v >= kLikertMin && v <= kLikertMax; };
  if (!in_range(r.compliance)) throw Error(Errc::InvalidResponse, r.item_id, "compliance must be 1..5");
  if (!in_range(r.confidence)) throw Error(Errc::InvalidResponse, r.item_id, "confidence must be 1..5");
}

inline SdatScoreReport score_responses(const SdatForm& form, std::span<const SdatResponse> responses) {
  std::map<std::string, const SdatResponse*> by_item;
  for (const auto& r : responses) {
    if (!form.find(r.item_id)) throw Error(Errc::UnknownItem, r.item_id, "not on form " + std::string(name_of(form.form)));
    if (!by_item.emplace(r.item_id, &r).second) throw Error(Errc::DuplicateResponse, r.item_id);
    validate_response(r);
  }
  SdatScoreReport report;
  int n_scam = 0, n_notscam = 0;
  double compliance_scam = 0, compliance_notscam = 0, confidence = 0;
  for (const auto& item : form.items) {
    auto it = by_item.find(item.item_id);
    if (it == by_item.end()) throw Error(Errc::MissingResponse, item.item_id);
    const SdatResponse& r = *it->second;
    if (item.is_scam) {
      ++n_scam;
      compliance_scam += r.compliance;
      if (r.discernment == Discernment::Scam) ++report.scam_score;
    } else {
      ++n_notscam;
      compliance_notscam += r.compliance;
      if (r.discernment == Discernment::NotScam) ++report.notscam_score;
    }
    confidence += r.confidence;
  }
  if (n_scam) report.mean_compliance_scam = compliance_scam / n_scam;
  if (n_notscam) report.mean_compliance_notscam = compliance_notscam / n_notscam;
  report.mean_confidence = confidence / static_cast<double>(form.items.size());
  return report;
}

// Parallel forms must cover the same storylines, and paired items must agree
// on is_scam and scam type.
inline void validate_parallel_forms(const SdatForm& a, const SdatForm& b) {
  std::map<std::string, const SdatItem*> b_items;
  for (const auto& it : b.items) b_items[it.storyline_id] = &it;
  if (a.items.size() != b.items.size()) throw Error(Errc::StorylineMismatch, "size", "forms differ in length");
  for (const auto& it : a.items) {
    auto match = b_items.find(it.storyline_id);
    if (match == b_items.end()) throw Error(Errc::StorylineMismatch, it.storyline_id, "storyline missing from form B");
    if (match->second->is_scam != it.is_scam || match->second->scam_type != it.scam_type) {
      throw Error(Errc::StorylineMismatch, it.storyline_id, "paired items disagree on is_scam or scam type");
    }
  }
}

struct ParityEntry {
  std::string storyline_id;
  double proportion_a = 0.0;
  double proportion_b = 0.0;
  double diff = 0.0;  // proportion correct on A minus B
  bool flagged = false;
};

struct ParityReport {
  std::vector<ParityEntry> entries;  // form A item order
  double threshold = 0.15;

  bool balanced() const {
    return std::none_of(entries.begin(), entries.end(), [](const ParityEntry& e) { return e.flagged; });
  }
};

// Pilot matrices hold 0/1 correctness with one column per form item, in the
// form's item order.
inline ParityReport form_parity_check(const SdatForm& a, const SdatForm& b, const ResponseMatrix& pilot_a,
                                      const ResponseMatrix& pilot_b, double threshold = 0.15) {
  validate_parallel_forms(a, b);
  auto check_shape = [](const SdatForm& f, const ResponseMatrix& m) {
    if (m.items() != static_cast<Eigen::Index>(f.items.size())) {
      throw Error(Errc::InvalidMatrix, std::string(name_of(f.form)), "pilot matrix width must equal form length");
    }
    m.require_binary();
  };
  check_shape(a, pilot_a);
  check_shape(b, pilot_b);
  std::map<std::string, Eigen::Index> b_column;
  for (std::size_t j = 0; j < b.items.size(); ++j) b_column[b.items[j].storyline_id] = static_cast<Eigen::Index>(j);

  ParityReport report;
  report.threshold = threshold;
  for (std::size_t j = 0; j < a.items.size(); ++j) {
    ParityEntry e;
    e.storyline_id = a.items[j].storyline_id;
    e.proportion_a = pilot_a.cells().col(static_cast<Eigen::Index>(j)).mean();
    e.proportion_b = pilot_b.cells().col(b_column.at(e.storyline_id)).mean();
    e.diff = e.proportion_a - e.proportion_b;
    e.flagged = std::abs(e.diff) > threshold;
    report.entries.push_back(std::move(e));
  }
  return report;
}

// Item bank file: JSON array of {item_id, storyline_id, form, scenario}.
inline std::vector<SdatItem> parse_sdat_items(std::string_view doc) {
  const json arr = detail::parse_json_document(doc);
  if (!arr.is_array()) throw Error(Errc::Schema, "<root>", "item bank must be a JSON array");
  std::vector<SdatItem> items;
  std::set<std::string> ids;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    detail::FieldReader r(arr[i], "[" + std::to_string(i) + "]");
    r.require_keys({"item_id", "storyline_id", "form", "scenario"});
    SdatItem item;
    item.item_id = r.text("item_id", true);
    item.storyline_id = r.text("storyline_id", true);
    auto form = parse_form(r.text("form"));
    if (!form) throw Error(Errc::Schema, r.at("form"), "must be A or B");
    item.form = *form;
    auto g = std::make_shared<const ScenarioGraph>(scenario_from_json(r.raw("scenario")));
    item.is_scam = g->is_scam;
    item.scam_type = g->scam_type;
    item.scenario = std::move(g);
    if (!ids.insert(item.item_id).second) throw Error(Errc::Schema, r.at("item_id"), "duplicate item id");
    items.push_back(std::move(item));
  }
  return items;
}

}  // namespace shieldup
