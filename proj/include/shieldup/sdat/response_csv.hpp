#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "shieldup/core/csv.hpp"
#include "shieldup/sdat/sdat.hpp"

namespace shieldup {

enum class TestPhase { Pre, Post, FollowUp21 };

inline std::string_view name_of(TestPhase p) {
  switch (p) {
    case TestPhase::Pre: return "pre";
    case TestPhase::Post: return "post";
    case TestPhase::FollowUp21: return "followup21";
  }
  return "?";
}

inline std::optional<TestPhase> parse_test_phase(std::string_view s) {
  if (s == "pre") return TestPhase::Pre;
  if (s == "post") return TestPhase::Post;
  if (s == "followup21") return TestPhase::FollowUp21;
  return std::nullopt;
}

// One row of the response export.
struct ResponseRecord {
  std::string participant_id;
  Form form = Form::A;
  std::string item_id;
  std::string storyline_id;
  bool is_scam = true;
  int compliance = 3;
  Discernment discernment = Discernment::Scam;
  int confidence = 3;
  TestPhase phase = TestPhase::Pre;

  bool operator==(const ResponseRecord&) const = default;
};

inline const std::vector<std::string>& response_csv_header() {
  static const std::vector<std::string> header{"participant_id", "form",       "item_id",
                                               "storyline_id",   "is_scam",    "compliance",
                                               "discernment",    "confidence", "phase"};
  return header;
}

inline std::string write_response_csv(std::span<const ResponseRecord> records) {
  std::string out = csv::join_row(response_csv_header());
  for (const auto& r : records) {
    out += csv::join_row({r.participant_id, std::string(name_of(r.form)), r.item_id, r.storyline_id,
                          r.is_scam ? "1" : "0", std::to_string(r.compliance),
                          std::string(name_of(r.discernment)), std::to_string(r.confidence),
                          std::string(name_of(r.phase))});
  }
  return out;
}

inline std::vector<ResponseRecord> parse_response_csv(std::string_view text) {
  const csv::Table t = csv::parse(text);
  if (t.header != response_csv_header()) {
    throw Error(Errc::Schema, "header", "response CSV header must be: participant_id,form,item_id,...,phase");
  }
  std::vector<ResponseRecord> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    const std::string where = "row " + std::to_string(i + 2);
    auto to_int = [&](const std::string& s, const char* field) {
      try {
        std::size_t used = 0;
        int v = std::stoi(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
      } catch (const std::exception&) {
        throw Error(Errc::Schema, where + "." + field, "expected integer");
      }
    };
    ResponseRecord r;
    r.participant_id = row[0];
    auto form = parse_form(row[1]);
    if (!form) throw Error(Errc::Schema, where + ".form", "must be A or B");
    r.form = *form;
    r.item_id = row[2];
    r.storyline_id = row[3];
    if (row[4] != "0" && row[4] != "1") throw Error(Errc::Schema, where + ".is_scam", "must be 0 or 1");
    r.is_scam = row[4] == "1";
    r.compliance = to_int(row[5], "compliance");
    auto d = parse_discernment(row[6]);
    if (!d) throw Error(Errc::Schema, where + ".discernment", "must be Scam or NotScam");
    r.discernment = *d;
    r.confidence = to_int(row[7], "confidence");
    auto phase = parse_test_phase(row[8]);
    if (!phase) throw Error(Errc::Schema, where + ".phase", "must be pre, post or followup21");
    r.phase = *phase;
    if (r.participant_id.empty() || r.item_id.empty()) throw Error(Errc::Schema, where, "empty identifier");
    out.push_back(std::move(r));
  }
  return out;
}

struct ItemMeta {
  std::string item_id;
  std::string storyline_id;
  bool is_scam = true;

  bool operator==(const ItemMeta&) const = default;
};

struct CorrectnessData {
  ResponseMatrix matrix;        // columns sorted by item id
  std::vector<ItemMeta> items;  // same order as the columns
  std::vector<std::string> respondents;  // "participant_id/phase"
};

// Pivots response records into a 0/1 correctness matrix: one row per
// (participant, phase), one column per item id. Respondents missing any item
// are dropped (listwise deletion); conflicting metadata is a SchemaError.
inline CorrectnessData correctness_matrix(std::span<const ResponseRecord> records) {
  std::map<std::string, ItemMeta> items;
  std::map<std::string, std::map<std::string, double>> by_respondent;
  for (const auto& r : records) {
    auto [it, inserted] = items.try_emplace(r.item_id, ItemMeta{r.item_id, r.storyline_id, r.is_scam});
    if (!inserted && (it->second.storyline_id != r.storyline_id || it->second.is_scam != r.is_scam)) {
      throw Error(Errc::Schema, r.item_id, "inconsistent item metadata across rows");
    }
    const std::string key = r.participant_id + "/" + std::string(name_of(r.phase));
    const bool right = (r.discernment == Discernment::Scam) == r.is_scam;
    if (!by_respondent[key].emplace(r.item_id, right ? 1.0 : 0.0).second) {
      throw Error(Errc::DuplicateResponse, key + ":" + r.item_id);
    }
  }
  CorrectnessData out;
  std::vector<std::string> ids;
  for (const auto& [id, meta] : items) {
    ids.push_back(id);
    out.items.push_back(meta);
  }
  std::vector<std::vector<double>> rows;
  for (const auto& [key, answers] : by_respondent) {
    if (answers.size() != items.size()) continue;
    std::vector<double> row;
    for (const auto& id : ids) row.push_back(answers.at(id));
    rows.push_back(std::move(row));
    out.respondents.push_back(key);
  }
  if (rows.size() < 2) throw Error(Errc::InvalidMatrix, "respondents", "fewer than 2 complete respondents");
  out.matrix = ResponseMatrix::from_rows(rows, ids);
  return out;
}

}  // namespace shieldup
