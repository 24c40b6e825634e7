#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shieldup/analysis/design.hpp"
#include "shieldup/core/csv.hpp"

namespace shieldup {

enum class ScoreKind { Scam, NotScam };  // which identification score
enum class AnalysisPhase { Post, FollowUp };

inline std::string_view name_of(ScoreKind o) { return o == ScoreKind::Scam ? "scam" : "notscam"; }
inline std::string_view name_of(AnalysisPhase p) { return p == AnalysisPhase::Post ? "post" : "followup"; }

inline std::optional<ScoreKind> parse_outcome(std::string_view s) {
  if (s == "scam") return ScoreKind::Scam;
  if (s == "notscam") return ScoreKind::NotScam;
  return std::nullopt;
}
inline std::optional<AnalysisPhase> parse_analysis_phase(std::string_view s) {
  if (s == "post") return AnalysisPhase::Post;
  if (s == "followup") return AnalysisPhase::FollowUp;
  return std::nullopt;
}

// Score slots in an export row.
enum class ScoreSlot { PreScam, PreNotScam, PostScam, PostNotScam, FuScam, FuNotScam };

// One participant in the trial export.
struct ExportRow {
  std::string participant_id;
  std::optional<Arm> arm;
  int age = 0;
  std::string gender;
  int income_level = 0;
  int education_level = 0;
  std::array<std::optional<int>, 6> scores{};  // indexed by ScoreSlot
  std::string pre_form;
  std::string post_form;
  bool complete = false;

  std::optional<int>& score(ScoreSlot s) { return scores[static_cast<std::size_t>(s)]; }
  const std::optional<int>& score(ScoreSlot s) const { return scores[static_cast<std::size_t>(s)]; }

  bool operator==(const ExportRow&) const = default;
};

inline const std::vector<std::string>& export_csv_header() {
  static const std::vector<std::string> header{
      "participant_id", "arm",         "age",          "gender",   "income_level",
      "education_level", "pre_scam",   "pre_notscam",  "post_scam", "post_notscam",
      "fu_scam",        "fu_notscam",  "pre_form",     "post_form", "complete"};
  return header;
}

inline std::string write_export_csv(std::span<const ExportRow> rows) {
  std::string out = csv::join_row(export_csv_header());
  auto opt = [](const std::optional<int>& v) { return v ? std::to_string(*v) : std::string{}; };
  for (const auto& r : rows) {
    std::vector<std::string> fields{r.participant_id,
                                    r.arm ? std::string(name_of(*r.arm)) : std::string{},
                                    std::to_string(r.age),
                                    r.gender,
                                    std::to_string(r.income_level),
                                    std::to_string(r.education_level)};
    for (const auto& s : r.scores) fields.push_back(opt(s));
    fields.push_back(r.pre_form);
    fields.push_back(r.post_form);
    fields.push_back(r.complete ? "1" : "0");
    out += csv::join_row(fields);
  }
  return out;
}

inline std::vector<ExportRow> parse_export_csv(std::string_view text) {
  const csv::Table t = csv::parse(text);
  if (t.header != export_csv_header()) {
    throw Error(Errc::Schema, "header", "export CSV header does not match participant_id,arm,...,complete");
  }
  std::vector<ExportRow> rows;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& f = t.rows[i];
    const std::string where = "row " + std::to_string(i + 2);
    auto to_int = [&](const std::string& s, const std::string& field) {
      if (s.empty()) throw Error(Errc::MissingField, field, where);
      try {
        std::size_t used = 0;
        const int v = std::stoi(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
      } catch (const std::invalid_argument&) {
        throw Error(Errc::Schema, field, where + ": expected integer, got '" + s + "'");
      } catch (const std::out_of_range&) {
        throw Error(Errc::Schema, field, where + ": out of range");
      }
    };
    ExportRow r;
    r.participant_id = f[0];
    if (!f[1].empty()) {
      r.arm = parse_arm(f[1]);
      if (!r.arm) throw Error(Errc::Schema, "arm", where + ": unknown arm '" + f[1] + "'");
    }
    r.age = to_int(f[2], "age");
    r.gender = f[3];
    r.income_level = to_int(f[4], "income_level");
    r.education_level = to_int(f[5], "education_level");
    for (std::size_t s = 0; s < 6; ++s) {
      if (!f[6 + s].empty()) r.scores[s] = to_int(f[6 + s], export_csv_header()[6 + s]);
    }
    r.pre_form = f[12];
    r.post_form = f[13];
    r.complete = f[14] == "1";
    rows.push_back(std::move(r));
  }
  return rows;
}

// Rows usable for the requested model: assigned arm with pre and post scores
// present (and the follow-up score, for the follow-up model, which then
// becomes the outcome).
inline std::vector<AnalysisRow> analysis_rows(std::span<const ExportRow> rows, ScoreKind outcome,
                                              AnalysisPhase phase) {
  const bool scam = outcome == ScoreKind::Scam;
  const ScoreSlot pre = scam ? ScoreSlot::PreScam : ScoreSlot::PreNotScam;
  const ScoreSlot post = scam ? ScoreSlot::PostScam : ScoreSlot::PostNotScam;
  const ScoreSlot fu = scam ? ScoreSlot::FuScam : ScoreSlot::FuNotScam;
  std::vector<AnalysisRow> out;
  for (const auto& r : rows) {
    if (!r.arm || !r.score(pre) || !r.score(post)) continue;
    if (phase == AnalysisPhase::FollowUp && !r.score(fu)) continue;
    AnalysisRow a;
    a.participant_id = r.participant_id;
    a.arm = *r.arm;
    a.pre = *r.score(pre);
    a.post = *r.score(post);
    if (r.score(fu)) a.followup = *r.score(fu);
    if (phase == AnalysisPhase::FollowUp) a.post = *a.followup;
    a.age = r.age;
    a.gender = r.gender;
    a.income_level = r.income_level;
    a.education_level = r.education_level;
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace shieldup
