#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "shieldup/core/arm.hpp"
#include "shieldup/core/error.hpp"

namespace shieldup {

struct AnalysisRow {
  std::string participant_id;
  Arm arm = Arm::ChromeDino;
  double pre = 0.0;
  double post = 0.0;
  std::optional<double> followup;
  int age = 0;
  std::string gender;
  int income_level = 0;
  int education_level = 0;

  bool operator==(const AnalysisRow&) const = default;
};

struct DesignOptions {
  // Ordinal covariates as centered integer scores (one column each) or as
  // full dummy sets against the lowest level.
  bool ordinal_as_score = true;
};

struct DesignMatrix {
  Eigen::MatrixXd x;
  std::vector<std::string> columns;
  std::vector<Eigen::Index> arm_columns;  // ShieldUp, GeneralAwareness

  Eigen::Index column(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (columns[i] == name) return static_cast<Eigen::Index>(i);
    }
    throw Error(Errc::MissingField, std::string(name), "no such design column");
  }
};

// Numerical rank from column-pivoted Householder QR.
inline Eigen::Index numerical_rank(const Eigen::MatrixXd& x) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  qr.setThreshold(1e-10);
  return qr.rank();
}

inline void validate_row(const AnalysisRow& r) {
  auto in_range = [](double v) { return v >= 0.0 && v <= 5.0; };
  if (r.gender.empty()) throw Error(Errc::MissingField, "gender", "participant " + r.participant_id);
  if (!in_range(r.pre)) throw Error(Errc::MissingField, "pre", "score outside [0,5] for " + r.participant_id);
  if (!in_range(r.post)) throw Error(Errc::MissingField, "post", "score outside [0,5] for " + r.participant_id);
  if (r.followup && !in_range(*r.followup)) {
    throw Error(Errc::MissingField, "followup", "score outside [0,5] for " + r.participant_id);
  }
}

// Columns: intercept, arm dummies (reference ChromeDino), centered pre,
// centered age, gender dummies (reference = first level in sort order), then
// income and education as centered scores.
inline DesignMatrix build_design(std::span<const AnalysisRow> rows, const DesignOptions& options = {}) {
  for (const auto& r : rows) validate_row(r);
  const auto n = static_cast<Eigen::Index>(rows.size());

  std::set<std::string> genders;
  std::set<int> incomes, educations;
  for (const auto& r : rows) {
    genders.insert(r.gender);
    incomes.insert(r.income_level);
    educations.insert(r.education_level);
  }
  auto mean_of = [&](auto field) {
    double s = 0.0;
    for (const auto& r : rows) s += field(r);
    return n ? s / static_cast<double>(n) : 0.0;
  };
  const double pre_mean = mean_of([](const AnalysisRow& r) { return r.pre; });
  const double age_mean = mean_of([](const AnalysisRow& r) { return double(r.age); });
  const double income_mean = mean_of([](const AnalysisRow& r) { return double(r.income_level); });
  const double edu_mean = mean_of([](const AnalysisRow& r) { return double(r.education_level); });

  DesignMatrix d;
  d.columns = {"intercept", "arm[ShieldUp]", "arm[GeneralAwareness]", "pre", "age"};
  d.arm_columns = {1, 2};
  std::vector<std::string> gender_levels(std::next(genders.begin(), genders.empty() ? 0 : 1), genders.end());
  for (const auto& g : gender_levels) d.columns.push_back("gender[" + g + "]");
  std::vector<int> income_levels, edu_levels;
  if (options.ordinal_as_score) {
    d.columns.push_back("income_level");
    d.columns.push_back("education_level");
  } else {
    income_levels.assign(std::next(incomes.begin(), incomes.empty() ? 0 : 1), incomes.end());
    edu_levels.assign(std::next(educations.begin(), educations.empty() ? 0 : 1), educations.end());
    for (int l : income_levels) d.columns.push_back("income_level[" + std::to_string(l) + "]");
    for (int l : edu_levels) d.columns.push_back("education_level[" + std::to_string(l) + "]");
  }
  const auto p = static_cast<Eigen::Index>(d.columns.size());

  d.x = Eigen::MatrixXd::Zero(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    const AnalysisRow& r = rows[static_cast<std::size_t>(i)];
    Eigen::Index c = 0;
    d.x(i, c++) = 1.0;
    d.x(i, c++) = r.arm == Arm::ShieldUp ? 1.0 : 0.0;
    d.x(i, c++) = r.arm == Arm::GeneralAwareness ? 1.0 : 0.0;
    d.x(i, c++) = r.pre - pre_mean;
    d.x(i, c++) = r.age - age_mean;
    for (const auto& g : gender_levels) d.x(i, c++) = r.gender == g ? 1.0 : 0.0;
    if (options.ordinal_as_score) {
      d.x(i, c++) = r.income_level - income_mean;
      d.x(i, c++) = r.education_level - edu_mean;
    } else {
      for (int l : income_levels) d.x(i, c++) = r.income_level == l ? 1.0 : 0.0;
      for (int l : edu_levels) d.x(i, c++) = r.education_level == l ? 1.0 : 0.0;
    }
  }

  if (n < p + 1) {
    throw Error(Errc::RankDeficient, "rows",
                std::to_string(n) + " rows cannot support " + std::to_string(p) + " design columns");
  }
  for (Arm arm : kArms) {
    const bool present = std::any_of(rows.begin(), rows.end(), [&](const AnalysisRow& r) { return r.arm == arm; });
    if (!present) throw Error(Errc::RankDeficient, "arm", "no participants in arm " + std::string(name_of(arm)));
  }
  if (numerical_rank(d.x) < p) throw Error(Errc::RankDeficient, "design", "design matrix is not full column rank");
  return d;
}

}  // namespace shieldup
