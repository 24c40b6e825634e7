#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "shieldup/analysis/design.hpp"
#include "shieldup/analysis/ols.hpp"
#include "shieldup/stats/distributions.hpp"

namespace shieldup {

struct AncovaResult {
  std::vector<std::string> coefficient_names;
  Eigen::VectorXd coefficients;
  Eigen::VectorXd coefficient_se;
  double f_arm = 0.0;
  int df_num = 2;
  Eigen::Index df_den = 0;
  double p_value = 1.0;
  double partial_eta_sq = 0.0;
  double ss_arm = 0.0;
  double rss_full = 0.0;
  double rss_reduced = 0.0;
  double sigma2 = 0.0;  // residual variance of the full model
  std::array<double, 3> adjusted_means{};    // indexed by Arm
  std::array<double, 3> standard_errors{};   // of the adjusted means
  std::array<double, 3> raw_means{};
  std::array<int, 3> arm_counts{};
  Eigen::Index n = 0;

  double adjusted_mean(Arm arm) const { return adjusted_means[index_of(arm)]; }
  double residual_sd() const { return std::sqrt(sigma2); }
};

// Arm effect by nested-model F test: the full design against the same design
// without the two arm dummies. Adjusted means are model predictions at the
// covariate means; their SEs come from x' V x.
inline AncovaResult ancova_arm_effect(std::span<const AnalysisRow> rows, const DesignOptions& options = {}) {
  const DesignMatrix d = build_design(rows, options);
  const Eigen::Index n = d.x.rows(), p = d.x.cols();
  if (n - p <= 0) throw Error(Errc::DegenerateResidual, "df", "no residual degrees of freedom");
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y(i) = rows[static_cast<std::size_t>(i)].post;

  const OlsFit full = fit_ols(d.x, y);

  Eigen::MatrixXd reduced_x(n, p - 2);
  Eigen::Index c = 0;
  for (Eigen::Index j = 0; j < p; ++j) {
    if (j == d.arm_columns[0] || j == d.arm_columns[1]) continue;
    reduced_x.col(c++) = d.x.col(j);
  }
  const OlsFit reduced = fit_ols(reduced_x, y);

  AncovaResult r;
  r.coefficient_names = d.columns;
  r.coefficients = full.coefficients;
  r.coefficient_se = full.standard_errors;
  r.n = n;
  r.df_den = full.df_resid;
  r.rss_full = full.rss;
  r.rss_reduced = std::max(reduced.rss, full.rss);  // nested: equal up to rounding at worst
  r.ss_arm = r.rss_reduced - r.rss_full;
  r.sigma2 = full.sigma2;
  // Exact fits leave only rounding noise in the residuals.
  if (!(full.rss > 1e-20 * std::max(1.0, y.squaredNorm()))) {
    throw Error(Errc::DegenerateResidual, "rss", "outcome is fitted exactly; F is undefined");
  }
  r.f_arm = (r.ss_arm / r.df_num) / (r.rss_full / static_cast<double>(r.df_den));
  r.p_value = stats::f_sf(r.f_arm, r.df_num, static_cast<double>(r.df_den));
  r.partial_eta_sq = r.ss_arm / (r.ss_arm + r.rss_full);

  const Eigen::RowVectorXd at_means = d.x.colwise().mean();
  for (Arm arm : kArms) {
    Eigen::VectorXd point = at_means.transpose();
    point(0) = 1.0;
    point(d.arm_columns[0]) = arm == Arm::ShieldUp ? 1.0 : 0.0;
    point(d.arm_columns[1]) = arm == Arm::GeneralAwareness ? 1.0 : 0.0;
    r.adjusted_means[index_of(arm)] = point.dot(full.coefficients);
    r.standard_errors[index_of(arm)] = std::sqrt(point.dot(full.covariance * point));
  }
  std::array<double, 3> sums{};
  for (const auto& row : rows) {
    sums[index_of(row.arm)] += row.post;
    ++r.arm_counts[index_of(row.arm)];
  }
  for (Arm arm : kArms) r.raw_means[index_of(arm)] = sums[index_of(arm)] / r.arm_counts[index_of(arm)];
  return r;
}

// Cohen's d on adjusted means, scaled by the residual SD of the full model.
inline double cohens_d_adjusted(const AncovaResult& r, Arm a, Arm b) {
  if (!(r.sigma2 > 0.0)) throw Error(Errc::DegenerateResidual, "sigma", "residual variance is zero");
  return (r.adjusted_mean(a) - r.adjusted_mean(b)) / r.residual_sd();
}

struct DissipationReport {
  AncovaResult at_post;
  AncovaResult at_followup;
  std::array<double, 3> recovery{};  // adjusted followup minus adjusted post, per arm
  double followup_fraction = 0.0;
  Eigen::Index complete_cases = 0;
};

// The same ANCOVA fitted to post and to follow-up outcomes on the complete
// cases. Requires follow-up data for at least `min_followup_fraction` of rows.
inline DissipationReport dissipation_contrast(std::span<const AnalysisRow> rows, double min_followup_fraction = 0.8,
                                              const DesignOptions& options = {}) {
  std::vector<AnalysisRow> complete;
  for (const auto& r : rows) {
    if (r.followup) complete.push_back(r);
  }
  DissipationReport out;
  out.followup_fraction = rows.empty() ? 0.0 : static_cast<double>(complete.size()) / static_cast<double>(rows.size());
  if (rows.empty() || out.followup_fraction < min_followup_fraction) {
    throw Error(Errc::InsufficientFollowup, std::to_string(out.followup_fraction),
                "follow-up present for fewer than " + std::to_string(min_followup_fraction * 100) + "% of rows");
  }
  out.complete_cases = static_cast<Eigen::Index>(complete.size());
  out.at_post = ancova_arm_effect(complete, options);
  std::vector<AnalysisRow> shifted = complete;
  for (auto& r : shifted) r.post = *r.followup;
  out.at_followup = ancova_arm_effect(shifted, options);
  for (Arm arm : kArms) {
    out.recovery[index_of(arm)] = out.at_followup.adjusted_mean(arm) - out.at_post.adjusted_mean(arm);
  }
  return out;
}

}  // namespace shieldup
