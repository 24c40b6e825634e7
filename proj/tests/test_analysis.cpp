#include <gtest/gtest.h>

#include "oracles.hpp"
#include "shieldup/analysis/report.hpp"
#include "shieldup/stats/distributions.hpp"
#include "support.hpp"

using namespace shieldup;
using namespace testing_support;

namespace {

oracle::Matrix to_rows(const Eigen::MatrixXd& x) {
  oracle::Matrix m(static_cast<std::size_t>(x.rows()), std::vector<double>(static_cast<std::size_t>(x.cols())));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) m[i][j] = x(i, j);
  }
  return m;
}

AnalysisRow row(std::string id, Arm arm, double pre, double post, int age, std::string gender, int income = 2,
                int edu = 3) {
  AnalysisRow r;
  r.participant_id = std::move(id);
  r.arm = arm;
  r.pre = pre;
  r.post = post;
  r.age = age;
  r.gender = std::move(gender);
  r.income_level = income;
  r.education_level = edu;
  return r;
}

std::vector<AnalysisRow> small_rows(std::uint32_t seed, int n = 60) {
  std::mt19937 gen(seed);
  std::vector<AnalysisRow> rows;
  for (int i = 0; i < n; ++i) {
    rows.push_back(row("P" + std::to_string(i), kArms[static_cast<std::size_t>(i % 3)], gen() % 6, gen() % 6,
                       18 + static_cast<int>(gen() % 50), i % 2 ? "female" : "male", 1 + static_cast<int>(gen() % 5),
                       1 + static_cast<int>(gen() % 5)));
  }
  return rows;
}

std::vector<AnalysisRow> post_rows(const std::vector<ExportRow>& rows, ScoreKind kind = ScoreKind::Scam,
                                   AnalysisPhase phase = AnalysisPhase::Post) {
  return analysis_rows(rows, kind, phase);
}

}  // namespace

TEST(IncompleteBeta, MatchesNumericalIntegration) {
  const std::vector<std::tuple<double, double, double>> cases{
      {0.3, 2.0, 3.0},    {0.7, 2.0, 3.0},   {0.5, 0.5, 0.5},    {0.1, 0.5, 2.5},    {0.95, 3.5, 0.7},
      {0.2, 1.0, 1.0},    {0.999, 1.0, 1497.5}, {0.002, 1.0, 1497.5}, {0.6, 10.0, 12.0}, {0.45, 25.0, 20.0},
      {0.98, 1497.5, 1.0}};
  for (auto [x, a, b] : cases) {
    EXPECT_NEAR(stats::incomplete_beta(x, a, b), oracle::incomplete_beta(x, a, b), 1e-8)
        << "x=" << x << " a=" << a << " b=" << b;
  }
}

TEST(IncompleteBeta, SymmetryAndBounds) {
  for (double x : {0.05, 0.3, 0.5, 0.8}) {
    EXPECT_NEAR(stats::incomplete_beta(x, 2.5, 4.0) + stats::incomplete_beta(1 - x, 4.0, 2.5), 1.0, 1e-14);
  }
  EXPECT_EQ(stats::incomplete_beta(0.0, 2, 3), 0.0);
  EXPECT_EQ(stats::incomplete_beta(1.0, 2, 3), 1.0);
  EXPECT_THROW(stats::incomplete_beta(0.5, 0.0, 1.0), Error);
}

TEST(FDistribution, TailsAndKnownValues) {
  EXPECT_EQ(stats::f_sf(0.0, 2, 100), 1.0);
  // F(2, d) has the closed-form tail (1 + 2f/d)^(-d/2).
  for (double f : {0.5, 1.0, 3.0, 10.0}) {
    EXPECT_NEAR(stats::f_sf(f, 2, 50), std::pow(1 + 2 * f / 50, -25.0), 1e-12);
    EXPECT_NEAR(stats::f_cdf(f, 2, 50) + stats::f_sf(f, 2, 50), 1.0, 1e-14);
  }
  EXPECT_GT(stats::f_sf(150.0, 2, 2991), 0.0);
  EXPECT_LT(stats::f_sf(150.0, 2, 2991), 1e-50);
}

TEST(FDistribution, KsStatistic) {
  EXPECT_DOUBLE_EQ(stats::ks_uniform_statistic({0.5}), 0.5);
  std::vector<double> grid;
  for (int i = 0; i < 100; ++i) grid.push_back((i + 0.5) / 100);
  EXPECT_NEAR(stats::ks_uniform_statistic(grid), 0.005, 1e-12);
}

TEST(Ols, MatchesNormalEquations) {
  for (std::uint32_t seed : {1u, 2u, 3u}) {
    auto xr = oracle::random_gaussian(100, 5, seed);
    for (auto& r : xr) r[0] = 1.0;
    const auto noise = oracle::random_gaussian(100, 1, seed + 50);
    std::vector<double> y;
    Eigen::MatrixXd x(100, 5);
    Eigen::VectorXd yv(100);
    for (int i = 0; i < 100; ++i) {
      double v = noise[i][0];
      for (int j = 0; j < 5; ++j) {
        x(i, j) = xr[i][j];
        v += (j + 1) * 0.7 * xr[i][j];
      }
      y.push_back(v);
      yv(i) = v;
    }
    const OlsFit fit = fit_ols(x, yv);
    const auto want = oracle::ols_normal_equations(xr, y);
    for (int j = 0; j < 5; ++j) EXPECT_NEAR(fit.coefficients(j), want[j], 1e-8 * std::max(1.0, std::abs(want[j])));
    EXPECT_LT((x.transpose() * fit.residuals).norm(), 1e-8 * yv.norm());
    EXPECT_EQ(fit.df_resid, 95);
  }
}

TEST(Ols, RankDeficientDesignIsRejected) {
  Eigen::MatrixXd x(10, 3);
  for (int i = 0; i < 10; ++i) x.row(i) << 1, i, 2 * i + 1;
  try {
    fit_ols(x, Eigen::VectorXd::Ones(10));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::RankDeficient);
  }
}

TEST(Design, SimulatedDesignRankMatchesPivotedElimination) {
  const auto rows = post_rows(simulated_export(cohort(20240521)));
  const DesignMatrix d = build_design(rows);
  ASSERT_EQ(d.x.rows(), 3000);
  // intercept, 2 arm dummies, pre, age, 2 gender dummies, income, education
  EXPECT_EQ(d.x.cols(), 9);
  EXPECT_EQ(numerical_rank(d.x), 9);
  EXPECT_EQ(oracle::rank(to_rows(d.x)), 9);

  std::vector<AnalysisRow> binary;
  for (const auto& r : rows) {
    if (r.gender != "nonbinary") binary.push_back(r);
  }
  const DesignMatrix d2 = build_design(binary);
  EXPECT_EQ(d2.x.cols(), 8);
  EXPECT_EQ(oracle::rank(to_rows(d2.x)), 8);
  EXPECT_EQ(numerical_rank(d2.x), 8);
}

TEST(Design, DummyCodingOfOrdinals) {
  const auto rows = small_rows(4);
  const DesignMatrix scores = build_design(rows);
  const DesignMatrix dummies = build_design(rows, {.ordinal_as_score = false});
  EXPECT_EQ(scores.column("income_level"), 6);
  EXPECT_EQ(dummies.x.cols(), scores.x.cols() - 2 + 4 + 4);
  EXPECT_NO_THROW(dummies.column("income_level[5]"));
}

TEST(Ancova, GuardsAgainstBadInput) {
  auto rows = small_rows(1);
  auto one_arm = rows;
  for (auto& r : one_arm) r.arm = Arm::ShieldUp;
  try {
    ancova_arm_effect(one_arm);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::RankDeficient);
  }
  auto no_gender = rows;
  no_gender[3].gender.clear();
  try {
    ancova_arm_effect(no_gender);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::MissingField);
  }
  auto exact = rows;
  for (auto& r : exact) r.post = r.pre;
  try {
    ancova_arm_effect(exact);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::DegenerateResidual);
  }
  EXPECT_THROW(ancova_arm_effect(std::vector<AnalysisRow>(rows.begin(), rows.begin() + 8)), Error);
}

TEST(Ancova, NestedModelFIsConsistent) {
  const auto rows = small_rows(9, 90);
  const AncovaResult r = ancova_arm_effect(rows);
  EXPECT_NEAR(r.f_arm, (r.ss_arm / 2) / (r.rss_full / static_cast<double>(r.df_den)), 1e-12);
  EXPECT_NEAR(r.p_value, stats::f_sf(r.f_arm, 2, static_cast<double>(r.df_den)), 1e-15);
  // Two genders: intercept, 2 arm dummies, pre, age, 1 gender dummy, income, education.
  EXPECT_EQ(r.df_den, 90 - 8);
  EXPECT_GE(r.rss_reduced, r.rss_full);
  // The adjusted means differ exactly by the arm coefficients.
  EXPECT_NEAR(r.adjusted_mean(Arm::ShieldUp) - r.adjusted_mean(Arm::ChromeDino), r.coefficients(1), 1e-12);
  EXPECT_NEAR(r.adjusted_mean(Arm::GeneralAwareness) - r.adjusted_mean(Arm::ChromeDino), r.coefficients(2), 1e-12);
}

TEST(Ancova, ZeroFGivesPOne) {
  // Identical outcome distributions in every arm: the arm SS is zero.
  std::vector<AnalysisRow> rows;
  int i = 0;
  for (Arm arm : kArms) {
    for (int k = 0; k < 12; ++k) {
      rows.push_back(row("P" + std::to_string(i++), arm, k % 6, (k * 5 + 1) % 6, 20 + k, k % 2 ? "female" : "male",
                         1 + k % 3, 1 + k % 4));
    }
  }
  const AncovaResult r = ancova_arm_effect(rows);
  EXPECT_NEAR(r.f_arm, 0.0, 1e-10);
  EXPECT_NEAR(r.p_value, 1.0, 1e-9);
}

TEST(Ancova, InjectedEffectsAreRecovered) {
  const auto rows = post_rows(simulated_export(cohort(7)));
  const AncovaResult r = ancova_arm_effect(rows);
  EXPECT_LT(r.p_value, 1e-3);
  EXPECT_GT(r.adjusted_mean(Arm::ShieldUp), r.adjusted_mean(Arm::GeneralAwareness));
  EXPECT_GT(r.adjusted_mean(Arm::GeneralAwareness), r.adjusted_mean(Arm::ChromeDino));
  EXPECT_GT(cohens_d_adjusted(r, Arm::ShieldUp, Arm::ChromeDino),
            cohens_d_adjusted(r, Arm::GeneralAwareness, Arm::ChromeDino));
}

TEST(Ancova, HalfSdShiftGivesHalfSdEffect) {
  auto cfg = cohort(11);
  cfg.effects = {sim::ArmEffect{0.5, 0, 1}, sim::ArmEffect{0, 0, 1}, sim::ArmEffect{0, 0, 1}};
  const AncovaResult r = ancova_arm_effect(post_rows(simulated_export(cfg)));
  EXPECT_NEAR(cohens_d_adjusted(r, Arm::ShieldUp, Arm::ChromeDino), 0.5, 0.1);
}

TEST(Ancova, SmallNullTrialsRarelyReject) {
  int quiet = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    auto cfg = cohort(seed, 30);
    cfg.effects = {};
    quiet += ancova_arm_effect(post_rows(simulated_export(cfg))).p_value > 0.05;
  }
  EXPECT_GE(quiet, 90);
}

TEST(Dissipation, NotScamDipFadesByFollowup) {
  const auto rows = simulated_export(cohort(3));
  const auto model_rows = post_rows(rows, ScoreKind::NotScam);
  const DissipationReport d = dissipation_contrast(model_rows);
  EXPECT_LT(d.at_post.p_value, 0.05);
  EXPECT_GT(d.at_followup.p_value, 0.05);
  EXPECT_GT(d.followup_fraction, 0.9);
  EXPECT_GT(d.recovery[index_of(Arm::ShieldUp)], 0.0);
}

TEST(Dissipation, RequiresEnoughFollowup) {
  auto rows = small_rows(2, 30);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i < 10) rows[i].followup = 3;
  }
  try {
    dissipation_contrast(rows);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::InsufficientFollowup);
  }
}

TEST(ExportCsv, RoundTripAndRowFilters) {
  const auto rows = simulated_export(cohort(5, 60));
  EXPECT_EQ(parse_export_csv(write_export_csv(rows)), rows);
  std::vector<ExportRow> partial = rows;
  partial[0].score(ScoreSlot::PostScam).reset();
  EXPECT_EQ(analysis_rows(partial, ScoreKind::Scam, AnalysisPhase::Post).size(), rows.size() - 1);
  try {
    parse_export_csv("participant_id,arm\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::Schema);
  }
}

TEST(Report, DocumentShapeAndRendering) {
  const auto rows = simulated_export(cohort(6, 300));
  const auto doc = analysis_report(rows, ScoreKind::Scam, AnalysisPhase::Post);
  for (const char* key : {"F_arm", "p_value", "df", "adjusted_means", "standard_errors", "cohens_d", "descriptives",
                          "coefficients", "partial_eta_sq", "excluded", "outcome", "phase"}) {
    EXPECT_TRUE(doc.contains(key)) << key;
  }
  EXPECT_EQ(doc.at("outcome"), "scam");
  EXPECT_EQ(doc.at("descriptives").at("ShieldUp").at("pre").at("n"), 100);
  const std::string table = summary_table(doc);
  EXPECT_NE(table.find("ShieldUp"), std::string::npos);
  const std::string svg = means_svg(doc);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);
}
