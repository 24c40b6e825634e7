#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "shieldup/analysis/ancova.hpp"
#include "shieldup/analysis/dataset.hpp"

namespace shieldup {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
  int n = 0;
};

// Raw score means and standard errors per arm at pre, post and follow-up,
// each over the participants who have that score.
struct Descriptives {
  std::array<std::array<MeanSe, 3>, 3> cells{};  // [arm][phase]

  const MeanSe& at(Arm arm, int phase) const { return cells[index_of(arm)][static_cast<std::size_t>(phase)]; }
};

inline constexpr std::array<std::string_view, 3> kPhaseLabels{"pre", "post", "followup21"};

inline Descriptives describe(std::span<const ExportRow> rows, ScoreKind outcome) {
  const bool scam = outcome == ScoreKind::Scam;
  const std::array<ScoreSlot, 3> slots = scam ? std::array{ScoreSlot::PreScam, ScoreSlot::PostScam, ScoreSlot::FuScam}
                                              : std::array{ScoreSlot::PreNotScam, ScoreSlot::PostNotScam,
                                                           ScoreSlot::FuNotScam};
  Descriptives d;
  for (Arm arm : kArms) {
    for (std::size_t p = 0; p < 3; ++p) {
      double sum = 0.0, sq = 0.0;
      int n = 0;
      for (const auto& r : rows) {
        if (r.arm != arm || !r.score(slots[p])) continue;
        const double v = *r.score(slots[p]);
        sum += v;
        ++n;
      }
      MeanSe cell;
      cell.n = n;
      if (n > 0) {
        cell.mean = sum / n;
        for (const auto& r : rows) {
          if (r.arm != arm || !r.score(slots[p])) continue;
          const double dv = *r.score(slots[p]) - cell.mean;
          sq += dv * dv;
        }
        cell.se = n > 1 ? std::sqrt(sq / (n - 1) / n) : 0.0;
      }
      d.cells[index_of(arm)][p] = cell;
    }
  }
  return d;
}

inline nlohmann::json to_json(const AncovaResult& r) {
  using nlohmann::json;
  json arms_adj = json::object(), arms_se = json::object(), arms_raw = json::object(), arms_n = json::object();
  for (Arm arm : kArms) {
    const std::string name(name_of(arm));
    arms_adj[name] = r.adjusted_means[index_of(arm)];
    arms_se[name] = r.standard_errors[index_of(arm)];
    arms_raw[name] = r.raw_means[index_of(arm)];
    arms_n[name] = r.arm_counts[index_of(arm)];
  }
  json coefficients = json::array();
  for (std::size_t i = 0; i < r.coefficient_names.size(); ++i) {
    coefficients.push_back({{"term", r.coefficient_names[i]},
                            {"estimate", r.coefficients(static_cast<Eigen::Index>(i))},
                            {"se", r.coefficient_se(static_cast<Eigen::Index>(i))}});
  }
  return {{"n", r.n},
          {"coefficients", coefficients},
          {"F_arm", r.f_arm},
          {"df", {r.df_num, r.df_den}},
          {"p_value", r.p_value},
          {"partial_eta_sq", r.partial_eta_sq},
          {"ss_arm", r.ss_arm},
          {"rss_full", r.rss_full},
          {"rss_reduced", r.rss_reduced},
          {"residual_sd", r.residual_sd()},
          {"adjusted_means", arms_adj},
          {"standard_errors", arms_se},
          {"raw_means", arms_raw},
          {"arm_counts", arms_n}};
}

inline nlohmann::json effect_sizes_json(const AncovaResult& r) {
  return {{"ShieldUp-ChromeDino", cohens_d_adjusted(r, Arm::ShieldUp, Arm::ChromeDino)},
          {"GeneralAwareness-ChromeDino", cohens_d_adjusted(r, Arm::GeneralAwareness, Arm::ChromeDino)},
          {"ShieldUp-GeneralAwareness", cohens_d_adjusted(r, Arm::ShieldUp, Arm::GeneralAwareness)}};
}

inline nlohmann::json to_json(const Descriptives& d) {
  using nlohmann::json;
  json out = json::object();
  for (Arm arm : kArms) {
    json phases = json::object();
    for (int p = 0; p < 3; ++p) {
      const MeanSe& c = d.at(arm, p);
      phases[std::string(kPhaseLabels[static_cast<std::size_t>(p)])] = {{"mean", c.mean}, {"se", c.se}, {"n", c.n}};
    }
    out[std::string(name_of(arm))] = phases;
  }
  return out;
}

// The document emitted by both `analyze` and POST /analyze.
inline nlohmann::json analysis_report(std::span<const ExportRow> rows, ScoreKind outcome, AnalysisPhase phase,
                                      const DesignOptions& options = {}) {
  const std::vector<AnalysisRow> model_rows = analysis_rows(rows, outcome, phase);
  const AncovaResult r = ancova_arm_effect(model_rows, options);
  nlohmann::json doc = to_json(r);
  doc["outcome"] = name_of(outcome);
  doc["phase"] = name_of(phase);
  doc["excluded"] = static_cast<long long>(rows.size() - model_rows.size());
  doc["cohens_d"] = effect_sizes_json(r);
  doc["descriptives"] = to_json(describe(rows, outcome));
  doc["note"] = "pairwise contrasts are not adjusted for multiple comparisons";
  return doc;
}

inline std::string format_fixed(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// Means +- SE by arm and phase, followed by the model summary.
inline std::string summary_table(const nlohmann::json& report) {
  std::string out;
  const std::string outcome = report.at("outcome").get<std::string>();
  out += (outcome == "scam" ? "Scam identification score" : "Not-scam identification score");
  out += " (0-5), mean +- SE\n";
  char line[256];
  std::snprintf(line, sizeof line, "%-18s %-20s %-20s %-20s\n", "arm", "pre", "post", "followup21");
  out += line;
  const auto& desc = report.at("descriptives");
  for (Arm arm : kArms) {
    const auto& row = desc.at(std::string(name_of(arm)));
    std::string cells[3];
    for (std::size_t p = 0; p < 3; ++p) {
      const auto& c = row.at(std::string(kPhaseLabels[p]));
      cells[p] = c.at("n").get<int>() > 0
                     ? format_fixed(c.at("mean").get<double>()) + " +- " + format_fixed(c.at("se").get<double>())
                     : "-";
    }
    std::snprintf(line, sizeof line, "%-18s %-20s %-20s %-20s\n", std::string(name_of(arm)).c_str(),
                  cells[0].c_str(), cells[1].c_str(), cells[2].c_str());
    out += line;
  }
  const auto df = report.at("df");
  std::snprintf(line, sizeof line, "\nANCOVA (%s outcome, n=%lld): F(%d, %lld) = %.4f, p = %.3g, partial eta^2 = %.4f\n",
                report.at("phase").get<std::string>().c_str(), report.at("n").get<long long>(), df[0].get<int>(),
                df[1].get<long long>(), report.at("F_arm").get<double>(), report.at("p_value").get<double>(),
                report.at("partial_eta_sq").get<double>());
  out += line;
  out += "adjusted means (SE):";
  for (Arm arm : kArms) {
    const std::string name(name_of(arm));
    out += " " + name + " " + format_fixed(report.at("adjusted_means").at(name).get<double>()) + " (" +
           format_fixed(report.at("standard_errors").at(name).get<double>()) + ")";
  }
  out += "\ncohen's d:";
  for (const auto& [pair, d] : report.at("cohens_d").items()) out += " " + pair + " " + format_fixed(d.get<double>());
  out += "\n";
  return out;
}

// Line chart of arm means across phases with +-1 SE error bars.
inline std::string means_svg(const nlohmann::json& report) {
  constexpr double width = 640, height = 400, left = 60, right = 170, top = 40, bottom = 50;
  constexpr std::array<const char*, 3> colors{"#1b9e77", "#d95f02", "#7570b3"};
  const auto& desc = report.at("descriptives");
  double lo = 5.0, hi = 0.0;
  for (Arm arm : kArms) {
    for (auto label : kPhaseLabels) {
      const auto& c = desc.at(std::string(name_of(arm))).at(std::string(label));
      if (c.at("n").get<int>() == 0) continue;
      lo = std::min(lo, c.at("mean").get<double>() - c.at("se").get<double>());
      hi = std::max(hi, c.at("mean").get<double>() + c.at("se").get<double>());
    }
  }
  if (hi <= lo) {
    lo = 0.0;
    hi = 5.0;
  }
  const double pad = 0.1 * (hi - lo);
  lo = std::max(0.0, lo - pad);
  hi = std::min(5.0, hi + pad);
  if (hi <= lo) hi = lo + 1.0;
  const double plot_w = width - left - right, plot_h = height - top - bottom;
  auto x_of = [&](int p) { return left + plot_w * (0.1 + 0.4 * p); };
  auto y_of = [&](double v) { return top + plot_h * (1.0 - (v - lo) / (hi - lo)); };

  std::string svg;
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" font-family=\"sans-serif\" "
                "font-size=\"12\">\n",
                width, height);
  svg += buf;
  const std::string title = report.at("outcome").get<std::string>() == "scam" ? "Mean scam identification score"
                                                                               : "Mean not-scam identification score";
  std::snprintf(buf, sizeof buf, "<text x=\"%.0f\" y=\"20\" font-size=\"14\">%s (error bars: SE)</text>\n", left,
                title.c_str());
  svg += buf;
  std::snprintf(buf, sizeof buf,
                "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n"
                "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>\n",
                left, top, left, top + plot_h, left, top + plot_h, left + plot_w, top + plot_h);
  svg += buf;
  for (int t = 0; t <= 4; ++t) {
    const double v = lo + (hi - lo) * t / 4.0;
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">%.2f</text>\n", left - 6,
                  y_of(v) + 4, v);
    svg += buf;
  }
  for (int p = 0; p < 3; ++p) {
    std::snprintf(buf, sizeof buf, "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%s</text>\n", x_of(p),
                  top + plot_h + 20, std::string(kPhaseLabels[static_cast<std::size_t>(p)]).c_str());
    svg += buf;
  }
  for (Arm arm : kArms) {
    const char* color = colors[index_of(arm)];
    const auto& row = desc.at(std::string(name_of(arm)));
    std::string points;
    for (int p = 0; p < 3; ++p) {
      const auto& c = row.at(std::string(kPhaseLabels[static_cast<std::size_t>(p)]));
      if (c.at("n").get<int>() == 0) continue;
      const double m = c.at("mean").get<double>(), se = c.at("se").get<double>();
      const double x = x_of(p) + (static_cast<double>(index_of(arm)) - 1.0) * 6.0;
      std::snprintf(buf, sizeof buf,
                    "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"%s\"/>\n"
                    "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"4\" fill=\"%s\"/>\n",
                    x, y_of(m - se), x, y_of(m + se), color, x, y_of(m), color);
      svg += buf;
      std::snprintf(buf, sizeof buf, "%.1f,%.1f ", x, y_of(m));
      points += buf;
    }
    std::snprintf(buf, sizeof buf, "<polyline points=\"%s\" fill=\"none\" stroke=\"%s\"/>\n", points.c_str(), color);
    svg += buf;
    const double ly = top + 20.0 * static_cast<double>(index_of(arm));
    std::snprintf(buf, sizeof buf,
                  "<rect x=\"%.1f\" y=\"%.1f\" width=\"10\" height=\"10\" fill=\"%s\"/>"
                  "<text x=\"%.1f\" y=\"%.1f\">%s</text>\n",
                  width - right + 20, ly, color, width - right + 36, ly + 10, std::string(name_of(arm)).c_str());
    svg += buf;
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace shieldup
