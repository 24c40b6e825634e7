#pragma once

#include <cmath>
#include <vector>

#include "shieldup/psychometrics/response_matrix.hpp"

namespace shieldup {

namespace detail {

inline double sample_variance(const Eigen::VectorXd& x) {
  const double mean = x.mean();
  return (x.array() - mean).square().sum() / static_cast<double>(x.size() - 1);
}

// Variances this small relative to the data scale are treated as zero.
inline bool negligible_variance(double var, const Eigen::VectorXd& x) {
  const double scale = std::max(1.0, x.cwiseAbs().maxCoeff());
  return var <= 1e-24 * scale * scale;
}

inline double pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  const Eigen::ArrayXd dx = x.array() - x.mean();
  const Eigen::ArrayXd dy = y.array() - y.mean();
  return (dx * dy).sum() / std::sqrt(dx.square().sum() * dy.square().sum());
}

}  // namespace detail

// alpha = k/(k-1) * (1 - sum(item variances) / variance(total)),
// sample variances throughout.
inline double cronbach_alpha(const ResponseMatrix& m) {
  const Eigen::Index k = m.items();
  if (k < 2) throw Error(Errc::TooFewItems, std::to_string(k));
  double item_var_sum = 0.0;
  for (Eigen::Index j = 0; j < k; ++j) item_var_sum += detail::sample_variance(m.cells().col(j));
  const Eigen::VectorXd total = m.cells().rowwise().sum();
  const double total_var = detail::sample_variance(total);
  if (detail::negligible_variance(total_var, total)) {
    throw Error(Errc::ZeroTotalVariance, "total", "total score is constant across respondents");
  }
  return static_cast<double>(k) / static_cast<double>(k - 1) * (1.0 - item_var_sum / total_var);
}

// Corrected item-total (rest-score) correlation per item.
inline std::vector<double> item_total_correlation(const ResponseMatrix& m) {
  if (m.respondents() < 3) throw Error(Errc::InvalidMatrix, "respondents", "need at least 3 respondents");
  const Eigen::VectorXd total = m.cells().rowwise().sum();
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(m.items()));
  for (Eigen::Index j = 0; j < m.items(); ++j) {
    const Eigen::VectorXd item = m.cells().col(j);
    const Eigen::VectorXd rest = total - item;
    const auto& id = m.item_ids()[static_cast<std::size_t>(j)];
    if (detail::negligible_variance(detail::sample_variance(item), item)) {
      throw Error(Errc::ZeroVariance, id, "item column is constant");
    }
    if (detail::negligible_variance(detail::sample_variance(rest), rest)) {
      throw Error(Errc::ZeroVariance, id, "rest score is constant");
    }
    out.push_back(detail::pearson(item, rest));
  }
  return out;
}

struct ReliabilityReport {
  double alpha = 0.0;
  std::vector<double> item_total;
};

inline ReliabilityReport reliability(const ResponseMatrix& m) {
  return {cronbach_alpha(m), item_total_correlation(m)};
}

}  // namespace shieldup
