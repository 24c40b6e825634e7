#pragma once

#include <cmath>

#include <Eigen/Dense>

#include "shieldup/analysis/design.hpp"

namespace shieldup {

struct OlsFit {
  Eigen::VectorXd coefficients;
  Eigen::VectorXd residuals;
  Eigen::MatrixXd covariance;  // (X'X)^-1 * sigma^2
  Eigen::VectorXd standard_errors;
  double rss = 0.0;
  double sigma2 = 0.0;
  Eigen::Index df_resid = 0;
};

// Least squares through Householder QR of X. The coefficient covariance uses
// (X'X)^-1 = R^-1 R^-T.
inline OlsFit fit_ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  if (x.rows() != y.size()) throw Error(Errc::InvalidMatrix, "y", "length must equal design rows");
  const Eigen::Index n = x.rows(), p = x.cols();
  if (numerical_rank(x) < p) throw Error(Errc::RankDeficient, "design", "design matrix is not full column rank");

  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
  OlsFit fit;
  fit.coefficients = qr.solve(y);
  fit.residuals = y - x * fit.coefficients;
  fit.rss = fit.residuals.squaredNorm();
  fit.df_resid = n - p;

  const Eigen::MatrixXd r = qr.matrixQR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd r_inv =
      r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(p, p));
  const Eigen::MatrixXd xtx_inv = r_inv * r_inv.transpose();
  fit.sigma2 = fit.df_resid > 0 ? fit.rss / static_cast<double>(fit.df_resid) : 0.0;
  fit.covariance = xtx_inv * fit.sigma2;
  fit.standard_errors = fit.covariance.diagonal().cwiseSqrt();
  return fit;
}

}  // namespace shieldup
