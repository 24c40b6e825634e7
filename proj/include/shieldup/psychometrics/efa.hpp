#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "shieldup/psychometrics/reliability.hpp"
#include "shieldup/psychometrics/response_matrix.hpp"

namespace shieldup {

struct SymmetricEigen {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // column j pairs with values(j)
  int sweeps = 0;
};

inline double off_diagonal_norm(const Eigen::MatrixXd& a) {
  double s = 0.0;
  for (Eigen::Index p = 0; p < a.rows(); ++p) {
    for (Eigen::Index q = 0; q < a.cols(); ++q) {
      if (p != q) s += a(p, q) * a(p, q);
    }
  }
  return std::sqrt(s);
}

// Cyclic Jacobi: sweep every (p, q) pair with a plane rotation zeroing a(p, q)
// until the off-diagonal Frobenius norm drops below `tolerance`. Eigenpairs
// are returned by descending eigenvalue; each eigenvector is signed so that
// its largest-magnitude component is positive.
inline SymmetricEigen jacobi_eigen(Eigen::MatrixXd a, double tolerance = 1e-10, int max_sweeps = 100) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw Error(Errc::InvalidMatrix, "shape", "square matrix required");
  if (!a.isApprox(a.transpose(), 1e-12)) throw Error(Errc::InvalidMatrix, "symmetry", "symmetric matrix required");
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  int sweeps = 0;
  while (off_diagonal_norm(a) >= tolerance && sweeps < max_sweeps) {
    ++sweeps;
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        // A <- J^T A J with J the rotation in the (p, q) plane.
        for (Eigen::Index r = 0; r < n; ++r) {
          const double arp = a(r, p), arq = a(r, q);
          a(r, p) = c * arp - s * arq;
          a(r, q) = s * arp + c * arq;
        }
        for (Eigen::Index r = 0; r < n; ++r) {
          const double apr = a(p, r), aqr = a(q, r);
          a(p, r) = c * apr - s * aqr;
          a(q, r) = s * apr + c * aqr;
        }
        a(p, q) = a(q, p) = 0.0;
        for (Eigen::Index r = 0; r < n; ++r) {
          const double vrp = v(r, p), vrq = v(r, q);
          v(r, p) = c * vrp - s * vrq;
          v(r, q) = s * vrp + c * vrq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) { return a(x, x) > a(y, y); });
  SymmetricEigen out;
  out.values.resize(n);
  out.vectors.resize(n, n);
  out.sweeps = sweeps;
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index src = order[static_cast<std::size_t>(j)];
    out.values(j) = a(src, src);
    Eigen::VectorXd col = v.col(src);
    Eigen::Index big = 0;
    col.cwiseAbs().maxCoeff(&big);
    if (col(big) < 0) col = -col;
    out.vectors.col(j) = col;
  }
  return out;
}

inline Eigen::MatrixXd correlation_matrix(const ResponseMatrix& m) {
  const Eigen::Index k = m.items();
  Eigen::MatrixXd centered = m.cells().rowwise() - m.cells().colwise().mean();
  Eigen::VectorXd sd(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    const double ss = centered.col(j).squaredNorm();
    if (detail::negligible_variance(ss / static_cast<double>(m.respondents() - 1), m.cells().col(j))) {
      throw Error(Errc::ZeroVariance, m.item_ids()[static_cast<std::size_t>(j)], "item column is constant");
    }
    sd(j) = std::sqrt(ss);
  }
  Eigen::MatrixXd r = centered.transpose() * centered;
  for (Eigen::Index p = 0; p < k; ++p) {
    for (Eigen::Index q = 0; q < k; ++q) r(p, q) /= sd(p) * sd(q);
  }
  for (Eigen::Index p = 0; p < k; ++p) {
    r(p, p) = 1.0;
    for (Eigen::Index q = p + 1; q < k; ++q) r(q, p) = r(p, q) = std::clamp(0.5 * (r(p, q) + r(q, p)), -1.0, 1.0);
  }
  return r;
}

inline double varimax_criterion(const Eigen::MatrixXd& loadings) {
  const double k = static_cast<double>(loadings.rows());
  double total = 0.0;
  for (Eigen::Index j = 0; j < loadings.cols(); ++j) {
    const Eigen::ArrayXd sq = loadings.col(j).array().square();
    total += sq.square().sum() / k - std::pow(sq.sum() / k, 2);
  }
  return total;
}

struct VarimaxResult {
  Eigen::MatrixXd loadings;
  int sweeps = 0;
  bool converged = false;
};

// Kaiser-normalized varimax by successive planar rotations of factor pairs.
// Converged when no rotation angle in a sweep exceeds `tolerance`.
inline VarimaxResult varimax(const Eigen::MatrixXd& loadings, double tolerance = 1e-8, int max_sweeps = 100) {
  const Eigen::Index k = loadings.rows();
  const Eigen::Index m = loadings.cols();
  VarimaxResult out{loadings, 0, m < 2};
  if (m < 2) return out;
  Eigen::VectorXd h = loadings.rowwise().norm();
  Eigen::MatrixXd x = loadings;
  for (Eigen::Index i = 0; i < k; ++i) {
    if (h(i) > 0) x.row(i) /= h(i);
  }
  const double kd = static_cast<double>(k);
  while (out.sweeps < max_sweeps) {
    ++out.sweeps;
    double largest = 0.0;
    for (Eigen::Index p = 0; p < m - 1; ++p) {
      for (Eigen::Index q = p + 1; q < m; ++q) {
        const Eigen::ArrayXd xp = x.col(p).array(), xq = x.col(q).array();
        const Eigen::ArrayXd u = xp.square() - xq.square();
        const Eigen::ArrayXd v = 2.0 * xp * xq;
        const double A = u.sum(), B = v.sum();
        const double C = (u.square() - v.square()).sum();
        const double D = 2.0 * (u * v).sum();
        const double phi = 0.25 * std::atan2(D - 2.0 * A * B / kd, C - (A * A - B * B) / kd);
        largest = std::max(largest, std::abs(phi));
        const double c = std::cos(phi), s = std::sin(phi);
        x.col(p) = (c * xp + s * xq).matrix();
        x.col(q) = (-s * xp + c * xq).matrix();
      }
    }
    if (largest < tolerance) {
      out.converged = true;
      break;
    }
  }
  for (Eigen::Index i = 0; i < k; ++i) x.row(i) *= h(i);
  out.loadings = x;
  return out;
}

struct FactorLoadings {
  Eigen::MatrixXd loadings;                 // items x factors
  std::vector<double> explained_variance;   // per factor, fraction of total variance
  std::vector<double> eigenvalues;          // all k, descending
  std::vector<double> communalities;        // per item
  int jacobi_sweeps = 0;
  int varimax_sweeps = 0;
  bool varimax_converged = false;

  // Column holding each item's largest-magnitude loading.
  std::vector<int> primary_factor() const {
    std::vector<int> out;
    for (Eigen::Index i = 0; i < loadings.rows(); ++i) {
      Eigen::Index best = 0;
      loadings.row(i).cwiseAbs().maxCoeff(&best);
      out.push_back(static_cast<int>(best));
    }
    return out;
  }
};

// Principal-component extraction from the Pearson correlation matrix followed
// by varimax. Factors are ordered by rotated sum of squared loadings, and each
// column is signed so its largest-magnitude loading is positive.
inline FactorLoadings efa_principal(const ResponseMatrix& m, int factors) {
  const Eigen::Index k = m.items();
  if (factors < 1 || factors > k) {
    throw Error(Errc::FactorCountTooLarge, std::to_string(factors),
                "factor count must be between 1 and the number of items (" + std::to_string(k) + ")");
  }
  const Eigen::MatrixXd r = correlation_matrix(m);
  const SymmetricEigen eig = jacobi_eigen(r);

  Eigen::MatrixXd unrotated(k, factors);
  for (int f = 0; f < factors; ++f) {
    unrotated.col(f) = eig.vectors.col(f) * std::sqrt(std::max(0.0, eig.values(f)));
  }
  const VarimaxResult rotated = varimax(unrotated);

  std::vector<int> order(static_cast<std::size_t>(factors));
  std::iota(order.begin(), order.end(), 0);
  Eigen::VectorXd ss = rotated.loadings.colwise().squaredNorm();
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return ss(x) > ss(y) + 1e-12; });

  FactorLoadings out;
  out.loadings.resize(k, factors);
  for (int f = 0; f < factors; ++f) {
    Eigen::VectorXd col = rotated.loadings.col(order[static_cast<std::size_t>(f)]);
    Eigen::Index big = 0;
    col.cwiseAbs().maxCoeff(&big);
    if (col(big) < 0) col = -col;
    out.loadings.col(f) = col;
    out.explained_variance.push_back(col.squaredNorm() / static_cast<double>(k));
  }
  for (Eigen::Index j = 0; j < k; ++j) out.eigenvalues.push_back(eig.values(j));
  for (Eigen::Index i = 0; i < k; ++i) out.communalities.push_back(out.loadings.row(i).squaredNorm());
  out.jacobi_sweeps = eig.sweeps;
  out.varimax_sweeps = rotated.sweeps;
  out.varimax_converged = rotated.converged;
  return out;
}

}  // namespace shieldup
