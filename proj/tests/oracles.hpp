#pragma once

// Brute-force reference implementations used only by the tests. They share no
// code with the library and trade speed for directness.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<double>>;  // row-major

inline long double mean(const std::vector<long double>& x) {
  long double s = 0;
  for (auto v : x) s += v;
  return s / static_cast<long double>(x.size());
}

inline long double variance(const std::vector<long double>& x) {
  const long double m = mean(x);
  long double s = 0;
  for (auto v : x) s += (v - m) * (v - m);
  return s / static_cast<long double>(x.size() - 1);
}

inline std::vector<long double> column(const Matrix& m, std::size_t j) {
  std::vector<long double> out;
  for (const auto& row : m) out.push_back(row[j]);
  return out;
}

inline double cronbach_alpha(const Matrix& m) {
  const std::size_t k = m.front().size();
  long double item_var = 0;
  for (std::size_t j = 0; j < k; ++j) item_var += variance(column(m, j));
  std::vector<long double> total;
  for (const auto& row : m) {
    long double s = 0;
    for (double v : row) s += v;
    total.push_back(s);
  }
  const long double kk = static_cast<long double>(k);
  return static_cast<double>(kk / (kk - 1) * (1 - item_var / variance(total)));
}

inline double pearson(const std::vector<long double>& x, const std::vector<long double>& y) {
  const long double mx = mean(x), my = mean(y);
  long double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

// Correlation of each item with the sum of the other items.
inline std::vector<double> item_rest_correlation(const Matrix& m) {
  const std::size_t k = m.front().size();
  std::vector<double> out;
  for (std::size_t j = 0; j < k; ++j) {
    std::vector<long double> item, rest;
    for (const auto& row : m) {
      long double s = 0;
      for (std::size_t q = 0; q < k; ++q) {
        if (q != j) s += row[q];
      }
      item.push_back(row[j]);
      rest.push_back(s);
    }
    out.push_back(pearson(item, rest));
  }
  return out;
}

// Gaussian elimination with partial pivoting on a dense square system.
inline std::vector<long double> solve(std::vector<std::vector<long double>> a, std::vector<long double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
    }
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const long double f = a[r][c] / a[c][c];
      for (std::size_t q = c; q < n; ++q) a[r][q] -= f * a[c][q];
      b[r] -= f * b[c];
    }
  }
  std::vector<long double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    long double s = b[i];
    for (std::size_t q = i + 1; q < n; ++q) s -= a[i][q] * x[q];
    x[i] = s / a[i][i];
  }
  return x;
}

// beta = (X'X)^-1 X'y through the normal equations.
inline std::vector<double> ols_normal_equations(const Matrix& x, const std::vector<double>& y) {
  const std::size_t p = x.front().size();
  std::vector<std::vector<long double>> xtx(p, std::vector<long double>(p, 0));
  std::vector<long double> xty(p, 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t a = 0; a < p; ++a) {
      xty[a] += static_cast<long double>(x[i][a]) * y[i];
      for (std::size_t b = 0; b < p; ++b) xtx[a][b] += static_cast<long double>(x[i][a]) * x[i][b];
    }
  }
  const auto beta = solve(xtx, xty);
  return {beta.begin(), beta.end()};
}

// Rank by Gaussian elimination with full pivoting on column-scaled data.
inline int rank(Matrix m, double tol = 1e-9) {
  const std::size_t rows = m.size(), cols = m.front().size();
  for (std::size_t j = 0; j < cols; ++j) {
    double norm = 0;
    for (const auto& r : m) norm = std::max(norm, std::fabs(r[j]));
    if (norm > 0) {
      for (auto& r : m) r[j] /= norm;
    }
  }
  int rk = 0;
  std::vector<bool> used(cols, false);
  for (std::size_t row = 0; row < rows && rk < static_cast<int>(cols); ++row) {
    // Pick the largest remaining entry in the unreduced block.
    double best = 0;
    std::size_t br = 0, bc = 0;
    for (std::size_t r = static_cast<std::size_t>(rk); r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        if (!used[c] && std::fabs(m[r][c]) > best) {
          best = std::fabs(m[r][c]);
          br = r;
          bc = c;
        }
      }
    }
    if (best < tol) break;
    std::swap(m[static_cast<std::size_t>(rk)], m[br]);
    const auto& pivot = m[static_cast<std::size_t>(rk)];
    for (std::size_t r = static_cast<std::size_t>(rk) + 1; r < rows; ++r) {
      const double f = m[r][bc] / pivot[bc];
      if (f == 0) continue;
      for (std::size_t c = 0; c < cols; ++c) m[r][c] -= f * pivot[c];
    }
    used[bc] = true;
    ++rk;
  }
  return rk;
}

// I_x(a, b) by composite Simpson integration of the beta density. The
// substitution t = u^(K/a), K = max(1, ceil(a)), turns t^(a-1) dt into a
// polynomial in u, which keeps Simpson accurate near the endpoint; the upper
// half is integrated from the mirrored side.
inline double incomplete_beta(double x, double a, double b, int steps = 1'000'000) {
  if (x <= 0) return 0;
  if (x >= 1) return 1;
  auto integrate = [steps](auto&& f, long double lo, long double hi) {
    const long double h = (hi - lo) / steps;
    long double s = f(lo) + f(hi);
    for (int i = 1; i < steps; ++i) s += f(lo + i * h) * (i % 2 ? 4 : 2);
    return s * h / 3;
  };
  // Integral over [0, upto] of t^(p-1) (1-t)^(q-1) dt.
  auto head = [&](long double upto, long double p, long double q) {
    const long double k = std::max(1.0L, std::ceil(p));
    const long double m = k / p;
    auto f = [&](long double u) { return m * std::pow(u, k - 1) * std::pow(1 - std::pow(u, m), q - 1); };
    return integrate(f, 0.0L, std::pow(upto, 1 / m));
  };
  const long double la = a, lb = b;
  const long double log_beta = std::lgamma(la) + std::lgamma(lb) - std::lgamma(la + lb);
  const long double norm = std::exp(-log_beta);
  if (x <= 0.5) return static_cast<double>(norm * head(x, la, lb));
  return static_cast<double>(1 - norm * head(1 - static_cast<long double>(x), lb, la));
}

// Closed-form eigenvalues of a symmetric 2x2 matrix, descending.
inline std::vector<double> eigenvalues_2x2(double a, double b, double d) {
  const double mid = 0.5 * (a + d);
  const double r = std::hypot(0.5 * (a - d), b);
  return {mid + r, mid - r};
}

// Trigonometric solution of the characteristic cubic of a symmetric 3x3
// matrix, descending.
inline std::vector<double> eigenvalues_3x3(const Matrix& m) {
  const long double p1 = (long double)m[0][1] * m[0][1] + (long double)m[0][2] * m[0][2] + (long double)m[1][2] * m[1][2];
  const long double q = ((long double)m[0][0] + m[1][1] + m[2][2]) / 3;
  const long double p2 = std::pow(m[0][0] - q, 2) + std::pow(m[1][1] - q, 2) + std::pow(m[2][2] - q, 2) + 2 * p1;
  const long double p = std::sqrt(p2 / 6);
  long double b[3][3];
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) b[i][j] = (m[i][j] - (i == j ? q : 0)) / p;
  }
  const long double det = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) -
                          b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0]) +
                          b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
  const long double r = std::clamp(det / 2, -1.0L, 1.0L);
  const long double phi = std::acos(r) / 3;
  const long double pi = std::numbers::pi_v<long double>;
  const long double e1 = q + 2 * p * std::cos(phi);
  const long double e3 = q + 2 * p * std::cos(phi + 2 * pi / 3);
  const long double e2 = 3 * q - e1 - e3;
  return {static_cast<double>(e1), static_cast<double>(e2), static_cast<double>(e3)};
}

// Number of root-to-leaf paths in an adjacency list, by plain recursion.
inline std::size_t count_paths(const std::map<std::string, std::vector<std::string>>& adj, const std::string& node) {
  const auto& next = adj.at(node);
  if (next.empty()) return 1;
  std::size_t total = 0;
  for (const auto& n : next) total += count_paths(adj, n);
  return total;
}

inline std::size_t longest_path(const std::map<std::string, std::vector<std::string>>& adj, const std::string& node) {
  std::size_t best = 0;
  for (const auto& n : adj.at(node)) best = std::max(best, longest_path(adj, n));
  return best + 1;
}

// Seeded matrices for the numeric comparisons. std::mt19937 with a plain
// modulus keeps these independent of the library's random streams.
inline Matrix random_binary(int rows, int cols, std::uint32_t seed, double p = 0.5) {
  std::mt19937 gen(seed);
  Matrix m(static_cast<std::size_t>(rows), std::vector<double>(static_cast<std::size_t>(cols)));
  for (auto& row : m) {
    for (auto& v : row) v = (gen() % 1000) < p * 1000 ? 1.0 : 0.0;
  }
  return m;
}

inline Matrix random_gaussian(int rows, int cols, std::uint32_t seed) {
  std::mt19937 gen(seed);
  std::normal_distribution<double> nd;
  Matrix m(static_cast<std::size_t>(rows), std::vector<double>(static_cast<std::size_t>(cols)));
  for (auto& row : m) {
    for (auto& v : row) v = nd(gen);
  }
  return m;
}

}  // namespace oracle
