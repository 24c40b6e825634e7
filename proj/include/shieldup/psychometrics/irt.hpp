#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "shieldup/psychometrics/response_matrix.hpp"

namespace shieldup {

struct IrtItemParams {
  double a = 1.0;  // discrimination
  double b = 0.0;  // difficulty

  bool operator==(const IrtItemParams&) const = default;
};

// P(correct | theta) = 1 / (1 + exp(-a (theta - b)))
inline double prob_2pl(const IrtItemParams& item, double theta) {
  return 1.0 / (1.0 + std::exp(-item.a * (theta - item.b)));
}

struct IrtFitOptions {
  int quadrature_points = 21;
  double theta_min = -4.0;
  double theta_max = 4.0;
  int max_em_iterations = 200;
  double tolerance = 1e-6;  // on marginal log-likelihood improvement
  int max_newton_steps = 50;
  double a_min = 0.05, a_max = 10.0;
  double b_min = -6.0, b_max = 6.0;
};

struct IrtFit {
  std::vector<IrtItemParams> items;
  std::vector<double> theta;        // EAP per respondent
  std::vector<double> theta_sd;     // posterior SD per respondent
  double loglik = 0.0;              // marginal log-likelihood at `items`
  std::vector<double> loglik_trace; // one entry per E-step
  int iterations = 0;
  bool converged = false;
  bool monotone = true;
  std::vector<std::string> warnings;
};

// Fixed quadrature: equally spaced nodes on [theta_min, theta_max] with
// standard-normal prior weights normalized to sum to one.
struct QuadratureGrid {
  std::vector<double> nodes;
  std::vector<double> weights;

  static QuadratureGrid standard_normal(int points, double lo, double hi) {
    QuadratureGrid g;
    double total = 0.0;
    for (int q = 0; q < points; ++q) {
      const double t = lo + (hi - lo) * q / (points - 1);
      g.nodes.push_back(t);
      g.weights.push_back(std::exp(-0.5 * t * t));
      total += g.weights.back();
    }
    for (double& w : g.weights) w /= total;
    return g;
  }
};

namespace detail {

inline double log_sigmoid(double z) { return z >= 0 ? -std::log1p(std::exp(-z)) : z - std::log1p(std::exp(z)); }

// Expected complete-data log-likelihood of one item given expected counts
// n_q (respondents at node q) and r_q (of those, correct).
inline double item_objective(double a, double c, const std::vector<double>& nodes,
                             const std::vector<double>& n, const std::vector<double>& r) {
  double f = 0.0;
  for (std::size_t q = 0; q < nodes.size(); ++q) {
    const double z = a * nodes[q] + c;
    f += r[q] * log_sigmoid(z) + (n[q] - r[q]) * log_sigmoid(-z);
  }
  return f;
}

// Newton ascent on the slope/intercept form a*theta + c (c = -a b), with
// step halving so the objective never drops and the box constraints hold.
inline IrtItemParams m_step_item(IrtItemParams start, const std::vector<double>& nodes,
                                 const std::vector<double>& n, const std::vector<double>& r,
                                 const IrtFitOptions& opt) {
  auto clamp_params = [&](double a, double c) {
    a = std::clamp(a, opt.a_min, opt.a_max);
    const double b = std::clamp(-c / a, opt.b_min, opt.b_max);
    return std::pair{a, -a * b};
  };
  auto [a, c] = clamp_params(start.a, -start.a * start.b);
  double f = item_objective(a, c, nodes, n, r);
  for (int iter = 0; iter < opt.max_newton_steps; ++iter) {
    double ga = 0, gc = 0, haa = 0, hac = 0, hcc = 0;
    for (std::size_t q = 0; q < nodes.size(); ++q) {
      const double p = 1.0 / (1.0 + std::exp(-(a * nodes[q] + c)));
      const double resid = r[q] - n[q] * p;
      const double w = n[q] * p * (1.0 - p);
      ga += resid * nodes[q];
      gc += resid;
      haa += w * nodes[q] * nodes[q];
      hac += w * nodes[q];
      hcc += w;
    }
    const double det = haa * hcc - hac * hac;
    double da, dc;
    if (det > 1e-12 * std::max(1.0, haa * hcc)) {
      da = (hcc * ga - hac * gc) / det;
      dc = (haa * gc - hac * ga) / det;
    } else {
      da = ga / std::max(haa, 1e-8);  // gradient fallback on a flat Hessian
      dc = gc / std::max(hcc, 1e-8);
    }
    double step = 1.0;
    bool improved = false;
    for (int halving = 0; halving < 30; ++halving, step *= 0.5) {
      auto [na, nc] = clamp_params(a + step * da, c + step * dc);
      const double nf = item_objective(na, nc, nodes, n, r);
      if (nf >= f) {
        const double change = std::abs(na - a) + std::abs(nc - c);
        a = na;
        c = nc;
        f = nf;
        improved = change > 1e-12;
        break;
      }
    }
    if (!improved) break;
  }
  return {a, -c / a};
}

}  // namespace detail

// Marginal maximum likelihood for the 2PL model via EM on a fixed quadrature
// grid. Stops when the log-likelihood improves by less than `tolerance` or
// after `max_em_iterations`; abilities are reported as EAP.
inline IrtFit fit_2pl(const ResponseMatrix& m, const IrtFitOptions& opt = {}) {
  m.require_binary();
  const Eigen::Index n_resp = m.respondents();
  const Eigen::Index k = m.items();
  for (Eigen::Index j = 0; j < k; ++j) {
    const double s = m.cells().col(j).sum();
    if (s == 0.0 || s == static_cast<double>(n_resp)) {
      throw Error(Errc::DegenerateItem, m.item_ids()[static_cast<std::size_t>(j)],
                  s == 0.0 ? "no correct responses" : "no incorrect responses");
    }
  }

  IrtFit fit;
  if (n_resp < 50) fit.warnings.push_back("fewer than 50 respondents; estimates will be unstable");

  const QuadratureGrid grid = QuadratureGrid::standard_normal(opt.quadrature_points, opt.theta_min, opt.theta_max);
  const std::size_t Q = grid.nodes.size();
  std::vector<double> log_prior(Q);
  for (std::size_t q = 0; q < Q; ++q) log_prior[q] = std::log(grid.weights[q]);

  fit.items.resize(static_cast<std::size_t>(k));
  for (Eigen::Index j = 0; j < k; ++j) {
    const double p = m.cells().col(j).mean();
    fit.items[static_cast<std::size_t>(j)] = {1.0, std::clamp(-std::log(p / (1.0 - p)), -3.0, 3.0)};
  }

  std::vector<double> log_p(static_cast<std::size_t>(k) * Q), log_q(static_cast<std::size_t>(k) * Q);
  std::vector<double> posterior(static_cast<std::size_t>(n_resp) * Q);
  std::vector<double> log_post(Q);

  // E-step: posterior over nodes for every respondent; returns marginal loglik.
  auto e_step = [&]() {
    for (Eigen::Index j = 0; j < k; ++j) {
      const auto& item = fit.items[static_cast<std::size_t>(j)];
      for (std::size_t q = 0; q < Q; ++q) {
        const double z = item.a * (grid.nodes[q] - item.b);
        log_p[static_cast<std::size_t>(j) * Q + q] = detail::log_sigmoid(z);
        log_q[static_cast<std::size_t>(j) * Q + q] = detail::log_sigmoid(-z);
      }
    }
    double ll = 0.0;
    for (Eigen::Index i = 0; i < n_resp; ++i) {
      for (std::size_t q = 0; q < Q; ++q) log_post[q] = log_prior[q];
      for (Eigen::Index j = 0; j < k; ++j) {
        const double* lp = (m(i, j) == 1.0 ? log_p.data() : log_q.data()) + static_cast<std::size_t>(j) * Q;
        for (std::size_t q = 0; q < Q; ++q) log_post[q] += lp[q];
      }
      const double peak = *std::max_element(log_post.begin(), log_post.end());
      double sum = 0.0;
      double* post = posterior.data() + static_cast<std::size_t>(i) * Q;
      for (std::size_t q = 0; q < Q; ++q) {
        post[q] = std::exp(log_post[q] - peak);
        sum += post[q];
      }
      for (std::size_t q = 0; q < Q; ++q) post[q] /= sum;
      ll += peak + std::log(sum);
    }
    return ll;
  };

  std::vector<double> n_q(Q), r_q(Q);
  double previous = -std::numeric_limits<double>::infinity();
  for (int iter = 0;; ++iter) {
    const double ll = e_step();
    fit.loglik_trace.push_back(ll);
    fit.loglik = ll;
    if (ll < previous - 1e-9 * std::max(1.0, std::abs(previous))) fit.monotone = false;
    if (iter > 0 && ll - previous < opt.tolerance) {
      fit.converged = true;
      break;
    }
    if (iter == opt.max_em_iterations) break;
    previous = ll;
    fit.iterations = iter + 1;

    std::fill(n_q.begin(), n_q.end(), 0.0);
    for (Eigen::Index i = 0; i < n_resp; ++i) {
      const double* post = posterior.data() + static_cast<std::size_t>(i) * Q;
      for (std::size_t q = 0; q < Q; ++q) n_q[q] += post[q];
    }
    for (Eigen::Index j = 0; j < k; ++j) {
      std::fill(r_q.begin(), r_q.end(), 0.0);
      for (Eigen::Index i = 0; i < n_resp; ++i) {
        if (m(i, j) != 1.0) continue;
        const double* post = posterior.data() + static_cast<std::size_t>(i) * Q;
        for (std::size_t q = 0; q < Q; ++q) r_q[q] += post[q];
      }
      auto& item = fit.items[static_cast<std::size_t>(j)];
      item = detail::m_step_item(item, grid.nodes, n_q, r_q, opt);
    }
  }
  if (!fit.converged) fit.warnings.push_back("EM did not converge; returning last iterate");

  // `posterior` holds the E-step at the final parameters.
  fit.theta.resize(static_cast<std::size_t>(n_resp));
  fit.theta_sd.resize(static_cast<std::size_t>(n_resp));
  for (Eigen::Index i = 0; i < n_resp; ++i) {
    const double* post = posterior.data() + static_cast<std::size_t>(i) * Q;
    double mean = 0.0, second = 0.0;
    for (std::size_t q = 0; q < Q; ++q) {
      mean += post[q] * grid.nodes[q];
      second += post[q] * grid.nodes[q] * grid.nodes[q];
    }
    fit.theta[static_cast<std::size_t>(i)] = mean;
    fit.theta_sd[static_cast<std::size_t>(i)] = std::sqrt(std::max(0.0, second - mean * mean));
  }
  return fit;
}

// Proportion correct implied by the model, integrated over the quadrature prior.
inline double expected_proportion(const IrtItemParams& item, const QuadratureGrid& grid) {
  double p = 0.0;
  for (std::size_t q = 0; q < grid.nodes.size(); ++q) p += grid.weights[q] * prob_2pl(item, grid.nodes[q]);
  return p;
}

}  // namespace shieldup
