#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "shieldup/core/error.hpp"

namespace shieldup {

// Respondents in rows, items in columns. Cells are 0/1 for IRT and EFA, or
// integer item scores for reliability. Missing cells are not representable;
// incomplete respondents must be dropped before construction.
class ResponseMatrix {
 public:
  ResponseMatrix() = default;

  explicit ResponseMatrix(Eigen::MatrixXd cells, std::vector<std::string> item_ids = {})
      : cells_(std::move(cells)), item_ids_(std::move(item_ids)) {
    if (cells_.rows() < 2 || cells_.cols() < 2) {
      throw Error(Errc::InvalidMatrix, "shape", "need at least 2 respondents and 2 items");
    }
    if (!cells_.allFinite()) throw Error(Errc::InvalidMatrix, "cells", "non-finite cell");
    if (item_ids_.empty()) {
      for (Eigen::Index j = 0; j < cells_.cols(); ++j) item_ids_.push_back("item" + std::to_string(j + 1));
    }
    if (static_cast<Eigen::Index>(item_ids_.size()) != cells_.cols()) {
      throw Error(Errc::InvalidMatrix, "item_ids", "one id per column required");
    }
  }

  static ResponseMatrix from_rows(const std::vector<std::vector<double>>& rows,
                                  std::vector<std::string> item_ids = {}) {
    if (rows.empty()) throw Error(Errc::InvalidMatrix, "shape", "no respondents");
    Eigen::MatrixXd m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != rows.front().size()) throw Error(Errc::InvalidMatrix, "row " + std::to_string(i), "ragged");
      for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
    }
    return ResponseMatrix(std::move(m), std::move(item_ids));
  }

  Eigen::Index respondents() const { return cells_.rows(); }
  Eigen::Index items() const { return cells_.cols(); }
  double operator()(Eigen::Index i, Eigen::Index j) const { return cells_(i, j); }
  const Eigen::MatrixXd& cells() const { return cells_; }
  const std::vector<std::string>& item_ids() const { return item_ids_; }

  bool is_binary() const {
    return (cells_.array() == 0.0 || cells_.array() == 1.0).all();
  }

  void require_binary() const {
    if (!is_binary()) throw Error(Errc::InvalidMatrix, "cells", "binary (0/1) responses required");
  }

  // Copy with columns reordered; `order[j]` is the source column of column j.
  ResponseMatrix select_columns(const std::vector<Eigen::Index>& order) const {
    Eigen::MatrixXd m(cells_.rows(), static_cast<Eigen::Index>(order.size()));
    std::vector<std::string> ids;
    for (std::size_t j = 0; j < order.size(); ++j) {
      m.col(static_cast<Eigen::Index>(j)) = cells_.col(order[j]);
      ids.push_back(item_ids_[static_cast<std::size_t>(order[j])]);
    }
    return ResponseMatrix(std::move(m), std::move(ids));
  }

 private:
  Eigen::MatrixXd cells_;
  std::vector<std::string> item_ids_;
};

}  // namespace shieldup
