#pragma once

#include "trendlab/types.hpp"

#include <fmt/format.h>

#include <cmath>
#include <string_view>

namespace trendlab::detail {

inline void check_training_data(const MatrixXd& X, const Labels& y, std::string_view who) {
  if (X.rows() == 0 || X.cols() == 0) throw Error(fmt::format("{}: empty training data", who));
  if (X.rows() != y.size()) {
    throw Error(fmt::format("{}: {} feature rows but {} labels", who, X.rows(), y.size()));
  }
  if (!X.allFinite()) throw Error(fmt::format("{}: non-finite input", who));
  if (((y.array() != 1) && (y.array() != -1)).any()) throw Error(fmt::format("{}: labels must be +1/-1", who));
}

template <typename Derived>
void check_query(const Eigen::MatrixBase<Derived>& x, Index feature_count, std::string_view who) {
  if (x.size() != feature_count) {
    throw Error(fmt::format("{}: expected {} features, got {}", who, feature_count, x.size()));
  }
  if (!x.allFinite()) throw Error(fmt::format("{}: non-finite input", who));
}

/// 0/1 target for a +1/-1 label.
inline double target01(int label) { return label > 0 ? 1.0 : 0.0; }

inline double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace trendlab::detail
