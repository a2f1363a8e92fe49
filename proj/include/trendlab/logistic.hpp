#pragma once

#include "trendlab/types.hpp"

#include <vector>

namespace trendlab {

struct LrParams {
  int max_iterations = 100;
  double tolerance = 1e-8;
  double l2 = 0.0;
};

struct LrModel {
  VectorXd coefficients;
  double intercept = 0.0;
  bool converged = false;
  int iterations = 0;

  [[nodiscard]] Index inputs() const noexcept { return coefficients.size(); }
  [[nodiscard]] double score(const Eigen::Ref<const VectorXd>& x) const { return intercept + coefficients.dot(x); }
  [[nodiscard]] double predict_proba(const Eigen::Ref<const VectorXd>& x) const;
};

/// Penalized log-likelihood after each accepted Newton step (entry 0 is
/// the starting point).
struct LrTrace {
  std::vector<double> log_likelihood;
};

/// Newton-Raphson (IRLS) with step halving, so the objective never drops.
/// Separable data runs to max_iterations and reports converged = false.
LrModel train_lr(const MatrixXd& X, const Labels& y, const LrParams& params, LrTrace* trace = nullptr);

}  // namespace trendlab
