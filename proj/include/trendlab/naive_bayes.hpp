#pragma once

#include "trendlab/types.hpp"

#include <array>
#include <utility>

namespace trendlab {

enum class NbVariant { Gaussian, Bernoulli };

struct NbParams {
  NbVariant variant = NbVariant::Gaussian;
  double variance_floor = 1e-9;
  double alpha = 1.0;  // Laplace smoothing, Bernoulli only
};

/// Row 0 of the per-class matrices is class -1, row 1 class +1.
struct NbModel {
  NbVariant variant = NbVariant::Gaussian;
  Eigen::Vector2d class_prior = Eigen::Vector2d::Constant(0.5);
  MatrixXd mean;      // gaussian
  MatrixXd variance;  // gaussian, already floored
  MatrixXd theta;     // bernoulli P(feature = +1 | class)

  [[nodiscard]] Index inputs() const noexcept {
    return variant == NbVariant::Gaussian ? mean.cols() : theta.cols();
  }
  /// {P(-1 | x), P(+1 | x)}.
  [[nodiscard]] std::pair<double, double> posteriors(const Eigen::Ref<const VectorXd>& x) const;
  [[nodiscard]] double predict_proba(const Eigen::Ref<const VectorXd>& x) const { return posteriors(x).second; }
};

NbModel train_nb(const MatrixXd& X, const Labels& y, const NbParams& params);

}  // namespace trendlab
