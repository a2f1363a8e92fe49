#pragma once

#include "trendlab/types.hpp"

#include <cstdint>

namespace trendlab {

struct MlpParams {
  Index hidden = 10;
  int epochs = 500;
  double momentum = 0.2;
  double learning_rate = 0.3;
  std::uint64_t seed = 1;
};

/// One tanh hidden layer feeding a single logistic output unit.
struct MlpModel {
  MatrixXd w_hidden;  // hidden x inputs
  VectorXd b_hidden;
  VectorXd w_out;
  double b_out = 0.0;

  [[nodiscard]] Index inputs() const noexcept { return w_hidden.cols(); }
  [[nodiscard]] double predict_proba(const Eigen::Ref<const VectorXd>& x) const;
};

/// Same shape as the model; holds d(loss)/d(parameter).
using MlpGradient = MlpModel;

/// Per-sample squared error 0.5 (p - target)^2, target in {0, 1}.
double mlp_sample_loss(const MlpModel& model, const Eigen::Ref<const VectorXd>& x, double target);
MlpGradient mlp_sample_gradient(const MlpModel& model, const Eigen::Ref<const VectorXd>& x, double target);

/// Weights uniform in [-0.5, 0.5] drawn from `seed`.
MlpModel init_mlp(Index inputs, Index hidden, std::uint64_t seed);

/// Online backpropagation with momentum; sample order reshuffled every
/// epoch from the seed.
MlpModel train_mlp(const MatrixXd& X, const Labels& y, const MlpParams& params);

}  // namespace trendlab
