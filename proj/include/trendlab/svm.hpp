#pragma once

#include "trendlab/types.hpp"

#include <variant>
#include <vector>

namespace trendlab {

/// (x.z + 1)^degree
struct PolynomialKernel {
  int degree = 2;
};

/// exp(-gamma |x - z|^2)
struct RbfKernel {
  double gamma = 0.1;
};

using Kernel = std::variant<PolynomialKernel, RbfKernel>;

double kernel_eval(const Kernel& k, const Eigen::Ref<const VectorXd>& x, const Eigen::Ref<const VectorXd>& z);
MatrixXd kernel_matrix(const Kernel& k, const MatrixXd& X);

struct SvmParams {
  Kernel kernel = PolynomialKernel{};
  double c = 1.0;
  double tolerance = 1e-3;
  int max_passes = 10000;
};

struct SvmModel {
  Kernel kernel = PolynomialKernel{};
  MatrixXd support_vectors;
  VectorXd dual_coef;  // alpha_i * y_i
  double bias = 0.0;
  bool converged = false;
  int passes = 0;

  [[nodiscard]] Index inputs() const noexcept { return support_vectors.cols(); }
  [[nodiscard]] double decision_function(const Eigen::Ref<const VectorXd>& x) const;
  /// Fixed logistic squash of the decision value.
  [[nodiscard]] double predict_proba(const Eigen::Ref<const VectorXd>& x) const;
  [[nodiscard]] int predict(const Eigen::Ref<const VectorXd>& x) const { return decision_function(x) >= 0.0 ? 1 : -1; }
};

/// Optional training internals for audits.
struct SmoDiagnostics {
  bool record_objective = false;
  VectorXd alpha;
  std::vector<double> objective;  // dual objective after each accepted step
  long long steps = 0;
};

/// sum(alpha) - 0.5 sum_ij alpha_i alpha_j y_i y_j K_ij
double svm_dual_objective(const VectorXd& alpha, const Labels& y, const MatrixXd& K);

/// Platt's SMO on the soft-margin dual. Fully deterministic.
SvmModel train_smo(const MatrixXd& X, const Labels& y, const SvmParams& params, SmoDiagnostics* diag = nullptr);

}  // namespace trendlab
