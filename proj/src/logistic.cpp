#include "trendlab/logistic.hpp"

#include "trendlab/checks.hpp"

#include <cmath>

namespace trendlab {

namespace {

// log(1 + e^z) without overflow.
double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double penalized_log_likelihood(const MatrixXd& Z, const VectorXd& t, const VectorXd& beta, double l2) {
  const VectorXd eta = Z * beta;
  double ll = 0.0;
  for (Index i = 0; i < eta.size(); ++i) ll += t(i) * eta(i) - softplus(eta(i));
  return ll - 0.5 * l2 * beta.tail(beta.size() - 1).squaredNorm();
}

}  // namespace

double LrModel::predict_proba(const Eigen::Ref<const VectorXd>& x) const {
  detail::check_query(x, inputs(), "logistic regression");
  return detail::logistic(score(x));
}

LrModel train_lr(const MatrixXd& X, const Labels& y, const LrParams& params, LrTrace* trace) {
  detail::check_training_data(X, y, "train_lr");
  if (X.rows() < 2) throw Error("train_lr: need at least 2 rows");
  if (params.max_iterations < 1 || !(params.tolerance > 0.0) || params.l2 < 0.0) {
    throw Error("train_lr: max_iterations >= 1, tolerance > 0 and l2 >= 0 required");
  }
  const Index n = X.rows();
  const Index d = X.cols() + 1;
  MatrixXd Z(n, d);
  Z.col(0).setOnes();
  Z.rightCols(d - 1) = X;
  VectorXd t(n);
  for (Index i = 0; i < n; ++i) t(i) = detail::target01(y(i));

  VectorXd penalty = VectorXd::Constant(d, params.l2);
  penalty(0) = 0.0;

  VectorXd beta = VectorXd::Zero(d);
  double ll = penalized_log_likelihood(Z, t, beta, params.l2);
  if (trace) trace->log_likelihood.assign(1, ll);

  LrModel model;
  int iter = 0;
  for (; iter < params.max_iterations; ++iter) {
    VectorXd p(n);
    for (Index i = 0; i < n; ++i) p(i) = detail::logistic(Z.row(i).dot(beta));
    const VectorXd w = p.array() * (1.0 - p.array());
    const VectorXd grad = Z.transpose() * (t - p) - penalty.cwiseProduct(beta);
    MatrixXd H = Z.transpose() * w.asDiagonal() * Z;
    H.diagonal() += penalty;
    // Tiny ridge so saturated (separable) fits still factor.
    H.diagonal().array() += 1e-12 * (1.0 + H.diagonal().cwiseAbs().maxCoeff());
    const VectorXd step = H.ldlt().solve(grad);
    if (!step.allFinite()) break;

    double scale = 1.0;
    VectorXd candidate = beta + step;
    double candidate_ll = penalized_log_likelihood(Z, t, candidate, params.l2);
    for (int halving = 0; halving < 40 && !(candidate_ll >= ll); ++halving) {
      scale *= 0.5;
      candidate = beta + scale * step;
      candidate_ll = penalized_log_likelihood(Z, t, candidate, params.l2);
    }
    if (!(candidate_ll >= ll)) break;
    beta = candidate;
    ll = candidate_ll;
    if (trace) trace->log_likelihood.push_back(ll);
    if ((scale * step).cwiseAbs().maxCoeff() < params.tolerance) {
      model.converged = true;
      ++iter;
      break;
    }
  }
  model.iterations = iter;
  model.intercept = beta(0);
  model.coefficients = beta.tail(d - 1);
  return model;
}

}  // namespace trendlab
