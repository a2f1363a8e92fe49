#include "trendlab/naive_bayes.hpp"

#include "trendlab/checks.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace trendlab {

namespace {

double safe_log(double v) { return std::log(std::max(v, std::numeric_limits<double>::min())); }

}  // namespace

std::pair<double, double> NbModel::posteriors(const Eigen::Ref<const VectorXd>& x) const {
  detail::check_query(x, inputs(), "naive bayes");
  std::array<double, 2> log_joint{};
  for (Index c = 0; c < 2; ++c) {
    double lj = safe_log(class_prior(c));
    if (variant == NbVariant::Gaussian) {
      const auto var = variance.row(c).transpose().array();
      const auto diff = x.array() - mean.row(c).transpose().array();
      lj += (-0.5 * (2.0 * std::numbers::pi * var).log() - 0.5 * diff.square() / var).sum();
    } else {
      for (Index j = 0; j < x.size(); ++j) {
        lj += x(j) > 0.0 ? safe_log(theta(c, j)) : safe_log(1.0 - theta(c, j));
      }
    }
    log_joint[static_cast<std::size_t>(c)] = lj;
  }
  const double top = std::max(log_joint[0], log_joint[1]);
  const double lse = top + std::log(std::exp(log_joint[0] - top) + std::exp(log_joint[1] - top));
  return {std::exp(log_joint[0] - lse), std::exp(log_joint[1] - lse)};
}

NbModel train_nb(const MatrixXd& X, const Labels& y, const NbParams& params) {
  detail::check_training_data(X, y, "train_nb");
  if (!(params.variance_floor > 0.0)) throw Error("train_nb: variance floor must be positive");
  if (!(params.alpha >= 0.0)) throw Error("train_nb: Laplace alpha must be non-negative");

  std::array<Index, 2> count{0, 0};
  for (Index i = 0; i < y.size(); ++i) ++count[y(i) > 0 ? 1 : 0];
  if (count[0] == 0 || count[1] == 0) throw Error("train_nb: a class is absent from the training data");

  NbModel m;
  m.variant = params.variant;
  const double n = static_cast<double>(y.size());
  m.class_prior << static_cast<double>(count[0]) / n, static_cast<double>(count[1]) / n;

  if (params.variant == NbVariant::Bernoulli) {
    if (((X.array() != 1.0) && (X.array() != -1.0)).any()) {
      throw Error("train_nb: Bernoulli variant requires +1/-1 features");
    }
    MatrixXd ones = MatrixXd::Zero(2, X.cols());
    for (Index i = 0; i < X.rows(); ++i) {
      ones.row(y(i) > 0 ? 1 : 0) += (X.row(i).array() > 0.0).cast<double>().matrix();
    }
    m.theta.resize(2, X.cols());
    for (Index c = 0; c < 2; ++c) {
      const double nc = static_cast<double>(count[static_cast<std::size_t>(c)]);
      m.theta.row(c) = (ones.row(c).array() + params.alpha) / (nc + 2.0 * params.alpha);
    }
    return m;
  }

  m.mean = MatrixXd::Zero(2, X.cols());
  m.variance = MatrixXd::Zero(2, X.cols());
  for (Index i = 0; i < X.rows(); ++i) m.mean.row(y(i) > 0 ? 1 : 0) += X.row(i);
  m.mean.row(0) /= static_cast<double>(count[0]);
  m.mean.row(1) /= static_cast<double>(count[1]);
  for (Index i = 0; i < X.rows(); ++i) {
    const Index c = y(i) > 0 ? 1 : 0;
    m.variance.row(c) += (X.row(i) - m.mean.row(c)).array().square().matrix();
  }
  m.variance.row(0) /= static_cast<double>(count[0]);
  m.variance.row(1) /= static_cast<double>(count[1]);
  m.variance = m.variance.cwiseMax(params.variance_floor);
  return m;
}

}  // namespace trendlab
