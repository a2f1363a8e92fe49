#pragma once

#include "trendlab/types.hpp"

#include <optional>
#include <span>

namespace trendlab {

struct ConfusionMatrix {
  Index tp = 0;
  Index fp = 0;
  Index tn = 0;
  Index fn = 0;

  [[nodiscard]] Index total() const noexcept { return tp + fp + tn + fn; }
};

/// Positive class is +1.
ConfusionMatrix confusion(const Labels& predictions, const Labels& labels);

/// Precision, recall and F per class, accuracy, support-weighted F and the
/// support-weighted TP/FP rates. Ratios with a zero denominator are 0 and
/// set `undefined_ratio`.
struct CoreMetrics {
  double precision_pos = 0.0;
  double precision_neg = 0.0;
  double recall_pos = 0.0;
  double recall_neg = 0.0;
  double f_pos = 0.0;
  double f_neg = 0.0;
  double accuracy = 0.0;
  double f_weighted = 0.0;
  double tp_rate_weighted = 0.0;
  double fp_rate_weighted = 0.0;
  bool undefined_ratio = false;
};

CoreMetrics core_metrics(const ConfusionMatrix& cm);

/// 2 p r / (p + r), 0 when both are 0.
double f_score(double precision, double recall);

struct ProbabilityErrors {
  double mae = 0.0;
  double rmse = 0.0;
  double rae = 0.0;
};

/// Errors of P(up) against 0/1 targets. RAE divides by the absolute error
/// of always predicting `train_prior_pos`.
ProbabilityErrors probability_errors(const VectorXd& probs, const Labels& labels, double train_prior_pos);

/// Mann-Whitney AUC, ties count one half.
double roc_auc(const VectorXd& scores, const Labels& labels);

struct MetricsReport {
  ConfusionMatrix confusion;
  CoreMetrics core;
  double mae = 0.0;
  double rmse = 0.0;
  std::optional<double> rae;  // empty when the prior predictor is itself exact
  std::optional<double> auc;  // empty when only one class is present
};

MetricsReport evaluate(const VectorXd& probs, const Labels& labels, double train_prior_pos);

struct TTestResult {
  Index n = 0;
  double mean_a = 0.0;
  double mean_b = 0.0;
  double std_a = 0.0;
  double std_b = 0.0;
  std::optional<double> t;  // empty when degenerate
  double df = 0.0;
  std::optional<double> p_value;
  bool degenerate = false;
  bool significant_05 = false;
  bool significant_01 = false;
};

/// Two-sided Student critical value; tabulated for df 1..30, computed from
/// the t distribution above that.
double t_critical(double df, double alpha);

/// Paired test on d_i = a_i - b_i, df = n - 1.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

/// Pooled-variance two-sample test, df = 2n - 2.
TTestResult independent_t_test(std::span<const double> a, std::span<const double> b);

/// Sample mean and standard deviation (n - 1 denominator).
std::pair<double, double> mean_and_std(std::span<const double> v);

}  // namespace trendlab
