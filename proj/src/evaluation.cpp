#include "trendlab/evaluation.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <vector>

namespace trendlab {

namespace {

double ratio(Index num, Index den, bool& undefined) {
  if (den == 0) {
    undefined = true;
    return 0.0;
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

// Two-sided critical values, df = 1..30.
constexpr std::array<double, 30> kCrit05 = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
                                            2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
                                            2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};
constexpr std::array<double, 30> kCrit01 = {63.657, 9.925, 5.841, 4.604, 4.032, 3.707, 3.499, 3.355, 3.250, 3.169,
                                            3.106,  3.055, 3.012, 2.977, 2.947, 2.921, 2.898, 2.878, 2.861, 2.845,
                                            2.831,  2.819, 2.807, 2.797, 2.787, 2.779, 2.771, 2.763, 2.756, 2.750};

void check_pair_lengths(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(fmt::format("t test: {} vs {} observations", a.size(), b.size()));
  if (a.size() < 2) throw Error("t test: need at least 2 observations per sample");
}

void finish(TTestResult& r, double t) {
  r.t = t;
  const double crit05 = t_critical(r.df, 0.05);
  const double crit01 = t_critical(r.df, 0.01);
  r.significant_05 = std::abs(t) > crit05;
  r.significant_01 = std::abs(t) > crit01;
  const boost::math::students_t dist(r.df);
  r.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

}  // namespace

ConfusionMatrix confusion(const Labels& predictions, const Labels& labels) {
  if (predictions.size() != labels.size()) {
    throw Error(fmt::format("confusion: {} predictions for {} labels", predictions.size(), labels.size()));
  }
  if (labels.size() == 0) throw Error("confusion: empty input");
  ConfusionMatrix cm;
  for (Index i = 0; i < labels.size(); ++i) {
    const bool pred_up = predictions(i) > 0;
    const bool up = labels(i) > 0;
    if (pred_up && up) ++cm.tp;
    else if (pred_up) ++cm.fp;
    else if (!up) ++cm.tn;
    else ++cm.fn;
  }
  return cm;
}

double f_score(double precision, double recall) {
  const double s = precision + recall;
  return s > 0.0 ? 2.0 * precision * recall / s : 0.0;
}

CoreMetrics core_metrics(const ConfusionMatrix& cm) {
  if (cm.total() <= 0) throw Error("core_metrics: empty confusion matrix");
  CoreMetrics m;
  bool undefined = false;
  m.precision_pos = ratio(cm.tp, cm.tp + cm.fp, undefined);
  m.precision_neg = ratio(cm.tn, cm.tn + cm.fn, undefined);
  m.recall_pos = ratio(cm.tp, cm.tp + cm.fn, undefined);
  m.recall_neg = ratio(cm.tn, cm.tn + cm.fp, undefined);
  m.accuracy = ratio(cm.tp + cm.tn, cm.total(), undefined);
  m.f_pos = f_score(m.precision_pos, m.recall_pos);
  m.f_neg = f_score(m.precision_neg, m.recall_neg);
  const double n = static_cast<double>(cm.total());
  const double w_pos = static_cast<double>(cm.tp + cm.fn) / n;
  const double w_neg = static_cast<double>(cm.tn + cm.fp) / n;
  m.f_weighted = w_pos * m.f_pos + w_neg * m.f_neg;
  m.tp_rate_weighted = w_pos * m.recall_pos + w_neg * m.recall_neg;
  bool ignored = false;
  const double fp_rate_pos = ratio(cm.fp, cm.fp + cm.tn, ignored);
  const double fp_rate_neg = ratio(cm.fn, cm.fn + cm.tp, ignored);
  m.fp_rate_weighted = w_pos * fp_rate_pos + w_neg * fp_rate_neg;
  m.undefined_ratio = undefined;
  return m;
}

ProbabilityErrors probability_errors(const VectorXd& probs, const Labels& labels, double train_prior_pos) {
  if (probs.size() != labels.size()) {
    throw Error(fmt::format("probability_errors: {} probabilities for {} labels", probs.size(), labels.size()));
  }
  if (labels.size() == 0) throw Error("probability_errors: empty input");
  if (!(train_prior_pos >= 0.0 && train_prior_pos <= 1.0)) throw Error("probability_errors: prior outside [0, 1]");
  const VectorXd target = (labels.array() > 0).cast<double>().matrix();
  const VectorXd residual = probs - target;
  const double abs_sum = residual.cwiseAbs().sum();
  const double prior_abs_sum = (target.array() - train_prior_pos).abs().sum();
  if (prior_abs_sum == 0.0) throw Error("probability_errors: RAE undefined, prior predictor has zero error");
  const double n = static_cast<double>(labels.size());
  return {abs_sum / n, std::sqrt(residual.squaredNorm() / n), abs_sum / prior_abs_sum};
}

double roc_auc(const VectorXd& scores, const Labels& labels) {
  if (scores.size() != labels.size()) throw Error("roc_auc: length mismatch");
  const Index n_pos = (labels.array() > 0).count();
  const Index n_neg = labels.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) throw Error("roc_auc: both classes must be present");
  std::vector<Index> order(static_cast<std::size_t>(scores.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index b) { return scores(a) < scores(b); });
  // Midranks (1-based) for tied groups.
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && scores(order[j + 1]) == scores(order[i])) ++j;
    const double midrank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) {
      if (labels(order[k]) > 0) rank_sum_pos += midrank;
    }
    i = j + 1;
  }
  const double np = static_cast<double>(n_pos);
  const double nn = static_cast<double>(n_neg);
  return (rank_sum_pos - np * (np + 1.0) / 2.0) / (np * nn);
}

MetricsReport evaluate(const VectorXd& probs, const Labels& labels, double train_prior_pos) {
  MetricsReport r;
  Labels pred(probs.size());
  for (Index i = 0; i < probs.size(); ++i) pred(i) = probs(i) >= 0.5 ? 1 : -1;
  r.confusion = confusion(pred, labels);
  r.core = core_metrics(r.confusion);
  const VectorXd target = (labels.array() > 0).cast<double>().matrix();
  const VectorXd residual = probs - target;
  const double n = static_cast<double>(labels.size());
  r.mae = residual.cwiseAbs().sum() / n;
  r.rmse = std::sqrt(residual.squaredNorm() / n);
  const double prior_abs_sum = (target.array() - train_prior_pos).abs().sum();
  if (prior_abs_sum > 0.0) r.rae = residual.cwiseAbs().sum() / prior_abs_sum;
  const Index n_pos = (labels.array() > 0).count();
  if (n_pos > 0 && n_pos < labels.size()) r.auc = roc_auc(probs, labels);
  return r;
}

std::pair<double, double> mean_and_std(std::span<const double> v) {
  if (v.empty()) throw Error("mean_and_std: empty sample");
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  if (v.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (const double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0))};
}

double t_critical(double df, double alpha) {
  if (!(df >= 1.0)) throw Error("t_critical: df must be >= 1");
  const double rounded = std::round(df);
  if (rounded == df && df <= 30.0) {
    if (alpha == 0.05) return kCrit05[static_cast<std::size_t>(df) - 1];
    if (alpha == 0.01) return kCrit01[static_cast<std::size_t>(df) - 1];
  }
  const boost::math::students_t dist(df);
  return boost::math::quantile(boost::math::complement(dist, alpha / 2.0));
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
  check_pair_lengths(a, b);
  TTestResult r;
  r.n = static_cast<Index>(a.size());
  std::tie(r.mean_a, r.std_a) = mean_and_std(a);
  std::tie(r.mean_b, r.std_b) = mean_and_std(b);
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  const auto [mean_d, sd_d] = mean_and_std(d);
  r.df = static_cast<double>(a.size() - 1);
  if (!(sd_d > 0.0)) {
    r.degenerate = true;
    return r;
  }
  finish(r, mean_d / (sd_d / std::sqrt(static_cast<double>(a.size()))));
  return r;
}

TTestResult independent_t_test(std::span<const double> a, std::span<const double> b) {
  check_pair_lengths(a, b);
  TTestResult r;
  r.n = static_cast<Index>(a.size());
  std::tie(r.mean_a, r.std_a) = mean_and_std(a);
  std::tie(r.mean_b, r.std_b) = mean_and_std(b);
  const double n = static_cast<double>(a.size());
  r.df = 2.0 * n - 2.0;
  const double pooled = std::sqrt((r.std_a * r.std_a + r.std_b * r.std_b) / 2.0);
  if (!(pooled > 0.0)) {
    r.degenerate = true;
    return r;
  }
  finish(r, (r.mean_a - r.mean_b) / (pooled * std::sqrt(2.0 / n)));
  return r;
}

}  // namespace trendlab
