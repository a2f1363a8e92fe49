#include "trendlab/evaluation.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

using namespace trendlab;

namespace {

Labels labels(std::initializer_list<int> v) {
  Labels l(static_cast<Index>(v.size()));
  Index i = 0;
  for (const int x : v) l(i++) = x;
  return l;
}

VectorXd values(std::initializer_list<double> v) {
  VectorXd out(static_cast<Index>(v.size()));
  Index i = 0;
  for (const double x : v) out(i++) = x;
  return out;
}

// AUC by counting every (positive, negative) pair, ties as one half.
double pairwise_auc(const VectorXd& s, const Labels& y) {
  double wins = 0, pairs = 0;
  for (Index i = 0; i < s.size(); ++i) {
    for (Index j = 0; j < s.size(); ++j) {
      if (y(i) != 1 || y(j) != -1) continue;
      pairs += 1;
      wins += s(i) > s(j) ? 1.0 : s(i) == s(j) ? 0.5 : 0.0;
    }
  }
  return wins / pairs;
}

}  // namespace

TEST_CASE("confusion counts") {
  const auto truth = labels({1, 1, 1, 1, 1, 1, -1, -1, -1, -1});
  const auto perfect = confusion(truth, truth);
  CHECK(perfect.tp == 6);
  CHECK(perfect.tn == 4);
  CHECK(perfect.fp == 0);
  CHECK(perfect.fn == 0);

  const auto half = labels({1, -1, 1, -1, 1, -1, 1, -1, 1, -1});
  const auto constant = confusion(Labels::Ones(10), half);
  CHECK(constant.tp == 5);
  CHECK(constant.fp == 5);
  CHECK(constant.tn == 0);
  CHECK(constant.fn == 0);

  const auto inverted = confusion((-truth).eval(), truth);
  CHECK(inverted.tp == 0);
  CHECK(inverted.tn == 0);
  CHECK_THROWS(confusion(Labels::Ones(3), Labels::Ones(4)));
}

TEST_CASE("core metrics") {
  const auto perfect = core_metrics({8, 0, 2, 0});
  CHECK(perfect.accuracy == 1.0);
  CHECK(perfect.f_weighted == 1.0);
  CHECK_FALSE(perfect.undefined_ratio);

  CHECK(f_score(0.8, 0.8) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(f_score(0.0, 0.0) == 0.0);

  const auto m = core_metrics({45, 5, 40, 10});
  CHECK(std::abs(m.precision_pos - 0.9) < 1e-12);
  CHECK(std::abs(m.recall_pos - 45.0 / 55.0) < 1e-12);
  CHECK(std::abs(m.f_pos - 0.857142857) < 1e-5);
  CHECK(std::abs(m.precision_neg - 40.0 / 50.0) < 1e-12);
  CHECK(std::abs(m.recall_neg - 40.0 / 45.0) < 1e-12);
  CHECK(m.accuracy == doctest::Approx(0.85));
  // Support-weighted: 55 actual positives, 45 actual negatives.
  const double f_neg = 2 * 0.8 * (40.0 / 45.0) / (0.8 + 40.0 / 45.0);
  CHECK(std::abs(m.f_weighted - (0.55 * m.f_pos + 0.45 * f_neg)) < 1e-12);
  CHECK(std::abs(m.tp_rate_weighted - m.accuracy) < 1e-12);
  CHECK(std::abs(m.fp_rate_weighted - (0.55 * (5.0 / 45.0) + 0.45 * (10.0 / 55.0))) < 1e-12);

  const auto none = core_metrics({0, 0, 5, 5});
  CHECK(none.undefined_ratio);
  CHECK(none.precision_pos == 0.0);
}

TEST_CASE("probability errors") {
  const auto y = labels({1, -1, 1, -1});
  const auto exact = probability_errors(values({1, 0, 1, 0}), y, 0.5);
  CHECK(exact.mae == 0.0);
  CHECK(exact.rmse == 0.0);
  CHECK(exact.rae == 0.0);

  const auto flat = probability_errors(VectorXd::Constant(4, 0.5), y, 0.3);
  CHECK(flat.mae == 0.5);
  CHECK(flat.rmse == 0.5);

  const auto hand = probability_errors(values({0.8, 0.3}), labels({1, -1}), 0.5);
  CHECK(std::abs(hand.mae - 0.25) < 1e-12);
  CHECK(std::abs(hand.rmse - std::sqrt(0.065)) < 1e-12);
  CHECK(std::abs(hand.rae - 0.5) < 1e-12);

  // The prior predictor itself has relative absolute error 1.
  const auto y5 = labels({1, 1, -1, 1, -1});
  CHECK(probability_errors(VectorXd::Constant(5, 0.6), y5, 0.6).rae == 1.0);
  CHECK(probability_errors(VectorXd::Constant(5, 0.37), y5, 0.37).rae == 1.0);
}

TEST_CASE("ROC AUC") {
  const auto y = labels({-1, -1, 1, -1, 1, 1});
  CHECK(roc_auc(values({0.1, 0.2, 0.8, 0.3, 0.9, 0.7}), y) == 1.0);
  CHECK(roc_auc(VectorXd::Constant(6, 0.4), y) == 0.5);
  CHECK(roc_auc(values({0.9, 0.8, 0.1, 0.7, 0.2, 0.3}), y) == 0.0);

  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(0, 1);
  VectorXd s(40);
  Labels l(40);
  for (Index i = 0; i < 40; ++i) {
    s(i) = std::round(u(gen) * 10) / 10;  // plenty of ties
    l(i) = i % 3 == 0 ? 1 : -1;
  }
  CHECK(std::abs(roc_auc(s, l) - pairwise_auc(s, l)) < 1e-12);

  double total = 0;
  std::vector<int> perm(l.data(), l.data() + l.size());
  for (int rep = 0; rep < 2000; ++rep) {
    std::shuffle(perm.begin(), perm.end(), gen);
    total += roc_auc(s, Eigen::Map<Labels>(perm.data(), 40));
  }
  CHECK(std::abs(total / 2000 - 0.5) < 0.01);
}

TEST_CASE("evaluate bundles everything") {
  const auto r = evaluate(values({0.9, 0.2, 0.6, 0.4}), labels({1, -1, -1, 1}), 0.5);
  CHECK(r.confusion.tp == 1);
  CHECK(r.confusion.fp == 1);
  CHECK(r.core.accuracy == 0.5);
  REQUIRE(r.auc.has_value());
  CHECK(*r.auc == 0.75);
  REQUIRE(r.rae.has_value());
  const auto single = evaluate(values({0.9, 0.8}), labels({1, 1}), 1.0);
  CHECK_FALSE(single.auc.has_value());
  CHECK_FALSE(single.rae.has_value());
}

TEST_CASE("paired t test") {
  const std::vector<double> b(10, 0.5);
  std::vector<double> a;
  for (int i = 0; i < 10; ++i) a.push_back(0.5 + (i < 5 ? 0.1 : 0.2));
  const auto r = paired_t_test(a, b);
  REQUIRE(r.t.has_value());
  CHECK(std::abs(*r.t - 9.0) < 1e-9);
  CHECK(r.df == 9.0);
  CHECK(r.significant_01);
  CHECK(r.significant_05);
  CHECK(*r.p_value < 1e-4);

  const auto back = paired_t_test(b, a);
  CHECK(std::abs(*back.t + 9.0) < 1e-9);

  const auto same = paired_t_test(a, a);
  CHECK(same.degenerate);
  CHECK_FALSE(same.t.has_value());
  CHECK_FALSE(same.significant_05);

  CHECK_THROWS(paired_t_test(a, std::vector<double>(9, 0.5)));
  CHECK_THROWS(paired_t_test(std::vector<double>{1.0}, std::vector<double>{0.0}));
}

TEST_CASE("critical values and the independent test") {
  CHECK(t_critical(9, 0.05) == doctest::Approx(2.262).epsilon(1e-3));
  CHECK(t_critical(9, 0.01) == doctest::Approx(3.250).epsilon(1e-3));
  CHECK(t_critical(18, 0.05) == doctest::Approx(2.101).epsilon(1e-3));
  CHECK(t_critical(60, 0.05) == doctest::Approx(2.000).epsilon(1e-3));

  const std::vector<double> a = {0.6, 0.7, 0.8, 0.7, 0.6};
  const std::vector<double> b = {0.5, 0.4, 0.6, 0.5, 0.5};
  const auto r = independent_t_test(a, b);
  REQUIRE(r.t.has_value());
  // Pooled variance: means 0.68 / 0.5, sample variances 0.007 / 0.005.
  const double sp = std::sqrt((4 * 0.007 + 4 * 0.005) / 8.0);
  CHECK(std::abs(*r.t - 0.18 / (sp * std::sqrt(0.4))) < 1e-9);
  CHECK(r.df == 8.0);

  const auto [mean, sd] = mean_and_std(a);
  CHECK(mean == doctest::Approx(0.68));
  CHECK(sd == doctest::Approx(std::sqrt(0.007)));
}
