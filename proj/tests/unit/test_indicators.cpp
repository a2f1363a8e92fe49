#include "indicator_oracles.hpp"

#include "trendlab/indicators.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

using namespace trendlab;

namespace {

using namespace testing;

VectorXd vec(const Series& s) { return Eigen::Map<const VectorXd>(s.data(), static_cast<Index>(s.size())); }

void check_matches(const VectorXd& got, const Series& want, double tol = 1e-9) {
  REQUIRE(got.size() == static_cast<Index>(want.size()));
  for (Index t = 0; t < got.size(); ++t) {
    const double w = want[static_cast<std::size_t>(t)];
    CAPTURE(t);
    REQUIRE(std::isnan(got(t)) == std::isnan(w));
    if (!std::isnan(w)) REQUIRE(std::abs(got(t) - w) <= tol);
  }
}

double mean_of(const VectorXd& v) { return v.mean(); }
double std_of(const VectorXd& v) { return std::sqrt((v.array() - v.mean()).square().sum() / (v.size() - 1.0)); }

}  // namespace

TEST_CASE("indicators match brute-force oracles on a 1000-bar walk") {
  const auto w = testing::random_walk(1000, 11);
  const VectorXd c = vec(w.close), h = vec(w.high), l = vec(w.low);
  check_matches(sma(c, 14), naive_sma(w.close, 14));
  check_matches(wma(c, 14), naive_wma(w.close, 14));
  check_matches(momentum(c, 10), naive_mom(w.close, 10));
  check_matches(stoch_k(c, h, l, 10), naive_k(w, 10));
  check_matches(stoch_d(stoch_k(c, h, l, 10), 10), naive_d(naive_k(w, 10), 10));
  check_matches(rsi(c, 10), naive_rsi(w.close, 10));
  check_matches(macd(c, IndicatorConfig{}), naive_macd(w.close, 12, 26, 10));
  check_matches(williams_r(c, h, l, 10), naive_lw(w, 10));
  check_matches(ad_oscillator(c, h, l), naive_ad(w));
}

TEST_CASE("moving averages") {
  Series ramp(14);
  std::iota(ramp.begin(), ramp.end(), 1.0);
  CHECK(sma(vec(ramp), 14)(13) == doctest::Approx(7.5));
  const VectorXd flat = VectorXd::Constant(20, 3.25);
  CHECK((sma(flat, 14).tail(7).array() == 3.25).all());
  CHECK(wma(vec({1, 2, 3}), 3)(2) == doctest::Approx(14.0 / 6.0).epsilon(1e-15));
  CHECK(wma(flat, 14).tail(7).isApproxToConstant(3.25, 1e-15));
  CHECK(std::isnan(sma(vec(ramp), 14)(12)));
  CHECK_THROWS(sma(vec({1, 2}), 3));
  CHECK_THROWS(sma(vec({1, 2}), 0));
}

TEST_CASE("indicator templates accept single precision") {
  const Eigen::VectorXf c = Eigen::VectorXf::LinSpaced(20, 1.0f, 20.0f);
  const Eigen::VectorXf m = sma(c, 4);
  CHECK(m(3) == doctest::Approx(2.5f));
  const Eigen::VectorXf e = ema(c, 3);
  CHECK(e(0) == 1.0f);
}

TEST_CASE("momentum") {
  Series c(11, 100.0);
  c[10] = 110.0;
  CHECK(momentum(vec(c), 10)(10) == 10.0);
  CHECK(momentum(VectorXd::Constant(15, 4.0), 10).tail(5).isZero());
}

TEST_CASE("stochastic K%, D% and Williams %R") {
  // Close at the window's highest high, then at its lowest low, then flat.
  const testing::Walk top{{1, 2, 3}, {1, 2, 3}, {1, 2, 3}};
  const VectorXd tc = vec(top.close);
  CHECK(stoch_k(tc, tc, tc, 3)(2) == 100.0);
  CHECK(williams_r(tc, tc, tc, 3)(2) == 0.0);
  const VectorXd bottom = vec({3, 2, 1});
  CHECK(stoch_k(bottom, bottom, bottom, 3)(2) == 0.0);
  CHECK(williams_r(bottom, bottom, bottom, 3)(2) == -100.0);
  const VectorXd flat = VectorXd::Constant(5, 2.0);
  CHECK(stoch_k(flat, flat, flat, 3)(4) == 50.0);
  CHECK(williams_r(flat, flat, flat, 3)(4) == -50.0);

  CHECK(stoch_d(VectorXd::Constant(12, 60.0), 10).tail(3).isApproxToConstant(60.0));
  CHECK(stoch_d(vec({0, 100}), 2)(1) == 50.0);

  // A close printed above the bar's high still stays in range.
  const VectorXd c = vec({1, 2, 5}), h = vec({1.5, 2.5, 4}), l = vec({0.5, 1.5, 3});
  CHECK(stoch_k(c, h, l, 3)(2) == 100.0);
}

TEST_CASE("RSI degenerate rules") {
  Series rising(15), alternating(15);
  for (int i = 0; i < 15; ++i) {
    rising[i] = 10.0 + i;
    alternating[i] = 10.0 + (i % 2);
  }
  CHECK(rsi(vec(rising), 10)(14) == 100.0);
  CHECK(rsi(vec(alternating), 10)(14) == doctest::Approx(50.0).epsilon(1e-12));
  Series falling(rising.rbegin(), rising.rend());
  CHECK(rsi(vec(falling), 10)(14) == 0.0);
  CHECK(rsi(VectorXd::Constant(15, 1.0), 10)(14) == 50.0);
}

TEST_CASE("MACD") {
  CHECK(macd(VectorXd::Constant(40, 7.0), IndicatorConfig{}).isZero());
  const VectorXd one = VectorXd::Constant(1, 9.0);
  CHECK(macd(one, IndicatorConfig{})(0) == 0.0);
}

TEST_CASE("A/D oscillator") {
  CHECK(ad_oscillator(vec({5, 7}), vec({5, 10}), vec({5, 5}))(1) == 1.0);
  CHECK(ad_oscillator(vec({10, 7}), vec({10, 10}), vec({10, 5}))(1) == 0.0);
  CHECK(ad_oscillator(vec({10, 7}), vec({10, 7}), vec({10, 7}))(1) == 0.0);
}

TEST_CASE("Williams %R is K% shifted by -100") {
  for (unsigned seed : {1u, 2u, 3u}) {
    const auto w = testing::random_walk(500, seed);
    const VectorXd c = vec(w.close), h = vec(w.high), l = vec(w.low);
    const VectorXd k = stoch_k(c, h, l, 10).tail(491);
    const VectorXd lw = williams_r(c, h, l, 10).tail(491);
    CHECK(std::abs(mean_of(lw) - mean_of(k) + 100.0) < 1e-9);
    CHECK(std::abs(std_of(lw) - std_of(k)) < 1e-9);
  }
}

TEST_CASE("warmup is counted by hand for the default configuration") {
  // MA/WMA first defined at bar 13, Mom and RSI at 10, K% and LW at 9,
  // D% at 9 + 9 = 18, A/D at 1, and the 26-bar EMA has seen 26 bars at 25.
  CHECK(warmup_bars(IndicatorConfig{}) == 25);
  IndicatorConfig slow;
  slow.n = 20;  // D% needs 2n - 1 bars
  CHECK(warmup_bars(slow) == 38);
}

TEST_CASE("compute_features on constant bars") {
  const auto s = testing::series_from(Series(30, 42.0));
  const auto f = compute_features(s);
  REQUIRE(f.rows() == 5);
  CHECK(f.first_bar == 25);
  CHECK(f.dates.front() == s[25].date);
  CHECK(f.col(Feature::MA).isApproxToConstant(42.0));
  CHECK(f.col(Feature::WMA).isApproxToConstant(42.0));
  CHECK(f.col(Feature::Mom).isZero());
  CHECK((f.col(Feature::K).array() == 50.0).all());
  CHECK((f.col(Feature::D).array() == 50.0).all());
  CHECK((f.col(Feature::RSI).array() == 50.0).all());
  CHECK(f.col(Feature::MACD).isZero());
  CHECK((f.col(Feature::LW).array() == -50.0).all());
  CHECK(f.col(Feature::AD).isZero());
}

TEST_CASE("compute_features columns match their oracles") {
  const auto w = testing::random_walk(1000, 5);
  const auto f = compute_features(testing::walk_series(w));
  REQUIRE(f.rows() == 975);
  auto tail = [](const Series& s) { return vec(Series(s.begin() + 25, s.end())); };
  CHECK(f.col(Feature::MA).isApprox(tail(naive_sma(w.close, 14)), 1e-12));
  CHECK(f.col(Feature::D).isApprox(tail(naive_d(naive_k(w, 10), 10)), 1e-12));
  CHECK((f.col(Feature::MACD) - tail(naive_macd(w.close, 12, 26, 10))).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((f.col(Feature::AD) - tail(naive_ad(w))).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("too short or misconfigured inputs fail") {
  CHECK_THROWS_AS(compute_features(testing::series_from(Series(25, 1.0))), Error);
  IndicatorConfig bad;
  bad.ema_short = 30;
  CHECK_THROWS(bad.validate());
  bad = IndicatorConfig{};
  bad.n = 0;
  CHECK_THROWS(bad.validate());
}

TEST_CASE("feature CSV has a header and one line per row") {
  const auto f = compute_features(testing::series_from(Series(30, 1.0)));
  std::ostringstream out;
  write_features_csv(out, f);
  const auto text = out.str();
  CHECK(text.rfind("date,ma,wma,mom,k,d,rsi,macd,lw,ad\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 6);
}
