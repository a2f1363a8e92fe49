#include "trendlab/discretizer.hpp"

#include <fmt/format.h>

namespace trendlab {

namespace {

constexpr double kRsiOversold = 30.0;
constexpr double kRsiOverbought = 70.0;

int sign_of(bool up) { return up ? 1 : -1; }

}  // namespace

SignMatrix discretize(const FeatureMatrix& features, const VectorXd& closes) {
  const Index n = features.rows();
  if (closes.size() != n || static_cast<Index>(features.dates.size()) != n) {
    throw Error(fmt::format("alignment mismatch: {} feature rows, {} closes", n, closes.size()));
  }
  if (features.values.cols() != kFeatureCount) throw Error("feature matrix must have 9 columns");
  if (n < 2) throw Error("discretization needs at least 2 rows");

  const auto& v = features.values;
  SignMatrix out;
  out.values.resize(n - 1, kFeatureCount);
  out.dates.assign(features.dates.begin() + 1, features.dates.end());
  for (Index t = 1; t < n; ++t) {
    const Index r = t - 1;
    auto rose = [&](Feature f) {
      const auto c = static_cast<Index>(f);
      return v(t, c) > v(t - 1, c);
    };
    auto at = [&](Feature f) { return v(t, static_cast<Index>(f)); };
    out.values(r, static_cast<Index>(Feature::MA)) = sign_of(closes(t) >= at(Feature::MA));
    out.values(r, static_cast<Index>(Feature::WMA)) = sign_of(closes(t) >= at(Feature::WMA));
    out.values(r, static_cast<Index>(Feature::Mom)) = sign_of(at(Feature::Mom) >= 0.0);
    for (const auto f : {Feature::K, Feature::D, Feature::LW, Feature::MACD, Feature::AD}) {
      out.values(r, static_cast<Index>(f)) = sign_of(rose(f));
    }
    const double rsi = at(Feature::RSI);
    int rsi_sign;
    if (rsi < kRsiOversold) {
      rsi_sign = 1;
    } else if (rsi > kRsiOverbought) {
      rsi_sign = -1;
    } else {
      rsi_sign = sign_of(rose(Feature::RSI));
    }
    out.values(r, static_cast<Index>(Feature::RSI)) = rsi_sign;
  }
  return out;
}

SignMatrix discretize(const FeatureMatrix& features, const PriceSeries& series) {
  VectorXd closes(features.rows());
  for (Index r = 0; r < features.rows(); ++r) {
    const auto pos = series.find(features.dates[static_cast<std::size_t>(r)]);
    if (!pos) throw Error("alignment mismatch: feature date missing from series");
    closes(r) = series[*pos].close;
  }
  return discretize(features, closes);
}

void write_signs_csv(std::ostream& out, const SignMatrix& signs) {
  out << "date";
  for (const auto name : kFeatureNames) out << ',' << name;
  out << '\n';
  for (Index r = 0; r < signs.rows(); ++r) {
    out << format_date(signs.dates[static_cast<std::size_t>(r)]);
    for (Index c = 0; c < kFeatureCount; ++c) out << ',' << signs.values(r, c);
    out << '\n';
  }
}

}  // namespace trendlab
