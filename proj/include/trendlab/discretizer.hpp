#pragma once

#include "trendlab/indicators.hpp"

namespace trendlab {

/// Trend signs of the nine indicators, same column order as FeatureMatrix.
/// Starts one row after its source because of the previous-value rules.
struct SignMatrix {
  std::vector<Date> dates;
  SignValues values;

  [[nodiscard]] Index rows() const noexcept { return values.rows(); }
  [[nodiscard]] MatrixXd as_real() const { return values.cast<double>(); }
};

/// Per-column trend rules:
///   MA, WMA             close >= indicator -> +1
///   Mom                 Mom >= 0 -> +1
///   K%, D%, LW, MACD, A/D  value rose strictly since the previous row -> +1
///   RSI                 < 30 -> +1, > 70 -> -1, otherwise rose strictly -> +1
/// everything else is -1. `closes` is aligned row for row with `features`.
SignMatrix discretize(const FeatureMatrix& features, const VectorXd& closes);

/// Looks the closes up in `series` by feature date.
SignMatrix discretize(const FeatureMatrix& features, const PriceSeries& series);

void write_signs_csv(std::ostream& out, const SignMatrix& signs);

}  // namespace trendlab
