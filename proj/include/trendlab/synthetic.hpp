#pragma once

#include "trendlab/market_data.hpp"

#include <cstdint>
#include <ostream>
#include <vector>

namespace trendlab {

/// A stretch of bars with constant daily log-drift.
struct TrendRegime {
  Index length = 100;
  double drift = 0.0;
};

/// Seeded geometric random walk whose daily log-returns follow an AR(1)
/// around the current regime's drift. Regimes repeat cyclically.
struct SyntheticConfig {
  Index bars = 1000;
  double start_price = 100.0;
  double volatility = 0.02;
  double autocorrelation = 0.6;
  std::vector<TrendRegime> regimes = {{40, 0.001}, {40, -0.001}};
  Date start_date{std::chrono::year{2015}, std::chrono::January, std::chrono::day{1}};
  std::uint64_t seed = 6;
};

PriceSeries generate_synthetic(const SyntheticConfig& cfg);

/// date,open,high,low,close,volume with full round-trip precision.
void write_price_csv(std::ostream& out, const PriceSeries& series);

}  // namespace trendlab
