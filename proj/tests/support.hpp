#pragma once

// Fixtures shared by the unit and acceptance tests. Deliberately uses the
// standard library RNG rather than trendlab's own.

#include "trendlab/market_data.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <vector>

namespace testing {

using trendlab::Date;
using trendlab::Index;

inline Date day(int offset) {
  using namespace std::chrono;
  return year_month_day{sys_days{year{2020} / January / 1} + days{offset}};
}

/// Bars with high = low = close unless ranges are given.
inline trendlab::PriceSeries series_from(const std::vector<double>& closes, std::vector<double> highs = {},
                                         std::vector<double> lows = {}) {
  if (highs.empty()) highs = closes;
  if (lows.empty()) lows = closes;
  std::vector<trendlab::OhlcBar> bars;
  for (std::size_t i = 0; i < closes.size(); ++i) {
    trendlab::OhlcBar b;
    b.date = day(static_cast<int>(i));
    b.close = closes[i];
    b.high = highs[i];
    b.low = lows[i];
    bars.push_back(b);
  }
  return trendlab::PriceSeries(std::move(bars));
}

struct Walk {
  std::vector<double> close, high, low;
};

/// Geometric random walk with independent wicks.
inline Walk random_walk(std::size_t n, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> step(0.0, 0.02);
  std::uniform_real_distribution<double> wick(0.0, 0.015);
  Walk w;
  double c = 100.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double prev = c;
    c *= std::exp(step(gen));
    w.close.push_back(c);
    w.high.push_back(std::max(prev, c) * (1.0 + wick(gen)));
    w.low.push_back(std::min(prev, c) * (1.0 - wick(gen)));
  }
  return w;
}

inline trendlab::PriceSeries walk_series(const Walk& w) { return series_from(w.close, w.high, w.low); }

}  // namespace testing
