#include "trendlab/synthetic.hpp"

#include "trendlab/random.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace trendlab {

PriceSeries generate_synthetic(const SyntheticConfig& cfg) {
  if (cfg.bars < 1) throw InputError("synthetic series needs at least one bar");
  if (!(cfg.start_price > 0.0) || !(cfg.volatility >= 0.0)) throw InputError("synthetic: bad price or volatility");
  if (std::abs(cfg.autocorrelation) >= 1.0) throw InputError("synthetic: |autocorrelation| must be < 1");
  for (const auto& r : cfg.regimes) {
    if (r.length < 1) throw InputError("synthetic: regime length must be >= 1");
  }
  Rng rng(cfg.seed);
  std::vector<OhlcBar> bars;
  bars.reserve(static_cast<std::size_t>(cfg.bars));
  std::chrono::sys_days day{cfg.start_date};
  double close = cfg.start_price;
  double shock = 0.0;  // AR(1) part of the last return
  std::size_t regime = 0;
  Index left_in_regime = cfg.regimes.empty() ? 0 : cfg.regimes.front().length;
  for (Index i = 0; i < cfg.bars; ++i) {
    double drift = 0.0;
    if (!cfg.regimes.empty()) {
      if (left_in_regime == 0) {
        regime = (regime + 1) % cfg.regimes.size();
        left_in_regime = cfg.regimes[regime].length;
      }
      drift = cfg.regimes[regime].drift;
      --left_in_regime;
    }
    shock = cfg.autocorrelation * shock + cfg.volatility * standard_normal(rng);
    const double open = close;
    close = open * std::exp(drift + shock);
    const double wick_up = 0.5 * cfg.volatility * std::abs(standard_normal(rng));
    const double wick_down = 0.5 * cfg.volatility * std::abs(standard_normal(rng));
    OhlcBar bar;
    bar.date = std::chrono::year_month_day{day};
    bar.open = open;
    bar.close = close;
    bar.high = std::max(open, close) * (1.0 + wick_up);
    bar.low = std::min(open, close) * (1.0 - std::min(wick_down, 0.5));
    bar.volume = std::round(1000.0 * (1.0 + uniform01(rng)));
    bars.push_back(bar);
    day += std::chrono::days{1};
  }
  return PriceSeries(std::move(bars));
}

void write_price_csv(std::ostream& out, const PriceSeries& series) {
  out << "date,open,high,low,close,volume\n";
  for (const auto& b : series.bars()) {
    out << format_date(b.date) << ',';
    if (b.open) out << fmt::format("{}", *b.open);
    out << fmt::format(",{},{},{},", b.high, b.low, b.close);
    if (b.volume) out << fmt::format("{}", *b.volume);
    out << '\n';
  }
}

}  // namespace trendlab
