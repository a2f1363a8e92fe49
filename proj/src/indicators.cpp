#include "trendlab/indicators.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <algorithm>

namespace trendlab {

void IndicatorConfig::validate() const {
  for (const auto& [value, name] : {std::pair{ma_window, "ma_window"}, std::pair{wma_window, "wma_window"},
                                    std::pair{n, "n"}, std::pair{ema_short, "ema_short"},
                                    std::pair{ema_long, "ema_long"}, std::pair{macd_signal_n, "macd_signal_n"}}) {
    if (value < 1) throw InputError(fmt::format("indicator setting {} must be >= 1, got {}", name, value));
  }
  if (ema_short >= ema_long) {
    throw InputError(fmt::format("ema_short ({}) must be below ema_long ({})", ema_short, ema_long));
  }
}

Index warmup_bars(const IndicatorConfig& cfg) {
  return std::max({cfg.ma_window - 1, cfg.wma_window - 1, cfg.n, 2 * cfg.n - 2, cfg.ema_long - 1, Index{1}});
}

FeatureMatrix compute_features(const PriceSeries& series, const IndicatorConfig& cfg) {
  cfg.validate();
  const Index warmup = warmup_bars(cfg);
  if (series.size() <= warmup) {
    throw InputError(
        fmt::format("series of {} bars does not clear the {}-bar indicator warmup", series.size(), warmup));
  }
  const VectorXd close = series.closes();
  const VectorXd high = series.highs();
  const VectorXd low = series.lows();

  const VectorXd k = stoch_k(close, high, low, cfg.n);
  MatrixXd all(series.size(), kFeatureCount);
  all.col(static_cast<Index>(Feature::MA)) = sma(close, cfg.ma_window);
  all.col(static_cast<Index>(Feature::WMA)) = wma(close, cfg.wma_window);
  all.col(static_cast<Index>(Feature::Mom)) = momentum(close, cfg.n);
  all.col(static_cast<Index>(Feature::K)) = k;
  all.col(static_cast<Index>(Feature::D)) = stoch_d(k, cfg.n);
  all.col(static_cast<Index>(Feature::RSI)) = rsi(close, cfg.n);
  all.col(static_cast<Index>(Feature::MACD)) = macd(close, cfg);
  all.col(static_cast<Index>(Feature::LW)) = williams_r(close, high, low, cfg.n);
  all.col(static_cast<Index>(Feature::AD)) = ad_oscillator(close, high, low);

  FeatureMatrix out;
  out.first_bar = warmup;
  out.values = all.bottomRows(series.size() - warmup);
  const auto dates = series.dates();
  out.dates.assign(dates.begin() + warmup, dates.end());
  if (!out.values.allFinite()) throw Error("indicator computation produced non-finite values");
  return out;
}

void write_features_csv(std::ostream& out, const FeatureMatrix& features) {
  out << "date";
  for (const auto name : kFeatureNames) out << ',' << name;
  out << '\n';
  for (Index r = 0; r < features.rows(); ++r) {
    out << format_date(features.dates[static_cast<std::size_t>(r)]);
    for (Index c = 0; c < kFeatureCount; ++c) out << fmt::format(",{:.9g}", features.values(r, c));
    out << '\n';
  }
}

}  // namespace trendlab
