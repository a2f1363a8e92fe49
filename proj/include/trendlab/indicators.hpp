#pragma once

// Technical indicators over closing/high/low series.
//
// Every single-indicator function returns a vector aligned with its input:
// entry t holds the value for bar t, and bars inside the warmup period
// (window not yet full) hold quiet NaN. Windows are the `n` bars ending at
// t inclusive, i.e. t-n+1..t.

#include "trendlab/market_data.hpp"
#include "trendlab/types.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>
#include <limits>
#include <string_view>

namespace trendlab {

struct IndicatorConfig {
  Index ma_window = 14;
  Index wma_window = 14;
  Index n = 10;  // Mom, K%, D%, RSI, LW
  Index ema_short = 12;
  Index ema_long = 26;
  Index macd_signal_n = 10;

  void validate() const;
};

namespace detail {

template <typename Scalar>
Vector<Scalar> undefined_like(Index size) {
  return Vector<Scalar>::Constant(size, std::numeric_limits<Scalar>::quiet_NaN());
}

inline void require_length(Index length, Index needed, std::string_view what) {
  if (length < needed) {
    throw Error(fmt::format("{} needs at least {} values, got {}", what, needed, length));
  }
}

inline void require_window(Index window, std::string_view what) {
  if (window < 1) throw Error(fmt::format("{} window must be >= 1, got {}", what, window));
}

}  // namespace detail

/// Simple moving average over `window` closes.
template <typename Derived>
auto sma(const Eigen::MatrixBase<Derived>& closes, Index window) {
  using Scalar = typename Derived::Scalar;
  detail::require_window(window, "sma");
  detail::require_length(closes.size(), window, "sma");
  auto out = detail::undefined_like<Scalar>(closes.size());
  for (Index t = window - 1; t < closes.size(); ++t) {
    out(t) = closes.segment(t - window + 1, window).mean();
  }
  return out;
}

/// Linearly weighted moving average, weight w on C_t down to 1 on C_{t-w+1}.
template <typename Derived>
auto wma(const Eigen::MatrixBase<Derived>& closes, Index window) {
  using Scalar = typename Derived::Scalar;
  detail::require_window(window, "wma");
  detail::require_length(closes.size(), window, "wma");
  const Vector<Scalar> weights = Vector<Scalar>::LinSpaced(window, Scalar(1), Scalar(window));
  const Scalar total = weights.sum();
  auto out = detail::undefined_like<Scalar>(closes.size());
  for (Index t = window - 1; t < closes.size(); ++t) {
    out(t) = weights.dot(closes.segment(t - window + 1, window)) / total;
  }
  return out;
}

/// C_t - C_{t-n}.
template <typename Derived>
auto momentum(const Eigen::MatrixBase<Derived>& closes, Index n) {
  using Scalar = typename Derived::Scalar;
  detail::require_window(n, "momentum");
  detail::require_length(closes.size(), n + 1, "momentum");
  auto out = detail::undefined_like<Scalar>(closes.size());
  const Index m = closes.size() - n;
  out.tail(m) = closes.tail(m) - closes.head(m);
  return out;
}

namespace detail {

// Shared by K% and LW. The extremes include the close itself so a close
// printed outside the bar's high/low range still lands inside [0, 100].
template <typename DC, typename DH, typename DL, typename F>
auto stochastic_position(const Eigen::MatrixBase<DC>& closes, const Eigen::MatrixBase<DH>& highs,
                         const Eigen::MatrixBase<DL>& lows, Index n, std::string_view what, F&& map) {
  using Scalar = typename DC::Scalar;
  require_window(n, what);
  if (highs.size() != closes.size() || lows.size() != closes.size()) {
    throw Error(fmt::format("{}: close/high/low lengths differ", what));
  }
  require_length(closes.size(), n, what);
  auto out = undefined_like<Scalar>(closes.size());
  for (Index t = n - 1; t < closes.size(); ++t) {
    const Index s = t - n + 1;
    const Scalar hh = std::max(highs.segment(s, n).maxCoeff(), closes.segment(s, n).maxCoeff());
    const Scalar ll = std::min(lows.segment(s, n).minCoeff(), closes.segment(s, n).minCoeff());
    out(t) = map(closes(t), hh, ll);
  }
  return out;
}

}  // namespace detail

/// Stochastic K%: 100 (C_t - LL) / (HH - LL); 50 on a flat window.
template <typename DC, typename DH, typename DL>
auto stoch_k(const Eigen::MatrixBase<DC>& closes, const Eigen::MatrixBase<DH>& highs,
             const Eigen::MatrixBase<DL>& lows, Index n) {
  using Scalar = typename DC::Scalar;
  return detail::stochastic_position(closes, highs, lows, n, "stoch_k", [](Scalar c, Scalar hh, Scalar ll) {
    return hh > ll ? Scalar(100) * (c - ll) / (hh - ll) : Scalar(50);
  });
}

/// Stochastic D%: mean of the last n K% values. Leading NaNs in `k` are
/// treated as warmup.
template <typename Derived>
auto stoch_d(const Eigen::MatrixBase<Derived>& k, Index n) {
  using Scalar = typename Derived::Scalar;
  detail::require_window(n, "stoch_d");
  Index first = 0;
  while (first < k.size() && std::isnan(k(first))) ++first;
  detail::require_length(k.size() - first, n, "stoch_d");
  auto out = detail::undefined_like<Scalar>(k.size());
  for (Index t = first + n - 1; t < k.size(); ++t) out(t) = k.segment(t - n + 1, n).mean();
  return out;
}

/// Relative strength index with simple n-day averages of up and down moves.
/// No down moves gives 100, no up moves gives 0, no movement at all 50.
template <typename Derived>
auto rsi(const Eigen::MatrixBase<Derived>& closes, Index n) {
  using Scalar = typename Derived::Scalar;
  detail::require_window(n, "rsi");
  detail::require_length(closes.size(), n + 1, "rsi");
  const Index m = closes.size() - 1;
  const Vector<Scalar> change = closes.tail(m) - closes.head(m);  // change(i) is bar i+1
  const Vector<Scalar> up = change.cwiseMax(Scalar(0));
  const Vector<Scalar> down = (-change).cwiseMax(Scalar(0));
  auto out = detail::undefined_like<Scalar>(closes.size());
  for (Index t = n; t < closes.size(); ++t) {
    const Scalar avg_up = up.segment(t - n, n).sum() / Scalar(n);
    const Scalar avg_down = down.segment(t - n, n).sum() / Scalar(n);
    if (avg_down == Scalar(0)) {
      out(t) = avg_up == Scalar(0) ? Scalar(50) : Scalar(100);
    } else if (avg_up == Scalar(0)) {
      out(t) = Scalar(0);
    } else {
      out(t) = Scalar(100) - Scalar(100) / (Scalar(1) + avg_up / avg_down);
    }
  }
  return out;
}

/// EMA recursion seeded with the first value, alpha = 2 / (k + 1).
template <typename Derived>
auto ema(const Eigen::MatrixBase<Derived>& values, Index k) {
  using Scalar = typename Derived::Scalar;
  detail::require_window(k, "ema");
  detail::require_length(values.size(), 1, "ema");
  const Scalar alpha = Scalar(2) / Scalar(k + 1);
  Vector<Scalar> out(values.size());
  out(0) = values(0);
  for (Index t = 1; t < values.size(); ++t) out(t) = out(t - 1) + alpha * (values(t) - out(t - 1));
  return out;
}

/// MACD line: EMA-smoothed DIFF = EMA(short) - EMA(long), smoothing
/// period `cfg.macd_signal_n`, seeded with the first DIFF. Defined from the
/// first bar.
template <typename Derived>
auto macd(const Eigen::MatrixBase<Derived>& closes, const IndicatorConfig& cfg) {
  if (closes.size() == 0) throw Error("macd of empty series");
  const auto diff = (ema(closes, cfg.ema_short) - ema(closes, cfg.ema_long)).eval();
  return ema(diff, cfg.macd_signal_n);
}

/// Williams %R in [-100, 0]: -100 (HH - C_t) / (HH - LL); -50 on a flat window.
template <typename DC, typename DH, typename DL>
auto williams_r(const Eigen::MatrixBase<DC>& closes, const Eigen::MatrixBase<DH>& highs,
                const Eigen::MatrixBase<DL>& lows, Index n) {
  using Scalar = typename DC::Scalar;
  return detail::stochastic_position(closes, highs, lows, n, "williams_r", [](Scalar c, Scalar hh, Scalar ll) {
    return hh > ll ? Scalar(-100) * (hh - c) / (hh - ll) : Scalar(-50);
  });
}

/// A/D oscillator (H_t - C_{t-1}) / (H_t - L_t); 0 when H_t = L_t.
template <typename DC, typename DH, typename DL>
auto ad_oscillator(const Eigen::MatrixBase<DC>& closes, const Eigen::MatrixBase<DH>& highs,
                   const Eigen::MatrixBase<DL>& lows) {
  using Scalar = typename DC::Scalar;
  if (highs.size() != closes.size() || lows.size() != closes.size()) {
    throw Error("ad_oscillator: close/high/low lengths differ");
  }
  detail::require_length(closes.size(), 2, "ad_oscillator");
  auto out = detail::undefined_like<Scalar>(closes.size());
  for (Index t = 1; t < closes.size(); ++t) {
    const Scalar range = highs(t) - lows(t);
    out(t) = range > Scalar(0) ? (highs(t) - closes(t - 1)) / range : Scalar(0);
  }
  return out;
}

enum class Feature : int { MA = 0, WMA, Mom, K, D, RSI, MACD, LW, AD };
inline constexpr Index kFeatureCount = 9;
inline constexpr std::array<std::string_view, kFeatureCount> kFeatureNames = {"ma",  "wma",  "mom", "k", "d",
                                                                             "rsi", "macd", "lw",  "ad"};

/// Nine indicator columns in the order of `Feature`, one row per bar from
/// `first_bar` on.
struct FeatureMatrix {
  std::vector<Date> dates;
  MatrixXd values;
  Index first_bar = 0;

  [[nodiscard]] Index rows() const noexcept { return values.rows(); }
  [[nodiscard]] auto col(Feature f) const { return values.col(static_cast<Index>(f)); }
};

/// Index of the first bar at which every indicator is defined. MACD counts
/// as warm once the long EMA has seen `ema_long` bars.
Index warmup_bars(const IndicatorConfig& cfg);

FeatureMatrix compute_features(const PriceSeries& series, const IndicatorConfig& cfg = {});

/// CSV with header date,ma,...,ad and 9 significant digits.
void write_features_csv(std::ostream& out, const FeatureMatrix& features);

}  // namespace trendlab
