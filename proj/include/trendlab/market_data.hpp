#pragma once

#include "trendlab/types.hpp"

#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <vector>

namespace trendlab {

struct OhlcBar {
  Date date;
  double high = 0.0;
  double low = 0.0;
  double close = 0.0;
  std::optional<double> open;
  std::optional<double> volume;
};

/// Date-ordered daily bars. Construction validates: non-empty, strictly
/// increasing dates, positive prices, low <= high. Close is allowed to sit
/// outside [low, high] since real feeds do that.
class PriceSeries {
 public:
  explicit PriceSeries(std::vector<OhlcBar> bars);

  [[nodiscard]] Index size() const noexcept { return static_cast<Index>(bars_.size()); }
  [[nodiscard]] const std::vector<OhlcBar>& bars() const noexcept { return bars_; }
  [[nodiscard]] const OhlcBar& operator[](Index i) const { return bars_[static_cast<std::size_t>(i)]; }

  [[nodiscard]] VectorXd closes() const;
  [[nodiscard]] VectorXd highs() const;
  [[nodiscard]] VectorXd lows() const;
  [[nodiscard]] std::vector<Date> dates() const;

  /// Position of `date` in the series, if present.
  [[nodiscard]] std::optional<Index> find(const Date& date) const;

 private:
  std::vector<OhlcBar> bars_;
};

/// Parses a header-led CSV (date,high,low,close required, open,volume
/// optional, any order, case-insensitive). Errors name the 1-based line.
PriceSeries load_csv(std::istream& in);
PriceSeries load_csv_file(const std::filesystem::path& path);

/// Strict YYYY-MM-DD.
std::optional<Date> parse_date(std::string_view text);

struct LabeledDataset {
  std::vector<Date> dates;
  MatrixXd features;
  Labels labels;

  [[nodiscard]] Index rows() const noexcept { return features.rows(); }
  [[nodiscard]] double positive_fraction() const;
};

/// Attaches next-day direction labels to an already computed feature
/// matrix: label(t) = +1 iff close(t+1) > close(t), ties are -1. Rows whose
/// date is the last bar of `series` are dropped. Every date must exist in
/// the series.
LabeledDataset make_labels(const PriceSeries& series, std::span<const Date> dates,
                           const MatrixXd& features);

struct DatasetSplit {
  LabeledDataset train;
  LabeledDataset test;
};

/// First floor(train_fraction * N) rows train, the rest test. No shuffling.
DatasetSplit chronological_split(const LabeledDataset& data, double train_fraction);

/// Contiguous row range [begin, begin + count).
LabeledDataset slice_rows(const LabeledDataset& data, Index begin, Index count);

struct NormalizationParams {
  VectorXd min;
  VectorXd max;
};

NormalizationParams fit_normalizer(const MatrixXd& train);

/// (x - min) / (max - min) per column, constant columns map to 0. No
/// clipping, so out-of-range test values leave [0, 1].
MatrixXd apply_normalizer(const NormalizationParams& params, const MatrixXd& m);

}  // namespace trendlab
