#include "trendlab/market_data.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace trendlab {

std::string format_date(const Date& d) {
  return fmt::format("{:04d}-{:02d}-{:02d}", static_cast<int>(d.year()),
                     static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return out;
}

std::optional<double> parse_number(std::string_view text) {
  if (text.empty()) return std::nullopt;
  if (text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) return std::nullopt;
  return value;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

void validate_bar(const OhlcBar& bar, const std::string& where) {
  if (!(bar.high > 0.0) || !(bar.low > 0.0) || !(bar.close > 0.0) || (bar.open && !(*bar.open > 0.0))) {
    throw InputError(fmt::format("{}: non-positive price", where));
  }
  if (bar.volume && *bar.volume < 0.0) throw InputError(fmt::format("{}: negative volume", where));
  if (bar.low > bar.high) {
    throw InputError(fmt::format("{}: low {} exceeds high {}", where, bar.low, bar.high));
  }
}

}  // namespace

std::optional<Date> parse_date(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  auto field = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
    int v = 0;
    const char* first = text.data() + pos;
    const auto [ptr, ec] = std::from_chars(first, first + len, v);
    if (ec != std::errc{} || ptr != first + len) return std::nullopt;
    return v;
  };
  const auto y = field(0, 4);
  const auto m = field(5, 2);
  const auto d = field(8, 2);
  if (!y || !m || !d) return std::nullopt;
  const Date date{std::chrono::year{*y}, std::chrono::month{static_cast<unsigned>(*m)},
                  std::chrono::day{static_cast<unsigned>(*d)}};
  if (!date.ok()) return std::nullopt;
  return date;
}

PriceSeries::PriceSeries(std::vector<OhlcBar> bars) : bars_(std::move(bars)) {
  if (bars_.empty()) throw InputError("price series is empty");
  for (std::size_t i = 0; i < bars_.size(); ++i) {
    validate_bar(bars_[i], fmt::format("bar {}", i));
    if (i > 0 && !(bars_[i - 1].date < bars_[i].date)) {
      throw InputError(fmt::format("bar {}: non-increasing dates ({} after {})", i,
                                   format_date(bars_[i].date), format_date(bars_[i - 1].date)));
    }
  }
}

VectorXd PriceSeries::closes() const {
  VectorXd v(size());
  for (Index i = 0; i < size(); ++i) v(i) = (*this)[i].close;
  return v;
}

VectorXd PriceSeries::highs() const {
  VectorXd v(size());
  for (Index i = 0; i < size(); ++i) v(i) = (*this)[i].high;
  return v;
}

VectorXd PriceSeries::lows() const {
  VectorXd v(size());
  for (Index i = 0; i < size(); ++i) v(i) = (*this)[i].low;
  return v;
}

std::vector<Date> PriceSeries::dates() const {
  std::vector<Date> out;
  out.reserve(bars_.size());
  for (const auto& b : bars_) out.push_back(b.date);
  return out;
}

std::optional<Index> PriceSeries::find(const Date& date) const {
  const auto it = std::lower_bound(bars_.begin(), bars_.end(), date,
                                   [](const OhlcBar& b, const Date& d) { return b.date < d; });
  if (it == bars_.end() || it->date != date) return std::nullopt;
  return static_cast<Index>(it - bars_.begin());
}

PriceSeries load_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::map<std::string, std::size_t> columns;
  std::size_t header_width = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view(line);
    if (line_no == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
    if (trim(view).empty()) continue;
    const auto fields = split_fields(view);
    header_width = fields.size();
    for (std::size_t i = 0; i < fields.size(); ++i) columns.emplace(lower(fields[i]), i);
    break;
  }
  if (header_width == 0) throw InputError("line 1: missing CSV header");
  for (const char* required : {"date", "high", "low", "close"}) {
    if (!columns.contains(required)) {
      throw InputError(fmt::format("line {}: header lacks required column '{}'", line_no, required));
    }
  }
  auto column = [&](const char* name) -> std::optional<std::size_t> {
    const auto it = columns.find(name);
    return it == columns.end() ? std::nullopt : std::optional<std::size_t>(it->second);
  };
  const std::size_t c_date = *column("date");
  const std::size_t c_high = *column("high");
  const std::size_t c_low = *column("low");
  const std::size_t c_close = *column("close");
  const auto c_open = column("open");
  const auto c_volume = column("volume");

  std::vector<OhlcBar> bars;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto where = fmt::format("line {}", line_no);
    const auto fields = split_fields(line);
    if (fields.size() != header_width) {
      throw InputError(fmt::format("{}: malformed row, expected {} fields, found {}", where, header_width,
                                   fields.size()));
    }
    OhlcBar bar;
    const auto date = parse_date(fields[c_date]);
    if (!date) throw InputError(fmt::format("{}: unparseable date '{}'", where, fields[c_date]));
    bar.date = *date;
    auto number = [&](std::size_t col, const char* name) {
      const auto v = parse_number(fields[col]);
      if (!v) throw InputError(fmt::format("{}: malformed {} value '{}'", where, name, fields[col]));
      return *v;
    };
    bar.high = number(c_high, "high");
    bar.low = number(c_low, "low");
    bar.close = number(c_close, "close");
    if (c_open && !fields[*c_open].empty()) bar.open = number(*c_open, "open");
    if (c_volume && !fields[*c_volume].empty()) bar.volume = number(*c_volume, "volume");
    validate_bar(bar, where);
    if (!bars.empty() && !(bars.back().date < bar.date)) {
      throw InputError(fmt::format("{}: non-increasing dates ({} after {})", where, format_date(bar.date),
                                   format_date(bars.back().date)));
    }
    bars.push_back(bar);
  }
  if (bars.empty()) throw InputError(fmt::format("line {}: no data rows", line_no));
  return PriceSeries(std::move(bars));
}

PriceSeries load_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(fmt::format("cannot open '{}'", path.string()));
  try {
    return load_csv(in);
  } catch (const InputError& e) {
    throw InputError(fmt::format("{}: {}", path.string(), e.what()));
  }
}

double LabeledDataset::positive_fraction() const {
  if (labels.size() == 0) return 0.0;
  return static_cast<double>((labels.array() > 0).count()) / static_cast<double>(labels.size());
}

LabeledDataset make_labels(const PriceSeries& series, std::span<const Date> dates, const MatrixXd& features) {
  if (static_cast<Index>(dates.size()) != features.rows()) {
    throw Error(fmt::format("alignment mismatch: {} dates for {} feature rows", dates.size(), features.rows()));
  }
  std::vector<Index> keep;
  std::vector<int> labels;
  keep.reserve(dates.size());
  for (std::size_t r = 0; r < dates.size(); ++r) {
    const auto pos = series.find(dates[r]);
    if (!pos) throw Error(fmt::format("alignment mismatch: feature date {} not in series", format_date(dates[r])));
    if (*pos + 1 >= series.size()) continue;
    keep.push_back(static_cast<Index>(r));
    labels.push_back(series[*pos + 1].close > series[*pos].close ? 1 : -1);
  }
  LabeledDataset out;
  out.features.resize(static_cast<Index>(keep.size()), features.cols());
  out.labels.resize(static_cast<Index>(keep.size()));
  for (std::size_t i = 0; i < keep.size(); ++i) {
    const auto row = static_cast<Index>(i);
    out.features.row(row) = features.row(keep[i]);
    out.labels(row) = labels[i];
    out.dates.push_back(dates[static_cast<std::size_t>(keep[i])]);
  }
  return out;
}

LabeledDataset slice_rows(const LabeledDataset& data, Index begin, Index count) {
  if (begin < 0 || count < 0 || begin + count > data.rows()) throw Error("row slice out of range");
  LabeledDataset out;
  out.features = data.features.middleRows(begin, count);
  out.labels = data.labels.segment(begin, count);
  out.dates.assign(data.dates.begin() + begin, data.dates.begin() + begin + count);
  return out;
}

DatasetSplit chronological_split(const LabeledDataset& data, double train_fraction) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw InputError(fmt::format("train fraction {} outside (0, 1)", train_fraction));
  }
  const Index n = data.rows();
  if (n < 2) throw Error("split needs at least 2 rows");
  const auto n_train = static_cast<Index>(std::floor(train_fraction * static_cast<double>(n)));
  if (n_train == 0 || n_train == n) {
    throw Error(fmt::format("split of {} rows at {} leaves an empty partition", n, train_fraction));
  }
  return {slice_rows(data, 0, n_train), slice_rows(data, n_train, n - n_train)};
}

NormalizationParams fit_normalizer(const MatrixXd& train) {
  if (train.rows() == 0) throw Error("cannot fit normalizer on empty matrix");
  return {train.colwise().minCoeff().transpose(), train.colwise().maxCoeff().transpose()};
}

MatrixXd apply_normalizer(const NormalizationParams& params, const MatrixXd& m) {
  if (m.cols() != params.min.size()) {
    throw Error(fmt::format("normalizer fitted on {} columns, applied to {}", params.min.size(), m.cols()));
  }
  MatrixXd out(m.rows(), m.cols());
  for (Index c = 0; c < m.cols(); ++c) {
    const double range = params.max(c) - params.min(c);
    if (range > 0.0) {
      out.col(c) = (m.col(c).array() - params.min(c)) / range;
    } else {
      out.col(c).setZero();
    }
  }
  return out;
}

}  // namespace trendlab
