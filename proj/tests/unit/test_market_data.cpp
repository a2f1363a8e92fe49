#include "support.hpp"

#include "trendlab/market_data.hpp"

#include <doctest.h>

#include <sstream>

using namespace trendlab;

namespace {

PriceSeries parse(const std::string& text) {
  std::istringstream in(text);
  return load_csv(in);
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const InputError& e) {
    return e.what();
  }
  return "";
}

LabeledDataset rows_of(Index n) {
  std::vector<double> closes;
  for (Index i = 0; i <= n; ++i) closes.push_back(100.0 + static_cast<double>(i % 3));
  const auto s = testing::series_from(closes);
  auto dates = s.dates();
  dates.pop_back();
  return make_labels(s, dates, MatrixXd::Zero(n, 2));
}

}  // namespace

TEST_CASE("three well-formed rows load") {
  const auto s = parse(
      "date,open,high,low,close,volume\n"
      "2020-01-01,1,2,0.5,1.5,10\n"
      "2020-01-02,1.5,3,1,2.5,11\n"
      "2020-01-03,2.5,3,2,2,\n");
  CHECK(s.size() == 3);
  CHECK(s[1].close == 2.5);
  CHECK(s[0].open.value() == 1.0);
  CHECK_FALSE(s[2].volume.has_value());
  CHECK(format_date(s[2].date) == "2020-01-03");
}

TEST_CASE("high below low names the row") {
  const auto msg = error_of("date,high,low,close\n2020-01-01,2,1,1.5\n2020-01-02,5,9,6\n");
  CHECK(msg.find("line 3") != std::string::npos);
}

TEST_CASE("duplicated date is rejected") {
  const auto msg = error_of("date,high,low,close\n2020-01-01,2,1,1.5\n2020-01-01,2,1,1.5\n");
  CHECK(msg.find("non-increasing dates") != std::string::npos);
}

TEST_CASE("header is case-insensitive, column order free, BOM and CRLF tolerated") {
  const auto s = parse("\xEF\xBB\xBF" "Close,Date,LOW,High\r\n1.5,2020-01-01,1,2\r\n");
  REQUIRE(s.size() == 1);
  CHECK(s[0].close == 1.5);
  CHECK(s[0].high == 2.0);
}

TEST_CASE("malformed input") {
  CHECK(error_of("date,high,low\n2020-01-01,2,1\n").find("close") != std::string::npos);
  CHECK(error_of("date,high,low,close\n2020-13-01,2,1,1.5\n").find("line 2") != std::string::npos);
  CHECK(error_of("date,high,low,close\n2020-01-01,2,1,abc\n").find("line 2") != std::string::npos);
  CHECK(error_of("date,high,low,close\n2020-01-01,2,1,-3\n").find("line 2") != std::string::npos);
  CHECK(error_of("date,high,low,close\n2020-01-01,2,1\n").find("line 2") != std::string::npos);
  CHECK_FALSE(error_of("date,high,low,close\n").empty());
  CHECK_FALSE(error_of("").empty());
}

TEST_CASE("missing file names the path") {
  try {
    load_csv_file("/nonexistent/prices.csv");
    FAIL("expected an error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("/nonexistent/prices.csv") != std::string::npos);
  }
}

TEST_CASE("parse_date is strict") {
  CHECK(parse_date("2020-02-29").has_value());
  CHECK_FALSE(parse_date("2019-02-29").has_value());
  CHECK_FALSE(parse_date("2020-1-01").has_value());
  CHECK_FALSE(parse_date("2020-01-01x").has_value());
}

TEST_CASE("labels look one bar ahead, ties are down") {
  const auto up = testing::series_from({100, 101});
  const std::vector<Date> first{up[0].date};
  const auto l = make_labels(up, first, MatrixXd::Zero(1, 1));
  REQUIRE(l.rows() == 1);
  CHECK(l.labels(0) == 1);

  const auto flat = testing::series_from({100, 100});
  CHECK(make_labels(flat, first, MatrixXd::Zero(1, 1)).labels(0) == -1);

  // The final bar has no successor and is dropped.
  const auto three = testing::series_from({1, 2, 3});
  const auto all = three.dates();
  const auto l3 = make_labels(three, all, MatrixXd::Zero(3, 1));
  CHECK(l3.rows() == 2);
  CHECK(l3.dates.back() == three[1].date);
}

TEST_CASE("chronological split takes floor(f N) training rows") {
  auto s4 = chronological_split(rows_of(4), 0.75);
  CHECK(s4.train.rows() == 3);
  CHECK(s4.test.rows() == 1);
  CHECK(s4.train.dates.back() < s4.test.dates.front());

  auto big = chronological_split(rows_of(1935), 0.75);
  CHECK(big.train.rows() == 1451);
  CHECK(big.test.rows() == 484);

  CHECK_THROWS_AS(chronological_split(rows_of(10), 1.0), InputError);
  CHECK_THROWS_AS(chronological_split(rows_of(10), 0.0), InputError);
  CHECK_THROWS(chronological_split(rows_of(2), 0.2));
}

TEST_CASE("min-max normalizer") {
  MatrixXd train(3, 2);
  train << 0, 7, 5, 7, 10, 7;
  const auto p = fit_normalizer(train);
  const MatrixXd n = apply_normalizer(p, train);
  CHECK(n(0, 0) == 0.0);
  CHECK(n(1, 0) == 0.5);
  CHECK(n(2, 0) == 1.0);
  CHECK(n.col(1).isZero());

  MatrixXd test(1, 2);
  test << 12, 8;
  const MatrixXd t = apply_normalizer(p, test);
  CHECK(t(0, 0) == doctest::Approx(1.2).epsilon(1e-15));
  CHECK(t(0, 1) == 0.0);
  CHECK_THROWS(apply_normalizer(p, MatrixXd::Zero(1, 3)));
}

TEST_CASE("series lookup by date") {
  const auto s = testing::series_from({1, 2, 3, 4});
  CHECK(s.find(testing::day(2)).value() == 2);
  CHECK_FALSE(s.find(testing::day(9)).has_value());
}
