#pragma once

#include <Eigen/Dense>

#include <chrono>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace trendlab {

template <typename Scalar = double>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar = double>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using VectorXd = Vector<double>;
using MatrixXd = Matrix<double>;

/// Direction labels and discretized features, values in {+1, -1}.
using Labels = Eigen::VectorXi;
using SignValues = Matrix<int>;

using Index = Eigen::Index;
using Date = std::chrono::year_month_day;

/// Raised for every contract violation in the library. Input errors
/// (malformed files, bad arguments) use the InputError subtype so the CLI
/// can map them to the usage exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

std::string format_date(const Date& d);

}  // namespace trendlab
