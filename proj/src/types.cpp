#include "entrofunc/types.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace entrofunc {

void validate_order(FunctionalOrder order) {
  if (order.r1 < 0 || order.r2 < 0) {
    throw std::invalid_argument("functional order exponents must be >= 0");
  }
  if (order.total() < 1) {
    throw std::invalid_argument("functional order must satisfy r1 + r2 >= 1");
  }
}

namespace {

// Largest magnitude a coordinate may take and still be exactly comparable
// as an integer.
constexpr double kMaxExactInteger = 9007199254740992.0;  // 2^53

}  // namespace

Sample::Sample(std::vector<double> data, std::size_t dim, Mode mode)
    : data_(std::move(data)), dim_(dim), mode_(mode) {
  if (dim_ == 0) {
    throw std::invalid_argument("sample dimension must be >= 1");
  }
  if (data_.size() % dim_ != 0) {
    throw std::invalid_argument("sample data length is not a multiple of d");
  }
  for (double v : data_) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("sample coordinates must be finite");
    }
    if (mode_ == Mode::discrete &&
        (v != std::floor(v) || std::abs(v) > kMaxExactInteger)) {
      throw std::invalid_argument(
          "discrete-mode coordinates must be integer-valued");
    }
  }
}

Sample Sample::from_values(std::vector<double> values, Mode mode) {
  return Sample(std::move(values), 1, mode);
}

SquareMatrix SquareMatrix::identity(std::size_t size) {
  return scalar(size, 1.0);
}

SquareMatrix SquareMatrix::scalar(std::size_t size, double value) {
  SquareMatrix m(size);
  for (std::size_t i = 0; i < size; ++i) m.at(i, i) = value;
  return m;
}

}  // namespace entrofunc
