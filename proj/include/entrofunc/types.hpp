#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "entrofunc/errors.hpp"

namespace entrofunc {

enum class Mode { continuous, discrete };

// Pair of non-negative integer exponents (r1, r2) of the target functional
// integral p_X^r1 p_Y^r2. Estimation with r1 = 0 swaps the two samples
// internally, so the working order always has r1 >= 1.
struct FunctionalOrder {
  int r1 = 0;
  int r2 = 0;

  int total() const { return r1 + r2; }
  FunctionalOrder swapped() const { return {r2, r1}; }
  bool operator==(const FunctionalOrder&) const = default;
};

// Throws std::invalid_argument unless r1, r2 >= 0 and r1 + r2 >= 1.
void validate_order(FunctionalOrder order);

// An i.i.d. sample of d-dimensional observations, stored row-major.
// Continuous mode requires finite coordinates; discrete mode requires
// integer-valued coordinates (exact comparability).
class Sample {
 public:
  Sample(std::vector<double> data, std::size_t dim, Mode mode);

  // One-dimensional convenience constructor.
  static Sample from_values(std::vector<double> values, Mode mode);

  std::size_t size() const { return dim_ == 0 ? 0 : data_.size() / dim_; }
  std::size_t dim() const { return dim_; }
  Mode mode() const { return mode_; }
  std::span<const double> point(std::size_t i) const {
    return {data_.data() + i * dim_, dim_};
  }
  const std::vector<double>& data() const { return data_; }

 private:
  std::vector<double> data_;
  std::size_t dim_ = 0;
  Mode mode_ = Mode::continuous;
};

// Per-point epsilon-neighbor counts around each X_i:
//   same[i]  = #{ j != i : d(X_i, X_j) <= eps }
//   other[i] = #{ k      : d(X_i, Y_k) <= eps }
// These are sufficient statistics for the collapsed U-statistic.
struct NeighborCounts {
  std::vector<std::uint32_t> same;
  std::vector<std::uint32_t> other;
  double epsilon = 0.0;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
};

// A point estimate of the coincidence functional. Raw estimates live in
// [0, 1]; normalized ones are divided by the epsilon-ball volume power
// b_eps(d)^(r-1) and estimate the density functional itself.
struct QEstimate {
  double value = 0.0;
  FunctionalOrder order;
  double epsilon = 0.0;
  bool normalized = false;
};

// Small dense square matrix (row-major), used for Student-r covariance
// parameters. Not a general linear-algebra type.
struct SquareMatrix {
  std::size_t n = 0;
  std::vector<double> a;

  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t size) : n(size), a(size * size, 0.0) {}
  static SquareMatrix identity(std::size_t size);
  static SquareMatrix scalar(std::size_t size, double value);

  double& at(std::size_t i, std::size_t j) { return a[i * n + j]; }
  double at(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

}  // namespace entrofunc
