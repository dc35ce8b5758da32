#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

#include "entrofunc/types.hpp"

namespace entrofunc {

// Uniform-grid spatial index with cell side equal to the query radius.
// A query scans the cells that can intersect the closed ball and compares
// squared distances exactly (d(x,c) <= eps as |x-c|^2 <= eps^2, no
// tolerance). Immutable after construction; concurrently queryable.
class GridIndex {
 public:
  struct KeyHash {
    std::size_t operator()(const std::vector<std::int64_t>& v) const noexcept;
  };

  GridIndex(const Sample& points, double epsilon);

  // Exact count of indexed points within the closed epsilon-ball around
  // center. epsilon must equal the construction-time cell side.
  std::int64_t count_within(std::span<const double> center,
                            double epsilon) const;

  std::size_t size() const { return size_; }
  std::size_t dim() const { return dim_; }
  double cell_side() const { return cell_side_; }

 private:
  std::int64_t cell_of(double coordinate) const;

  std::unordered_map<std::vector<std::int64_t>, std::vector<std::uint32_t>,
                     KeyHash>
      buckets_;
  std::vector<double> coords_;
  std::size_t dim_ = 0;
  std::size_t size_ = 0;
  double cell_side_ = 0.0;
};

// Counts of epsilon-close points around each X_i (self excluded in `same`),
// continuous mode. Uses the grid index for d <= 8 and falls back to the
// quadratic double loop above that, where 3^d cell overhead stops paying.
NeighborCounts neighbor_counts(const Sample& x, const Sample* y,
                               double epsilon);

// Quadratic reference implementation with the identical distance rule.
NeighborCounts neighbor_counts_brute(const Sample& x, const Sample* y,
                                     double epsilon);

// Exact-coincidence counts for discrete mode via hash multisets:
// same[i] = multiplicity of X_i in X minus one, other[i] = multiplicity of
// X_i in Y. Runs in O(n1 + n2).
NeighborCounts exact_match_counts(const Sample& x, const Sample* y);

}  // namespace entrofunc
