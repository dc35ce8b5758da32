#include "entrofunc/neighbor.hpp"

#include <cmath>
#include <stdexcept>

namespace entrofunc {

namespace {

// Squared Euclidean distance; callers compare against eps^2 exactly.
double dist2(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - b[k];
    s += diff * diff;
  }
  return s;
}

// Grid cells beat the O(n^2) loop only while the 3^d cell neighborhood
// stays small; above this the double loop wins at desk scales.
constexpr std::size_t kMaxGridDim = 8;

}  // namespace

std::size_t GridIndex::KeyHash::operator()(
    const std::vector<std::int64_t>& v) const noexcept {
  std::uint64_t h = 0x9E3779B97F4A7C15ull;
  for (std::int64_t c : v) {
    h ^= static_cast<std::uint64_t>(c) + 0x9E3779B97F4A7C15ull + (h << 6) +
         (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

std::int64_t GridIndex::cell_of(double coordinate) const {
  return static_cast<std::int64_t>(std::floor(coordinate / cell_side_));
}

GridIndex::GridIndex(const Sample& points, double epsilon)
    : coords_(points.data()),
      dim_(points.dim()),
      size_(points.size()),
      cell_side_(epsilon) {
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("grid cell side must be > 0");
  }
  std::vector<std::int64_t> key(dim_);
  for (std::size_t i = 0; i < size_; ++i) {
    const auto p = points.point(i);
    for (std::size_t k = 0; k < dim_; ++k) key[k] = cell_of(p[k]);
    buckets_[key].push_back(static_cast<std::uint32_t>(i));
  }
}

std::int64_t GridIndex::count_within(std::span<const double> center,
                                     double epsilon) const {
  if (center.size() != dim_) {
    throw std::invalid_argument("query dimension does not match the index");
  }
  if (epsilon != cell_side_) {
    throw std::invalid_argument("query radius must equal the grid cell side");
  }
  if (size_ == 0) return 0;

  // Scan every cell the closed ball can reach. Bounds come from the
  // monotone rounding of (c - eps)/eps and (c + eps)/eps, so any indexed
  // point within the ball hashes inside the scanned box.
  std::vector<std::int64_t> lo(dim_), hi(dim_), cursor(dim_);
  for (std::size_t k = 0; k < dim_; ++k) {
    lo[k] = cell_of(center[k] - epsilon);
    hi[k] = cell_of(center[k] + epsilon);
    cursor[k] = lo[k];
  }

  const double eps2 = epsilon * epsilon;
  std::int64_t count = 0;
  while (true) {
    auto it = buckets_.find(cursor);
    if (it != buckets_.end()) {
      for (std::uint32_t idx : it->second) {
        const std::span<const double> p{coords_.data() + idx * dim_, dim_};
        if (dist2(p, center) <= eps2) ++count;
      }
    }
    std::size_t axis = 0;
    while (axis < dim_ && cursor[axis] == hi[axis]) {
      cursor[axis] = lo[axis];
      ++axis;
    }
    if (axis == dim_) break;
    ++cursor[axis];
  }
  return count;
}

NeighborCounts neighbor_counts_brute(const Sample& x, const Sample* y,
                                     double epsilon) {
  const std::size_t n1 = x.size();
  const std::size_t n2 = y ? y->size() : 0;
  const double eps2 = epsilon * epsilon;

  NeighborCounts counts;
  counts.same.assign(n1, 0);
  counts.other.assign(n1, 0);
  counts.epsilon = epsilon;
  counts.n1 = n1;
  counts.n2 = n2;

  for (std::size_t i = 0; i < n1; ++i) {
    const auto pi = x.point(i);
    for (std::size_t j = i + 1; j < n1; ++j) {
      if (dist2(pi, x.point(j)) <= eps2) {
        ++counts.same[i];
        ++counts.same[j];
      }
    }
    for (std::size_t k = 0; k < n2; ++k) {
      if (dist2(pi, y->point(k)) <= eps2) ++counts.other[i];
    }
  }
  return counts;
}

NeighborCounts neighbor_counts(const Sample& x, const Sample* y,
                               double epsilon) {
  if (x.mode() != Mode::continuous || (y && y->mode() != Mode::continuous)) {
    throw std::invalid_argument(
        "neighbor_counts requires continuous-mode samples");
  }
  if (y && y->dim() != x.dim()) {
    throw std::invalid_argument("sample dimensions disagree");
  }
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("neighbor radius must be > 0");
  }
  if (x.dim() > kMaxGridDim) {
    return neighbor_counts_brute(x, y, epsilon);
  }

  const std::size_t n1 = x.size();
  const std::size_t n2 = y ? y->size() : 0;

  NeighborCounts counts;
  counts.same.assign(n1, 0);
  counts.other.assign(n1, 0);
  counts.epsilon = epsilon;
  counts.n1 = n1;
  counts.n2 = n2;

  if (n1 > 0) {
    const GridIndex index_x(x, epsilon);
    for (std::size_t i = 0; i < n1; ++i) {
      // The ball around X_i always contains X_i itself; exclude it.
      counts.same[i] = static_cast<std::uint32_t>(
          index_x.count_within(x.point(i), epsilon) - 1);
    }
  }
  if (n2 > 0) {
    const GridIndex index_y(*y, epsilon);
    for (std::size_t i = 0; i < n1; ++i) {
      counts.other[i] = static_cast<std::uint32_t>(
          index_y.count_within(x.point(i), epsilon));
    }
  }
  return counts;
}

namespace {

struct IntKeyHash {
  std::size_t operator()(const std::vector<std::int64_t>& v) const noexcept {
    return GridIndex::KeyHash{}(v);
  }
};

std::vector<std::int64_t> integer_key(std::span<const double> p) {
  std::vector<std::int64_t> key(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) {
    key[k] = static_cast<std::int64_t>(std::llround(p[k]));
  }
  return key;
}

}  // namespace

NeighborCounts exact_match_counts(const Sample& x, const Sample* y) {
  if (x.mode() != Mode::discrete || (y && y->mode() != Mode::discrete)) {
    throw std::invalid_argument(
        "exact_match_counts requires discrete-mode samples");
  }
  if (y && y->dim() != x.dim()) {
    throw std::invalid_argument("sample dimensions disagree");
  }

  const std::size_t n1 = x.size();
  const std::size_t n2 = y ? y->size() : 0;

  using Multiset =
      std::unordered_map<std::vector<std::int64_t>, std::uint32_t, IntKeyHash>;
  Multiset mult_x;
  mult_x.reserve(n1);
  for (std::size_t i = 0; i < n1; ++i) ++mult_x[integer_key(x.point(i))];
  Multiset mult_y;
  if (n2 > 0) {
    mult_y.reserve(n2);
    for (std::size_t k = 0; k < n2; ++k) ++mult_y[integer_key(y->point(k))];
  }

  NeighborCounts counts;
  counts.same.assign(n1, 0);
  counts.other.assign(n1, 0);
  counts.epsilon = 0.0;
  counts.n1 = n1;
  counts.n2 = n2;
  for (std::size_t i = 0; i < n1; ++i) {
    const auto key = integer_key(x.point(i));
    counts.same[i] = mult_x.at(key) - 1;
    if (n2 > 0) {
      auto it = mult_y.find(key);
      counts.other[i] = it == mult_y.end() ? 0 : it->second;
    }
  }
  return counts;
}

}  // namespace entrofunc
