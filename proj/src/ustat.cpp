#include "entrofunc/ustat.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "entrofunc/ball.hpp"
#include "entrofunc/neighbor.hpp"

namespace entrofunc {

namespace {

// Compensated (Kahan) accumulator so the per-point reduction is stable to
// ~1 ulp regardless of summation order.
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;

  void add(double v) {
    const double y = v - carry;
    const double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

// Ratio of falling factorials (a)_k / (n)_k as a product of per-factor
// ratios in [0, 1]; exactly 0 when a < k (empty neighborhoods are valid
// zero contributions, not errors).
double falling_ratio(std::int64_t a, std::int64_t n, int k) {
  if (a < k) return 0.0;
  double r = 1.0;
  for (int j = 0; j < k; ++j) {
    r *= static_cast<double>(a - j) / static_cast<double>(n - j);
  }
  return r;
}

void check_sizes(std::size_t n1, std::size_t n2, FunctionalOrder order) {
  if (n1 < static_cast<std::size_t>(order.r1)) {
    throw InsufficientSampleError(
        "sample X has " + std::to_string(n1) + " points but order needs " +
        std::to_string(order.r1));
  }
  if (n2 < static_cast<std::size_t>(order.r2)) {
    throw InsufficientSampleError(
        "sample Y has " + std::to_string(n2) + " points but order needs " +
        std::to_string(order.r2));
  }
}

}  // namespace

QEstimate q_from_counts(const NeighborCounts& counts, FunctionalOrder order) {
  validate_order(order);
  if (order.r1 < 1) {
    throw std::invalid_argument(
        "q_from_counts needs r1 >= 1; swap samples for r1 = 0");
  }
  check_sizes(counts.n1, counts.n2, order);

  const auto n1 = static_cast<std::int64_t>(counts.n1);
  const auto n2 = static_cast<std::int64_t>(counts.n2);

  // Per-point weight C(a_i, r1-1) C(b_i, r2) / (C(n1,r1) C(n2,r2) r1)
  // rearranged so every factor is a bounded ratio:
  //   prod_{j<r1-1} (a_i-j)/(n1-j) * 1/(n1-r1+1) * prod_{j<r2} (b_i-j)/(n2-j)
  KahanSum acc;
  const double tail = 1.0 / static_cast<double>(n1 - order.r1 + 1);
  for (std::size_t i = 0; i < counts.n1; ++i) {
    const double own =
        falling_ratio(counts.same[i], n1, order.r1 - 1);
    if (own == 0.0) continue;
    const double cross = falling_ratio(counts.other[i], n2, order.r2);
    if (cross == 0.0) continue;
    acc.add(own * tail * cross);
  }

  QEstimate q;
  q.value = std::clamp(acc.sum, 0.0, 1.0);
  q.order = order;
  q.epsilon = counts.epsilon;
  q.normalized = false;
  return q;
}

QEstimate estimate_q(const Sample& x, const Sample* y, FunctionalOrder order,
                     double epsilon) {
  validate_order(order);
  if (x.mode() != Mode::continuous || (y && y->mode() != Mode::continuous)) {
    throw std::invalid_argument("estimate_q requires continuous-mode samples");
  }
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("estimate_q requires epsilon > 0");
  }
  if (order.r1 == 0) {
    // q_{0,r2}(X, Y) = q_{r2,0}(Y, X): the functional ignores the law of X.
    if (y == nullptr || y->size() == 0) {
      throw std::invalid_argument("order (0, r2) needs a nonempty Y sample");
    }
    QEstimate q = estimate_q(*y, &x, order.swapped(), epsilon);
    q.order = order;
    return q;
  }
  if (order.r2 > 0 && (y == nullptr || y->size() == 0)) {
    throw std::invalid_argument("order with r2 > 0 needs a Y sample");
  }
  if (y && y->dim() != x.dim()) {
    throw std::invalid_argument("sample dimensions disagree");
  }

  const Sample* other = order.r2 > 0 ? y : nullptr;
  const NeighborCounts counts = neighbor_counts(x, other, epsilon);
  QEstimate q = q_from_counts(counts, order);
  const int power = order.total() - 1;
  if (power > 0) {
    q.value /= std::pow(ball_volume(x.dim(), epsilon), power);
  }
  q.normalized = true;
  return q;
}

QEstimate estimate_q_discrete(const Sample& x, const Sample* y,
                              FunctionalOrder order) {
  validate_order(order);
  if (x.mode() != Mode::discrete || (y && y->mode() != Mode::discrete)) {
    throw std::invalid_argument(
        "estimate_q_discrete requires discrete-mode samples");
  }
  if (order.r1 == 0) {
    if (y == nullptr || y->size() == 0) {
      throw std::invalid_argument("order (0, r2) needs a nonempty Y sample");
    }
    QEstimate q = estimate_q_discrete(*y, &x, order.swapped());
    q.order = order;
    return q;
  }
  if (order.r2 > 0 && (y == nullptr || y->size() == 0)) {
    throw std::invalid_argument("order with r2 > 0 needs a Y sample");
  }
  if (y && y->dim() != x.dim()) {
    throw std::invalid_argument("sample dimensions disagree");
  }

  const Sample* other = order.r2 > 0 ? y : nullptr;
  return q_from_counts(exact_match_counts(x, other), order);
}

}  // namespace entrofunc
