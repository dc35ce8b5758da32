#pragma once

#include "entrofunc/types.hpp"

namespace entrofunc {

// Collapsed closed form of the generalized coincidence U-statistic.
//
// The literal definition averages a symmetrized indicator kernel over all
// C(n1,r1) * C(n2,r2) subset pairs. Because the kernel factorizes into
// per-point closeness events around the center X_i, the subset sum
// collapses to
//
//   Q = sum_i C(a_i, r1-1) C(b_i, r2) / (C(n1,r1) C(n2,r2) r1),
//
// which this function evaluates as products of falling-factorial ratios
// (never as big integers), keeping every factor in [0, 1]. Requires
// r1 >= 1 (callers swap samples for r1 = 0) and n1 >= r1, n2 >= r2.
QEstimate q_from_counts(const NeighborCounts& counts, FunctionalOrder order);

// Continuous-mode estimator of the density functional: the raw statistic
// over epsilon-coincidences divided by b_eps(d)^(r-1). y may be null when
// r2 = 0. Throws InsufficientSampleError when a sample is smaller than its
// exponent.
QEstimate estimate_q(const Sample& x, const Sample* y, FunctionalOrder order,
                     double epsilon);

// Discrete-mode estimator (exact coincidences, epsilon = 0); unbiased for
// the probability sum p_X^r1 p_Y^r2 and always in [0, 1].
QEstimate estimate_q_discrete(const Sample& x, const Sample* y,
                              FunctionalOrder order);

}  // namespace entrofunc
