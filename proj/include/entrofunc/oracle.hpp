#pragma once

#include <cstddef>
#include <functional>

#include "entrofunc/distribution.hpp"
#include "entrofunc/types.hpp"

namespace entrofunc {

// Literal subset-enumeration form of the coincidence U-statistic: iterates
// every r1-subset of X and r2-subset of Y and averages the symmetrized
// kernel. Ground truth for q_from_counts; guarded to
// C(n1,r1) * C(n2,r2) <= 1e6 subset pairs (EnumerationGuardError above).
double brute_force_q(const Sample& x, const Sample* y, FunctionalOrder order,
                     double epsilon);

// Closed-form value of the functional integral/sum p_X^r1 p_Y^r2 for the
// supported catalog pairs; falls back to numeric_q when no closed form
// applies but the densities are numerically integrable. Throws
// UnsupportedPairError otherwise.
double true_q(const DistributionSpec& x, const DistributionSpec* y,
              FunctionalOrder order);

// Numeric evaluation of the functional: composite Simpson quadrature on a
// per-family truncation domain for continuous families (d <= 2), exact
// support enumeration for discrete families. intervals = 0 picks the
// default grid (error well under 1e-8 on the catalog cases).
double numeric_q(const DistributionSpec& x, const DistributionSpec* y,
                 FunctionalOrder order, std::size_t intervals = 0);

// Quadrature value of the epsilon-coincidence probability
//   E [ P(X' in B_eps(X))^(r1-1) P(Y in B_eps(X))^r2 ],
// i.e. the exact expectation of the raw statistic at finite epsilon.
// One-dimensional families with closed CDFs only (gaussian1d, exponential).
double numeric_q_epsilon(const DistributionSpec& x, const DistributionSpec* y,
                         FunctionalOrder order, double epsilon,
                         std::size_t intervals = 0);

// Composite Simpson rule on [lo, hi]; intervals is rounded up to even.
double simpson(const std::function<double(double)>& f, double lo, double hi,
               std::size_t intervals);

}  // namespace entrofunc
