#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "entrofunc/types.hpp"

namespace entrofunc {

// Which asymptotic pivot backs an interval: exact coincidences (discrete
// samples, eps = 0) or normalized epsilon-ball coincidences.
enum class Pivot { discrete_exact, continuous_ball };

// Plug-in estimate of the asymptotic variance kappa:
//   K = r1^2 (Q_{2r1-1,2r2} - Q^2) / p  +  r2^2 (Q_{2r1,2r2-1} - Q^2) / (1-p)
// with p = n1/n, a term dropped exactly when its r_i = 0, and the
// truncation kappa_hat = max(K, 1/n).
struct VarianceEstimate {
  double kappa_hat = 0.0;
  double raw_k = 0.0;
  QEstimate plug_first;                  // order (2 r1 - 1, 2 r2)
  std::optional<QEstimate> plug_second;  // order (2 r1, 2 r2 - 1)
  double p_hat = 1.0;
  bool truncated = false;
};

// H = log(max(Q, 1/n)) / (1 - r); finite for every input, truncated flag
// set when the max() clipped.
struct EntropyEstimate {
  double h_hat = 0.0;
  QEstimate q;
  int r = 0;
  bool truncated = false;
};

struct ConfidenceInterval {
  double center = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.0;
  Pivot pivot = Pivot::continuous_ball;
};

// Everything the estimators produce for one (X, Y, order, epsilon) input;
// one neighbor-count pass feeds the point estimate and all variance
// plug-ins.
struct EstimateReport {
  QEstimate q;      // normalized in continuous mode, raw in discrete mode
  QEstimate q_raw;  // the [0,1] coincidence statistic
  std::optional<VarianceEstimate> variance;
  std::optional<EntropyEstimate> entropy;  // absent when r = 1
  std::optional<ConfidenceInterval> ci;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
};

VarianceEstimate variance_estimate(const Sample& x, const Sample* y,
                                   FunctionalOrder order, double epsilon);

EntropyEstimate entropy_estimate(const QEstimate& q, std::size_t n);

// H +/- z_{(1+level)/2} sqrt(kappa_hat) / (sqrt(n) |1-r| Q); requires a
// strictly positive point estimate.
ConfidenceInterval confidence_interval(const EntropyEstimate& h,
                                       const VarianceEstimate& k,
                                       std::size_t n, double level);

// Pivot value sqrt(n) |1-r| Q (H - h) / sqrt(kappa_hat); asymptotically
// standard normal when the estimator's CLT conditions hold.
double normalized_residual(double h_hat, double h_true, double kappa_hat,
                           double q_value, std::size_t n, int r);

// Rate-driven bandwidth: c n^(-alpha/(2 alpha + d(1-1/r))) in the
// bias-dominated regime alpha <= d/2, and c (log n / n)^(1/d) above it
// (slowly varying factor fixed to (log n)^(1/d)).
double select_epsilon(std::size_t n, std::size_t d, int r, double alpha,
                      double c);

// v = -log max(Q, 1/n) for order (1,1); mode follows the samples.
EntropyEstimate variability_estimate(const Sample& x, const Sample& y,
                                     double epsilon);

// Order (s, 0) entropy, s >= 2.
EntropyEstimate renyi_entropy_estimate(const Sample& x, int s,
                                       double epsilon);

// Combines the four functional plug-ins into the order-s Bregman distance
//   B_s = q_{0,s} + q_{s,0}/(s-1) - s q_{1,s-1}/(s-1)
// or its symmetrized version (B_s(p,q) + B_s(q,p)) / s. Exposed separately
// so the combination's swap symmetry can be checked on raw values.
double bregman_combine(double q_s0, double q_0s, double q_1s, double q_s1,
                       int s, bool symmetrized);

// Plug-in Bregman distance estimate between the laws of x and y; finite-
// sample negativity is reported as-is, never clipped.
double bregman_estimate(const Sample& x, const Sample& y, int s,
                        double epsilon, bool symmetrized = false);

// Predicted average epsilon-join size between tables of m1 and m2 records:
// m1 m2 eps^d b_1(d) exp(-v).
double join_size_estimate(double m1, double m2, double epsilon, std::size_t d,
                          double v_hat);

// Density of the compactly supported maximum-entropy (Student-r) law with
// mean mu and covariance sigma:
//   A_s (1 - (x-mu)^T C_s^{-1} (x-mu))^(1/(s-1)) on the ellipsoid, 0 off it,
// where m = d + 2/(s-1), C_s = (m+2) sigma, and
// A_s = Gamma(m/2+1) / (|pi C_s|^(1/2) Gamma((m-d)/2+1)).
double student_r_density(std::span<const double> x, std::span<const double> mu,
                         const SquareMatrix& sigma, int s);

// Full estimation pass; ci_level empty skips the interval, as does a zero
// point estimate. Variance plug-ins are skipped (left empty) when the
// samples are too small for the inflated orders and require_variance is
// false.
EstimateReport estimate_report(const Sample& x, const Sample* y,
                               FunctionalOrder order, double epsilon,
                               std::optional<double> ci_level,
                               bool require_variance = true);

}  // namespace entrofunc
