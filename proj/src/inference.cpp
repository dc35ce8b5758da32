#include "entrofunc/inference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "entrofunc/ball.hpp"
#include "entrofunc/neighbor.hpp"
#include "entrofunc/normal.hpp"
#include "entrofunc/ustat.hpp"

namespace entrofunc {

namespace {

void check_inflated_sizes(std::size_t n1, std::size_t n2,
                          FunctionalOrder order) {
  const std::size_t need_x = static_cast<std::size_t>(
      std::max(2 * order.r1 - 1, order.r1));
  const std::size_t need_y = static_cast<std::size_t>(2 * order.r2);
  if (n1 < need_x || n2 < need_y) {
    throw InsufficientSampleError(
        "variance plug-ins of inflated order (" +
        std::to_string(2 * order.r1 - 1) + "," + std::to_string(2 * order.r2) +
        ") need n1 >= " + std::to_string(need_x) +
        ", n2 >= " + std::to_string(need_y));
  }
}

// K from the three plug-in estimates; `normalizer` is b_eps(d) in
// continuous mode and 1 in discrete mode (raw coincidence statistics).
VarianceEstimate variance_from_counts(const NeighborCounts& counts,
                                      FunctionalOrder order,
                                      double normalizer) {
  check_inflated_sizes(counts.n1, counts.n2, order);

  const double n = static_cast<double>(counts.n1 + counts.n2);
  const double p_hat =
      counts.n2 == 0 ? 1.0 : static_cast<double>(counts.n1) / n;

  const auto normalized = [&](FunctionalOrder o) {
    QEstimate q = q_from_counts(counts, o);
    const int power = o.total() - 1;
    if (normalizer != 1.0 && power > 0) {
      q.value /= std::pow(normalizer, power);
      q.normalized = true;
    }
    return q;
  };

  const QEstimate q_main = normalized(order);
  const QEstimate q_first =
      normalized(FunctionalOrder{2 * order.r1 - 1, 2 * order.r2});

  VarianceEstimate est;
  est.p_hat = p_hat;
  est.plug_first = q_first;
  const double q2 = q_main.value * q_main.value;
  double k = static_cast<double>(order.r1) * order.r1 / p_hat *
             (q_first.value - q2);
  if (order.r2 > 0) {
    const QEstimate q_second =
        normalized(FunctionalOrder{2 * order.r1, 2 * order.r2 - 1});
    est.plug_second = q_second;
    k += static_cast<double>(order.r2) * order.r2 / (1.0 - p_hat) *
         (q_second.value - q2);
  }
  est.raw_k = k;
  est.kappa_hat = std::max(k, 1.0 / n);
  est.truncated = est.kappa_hat != k;
  return est;
}

NeighborCounts counts_for(const Sample& x, const Sample* y,
                          FunctionalOrder order, double epsilon) {
  const Sample* other = order.r2 > 0 ? y : nullptr;
  if (x.mode() == Mode::discrete) {
    return exact_match_counts(x, other);
  }
  return neighbor_counts(x, other, epsilon);
}

}  // namespace

VarianceEstimate variance_estimate(const Sample& x, const Sample* y,
                                   FunctionalOrder order, double epsilon) {
  validate_order(order);
  if (order.r1 == 0) {
    if (y == nullptr || y->size() == 0) {
      throw std::invalid_argument("order (0, r2) needs a nonempty Y sample");
    }
    return variance_estimate(*y, &x, order.swapped(), epsilon);
  }
  if (order.r2 > 0 && (y == nullptr || y->size() == 0)) {
    throw std::invalid_argument("order with r2 > 0 needs a Y sample");
  }

  const NeighborCounts counts = counts_for(x, y, order, epsilon);
  const double normalizer =
      x.mode() == Mode::discrete ? 1.0 : ball_volume(x.dim(), epsilon);
  return variance_from_counts(counts, order, normalizer);
}

EntropyEstimate entropy_estimate(const QEstimate& q, std::size_t n) {
  const int r = q.order.total();
  if (r == 1) {
    throw std::invalid_argument("entropy undefined for order r = 1");
  }
  if (n == 0) {
    throw std::invalid_argument("entropy_estimate needs n >= 1");
  }
  EntropyEstimate h;
  h.q = q;
  h.r = r;
  const double floor_value = 1.0 / static_cast<double>(n);
  const double clipped = std::max(q.value, floor_value);
  h.truncated = q.value < floor_value;
  h.h_hat = std::log(clipped) / (1.0 - static_cast<double>(r));
  return h;
}

ConfidenceInterval confidence_interval(const EntropyEstimate& h,
                                       const VarianceEstimate& k,
                                       std::size_t n, double level) {
  if (!(level > 0.0) || !(level < 1.0)) {
    throw std::invalid_argument("confidence level must lie in (0, 1)");
  }
  if (!(h.q.value > 0.0)) {
    throw std::invalid_argument(
        "confidence interval undefined for a zero point estimate");
  }
  const double z = normal_quantile(0.5 * (1.0 + level));
  const double half =
      z * std::sqrt(k.kappa_hat) /
      (std::sqrt(static_cast<double>(n)) * std::abs(1.0 - h.r) * h.q.value);
  ConfidenceInterval ci;
  ci.center = h.h_hat;
  ci.lower = h.h_hat - half;
  ci.upper = h.h_hat + half;
  ci.level = level;
  ci.pivot = h.q.normalized ? Pivot::continuous_ball : Pivot::discrete_exact;
  return ci;
}

double normalized_residual(double h_hat, double h_true, double kappa_hat,
                           double q_value, std::size_t n, int r) {
  return std::sqrt(static_cast<double>(n)) * std::abs(1.0 - r) * q_value *
         (h_hat - h_true) / std::sqrt(kappa_hat);
}

double select_epsilon(std::size_t n, std::size_t d, int r, double alpha,
                      double c) {
  if (n < 2 || d == 0) {
    throw std::invalid_argument("select_epsilon needs n >= 2 and d >= 1");
  }
  if (r < 2 || !(alpha > 0.0) || !(c > 0.0)) {
    throw std::invalid_argument(
        "select_epsilon needs r >= 2, alpha > 0 and c > 0");
  }
  const double nd = static_cast<double>(n);
  const double dd = static_cast<double>(d);
  if (alpha <= dd / 2.0) {
    const double exponent =
        alpha / (2.0 * alpha + dd * (1.0 - 1.0 / static_cast<double>(r)));
    return c * std::pow(nd, -exponent);
  }
  // CLT regime: eps ~ L(n) n^(-1/d) with L(n) = (log n)^(1/d), so that
  // n eps^d = c^d log n grows without bound.
  return c * std::pow(std::log(nd) / nd, 1.0 / dd);
}

EntropyEstimate variability_estimate(const Sample& x, const Sample& y,
                                     double epsilon) {
  const FunctionalOrder order{1, 1};
  const QEstimate q = x.mode() == Mode::discrete
                          ? estimate_q_discrete(x, &y, order)
                          : estimate_q(x, &y, order, epsilon);
  return entropy_estimate(q, x.size() + y.size());
}

EntropyEstimate renyi_entropy_estimate(const Sample& x, int s,
                                       double epsilon) {
  if (s < 2) {
    throw std::invalid_argument("Renyi order must be an integer >= 2");
  }
  const FunctionalOrder order{s, 0};
  const QEstimate q = x.mode() == Mode::discrete
                          ? estimate_q_discrete(x, nullptr, order)
                          : estimate_q(x, nullptr, order, epsilon);
  return entropy_estimate(q, x.size());
}

double bregman_combine(double q_s0, double q_0s, double q_1s, double q_s1,
                       int s, bool symmetrized) {
  if (s < 2) {
    throw std::invalid_argument("Bregman order must be an integer >= 2");
  }
  const double sm1 = static_cast<double>(s - 1);
  const double forward = q_0s + q_s0 / sm1 - s * q_1s / sm1;
  if (!symmetrized) return forward;
  const double backward = q_s0 + q_0s / sm1 - s * q_s1 / sm1;
  return (forward + backward) / static_cast<double>(s);
}

double bregman_estimate(const Sample& x, const Sample& y, int s,
                        double epsilon, bool symmetrized) {
  if (s < 2) {
    throw std::invalid_argument("Bregman order must be an integer >= 2");
  }
  const auto plug = [&](FunctionalOrder order) {
    return x.mode() == Mode::discrete
               ? estimate_q_discrete(x, &y, order).value
               : estimate_q(x, &y, order, epsilon).value;
  };
  const double q_s0 = plug({s, 0});
  const double q_0s = plug({0, s});
  const double q_1s = plug({1, s - 1});
  const double q_s1 = symmetrized && s > 2 ? plug({s - 1, 1}) : q_1s;
  return bregman_combine(q_s0, q_0s, q_1s, q_s1, s, symmetrized);
}

double join_size_estimate(double m1, double m2, double epsilon, std::size_t d,
                          double v_hat) {
  if (!(m1 > 0.0) || !(m2 > 0.0) || !(epsilon > 0.0)) {
    throw std::invalid_argument("join size needs positive m1, m2, epsilon");
  }
  return m1 * m2 * std::pow(epsilon, static_cast<double>(d)) *
         unit_ball_volume(d) * std::exp(-v_hat);
}

namespace {

// In-place Cholesky of a small SPD matrix; throws when a pivot fails.
SquareMatrix cholesky(const SquareMatrix& m) {
  SquareMatrix l(m.n);
  for (std::size_t i = 0; i < m.n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = m.at(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l.at(i, k) * l.at(j, k);
      if (i == j) {
        if (!(s > 0.0)) {
          throw std::invalid_argument("covariance must be positive definite");
        }
        l.at(i, i) = std::sqrt(s);
      } else {
        l.at(i, j) = s / l.at(j, j);
      }
    }
  }
  return l;
}

}  // namespace

double student_r_density(std::span<const double> x, std::span<const double> mu,
                         const SquareMatrix& sigma, int s) {
  if (s < 2) {
    throw std::invalid_argument("Student-r order must be an integer >= 2");
  }
  const std::size_t d = mu.size();
  if (d == 0 || x.size() != d || sigma.n != d) {
    throw std::invalid_argument("Student-r dimensions disagree");
  }

  const double dd = static_cast<double>(d);
  const double m = dd + 2.0 / (static_cast<double>(s) - 1.0);
  SquareMatrix c_s(d);
  for (std::size_t i = 0; i < d * d; ++i) c_s.a[i] = (m + 2.0) * sigma.a[i];

  const SquareMatrix l = cholesky(c_s);

  // Quadratic form via forward substitution: solve L w = (x - mu), then
  // (x-mu)^T C^{-1} (x-mu) = |w|^2; det C = prod diag(L)^2.
  double quad = 0.0;
  double log_det = 0.0;
  std::vector<double> w(d);
  for (std::size_t i = 0; i < d; ++i) {
    double s_i = x[i] - mu[i];
    for (std::size_t k = 0; k < i; ++k) s_i -= l.at(i, k) * w[k];
    w[i] = s_i / l.at(i, i);
    quad += w[i] * w[i];
    log_det += 2.0 * std::log(l.at(i, i));
  }

  if (quad > 1.0) return 0.0;

  const double log_a =
      std::lgamma(0.5 * m + 1.0) - std::lgamma(0.5 * (m - dd) + 1.0) -
      0.5 * (dd * std::log(std::numbers::pi) + log_det);
  return std::exp(log_a) *
         std::pow(1.0 - quad, 1.0 / (static_cast<double>(s) - 1.0));
}

EstimateReport estimate_report(const Sample& x, const Sample* y,
                               FunctionalOrder order, double epsilon,
                               std::optional<double> ci_level,
                               bool require_variance) {
  validate_order(order);
  if (order.r1 == 0) {
    if (y == nullptr || y->size() == 0) {
      throw std::invalid_argument("order (0, r2) needs a nonempty Y sample");
    }
    EstimateReport report =
        estimate_report(*y, &x, order.swapped(), epsilon, ci_level,
                        require_variance);
    report.q.order = order;
    report.q_raw.order = order;
    return report;
  }
  if (order.r2 > 0 && (y == nullptr || y->size() == 0)) {
    throw std::invalid_argument("order with r2 > 0 needs a Y sample");
  }
  if (y && y->dim() != x.dim()) {
    throw std::invalid_argument("sample dimensions disagree");
  }
  const bool discrete = x.mode() == Mode::discrete;
  if (!discrete && !(epsilon > 0.0)) {
    throw std::invalid_argument("continuous estimation requires epsilon > 0");
  }

  EstimateReport report;
  report.n1 = x.size();
  report.n2 = (order.r2 > 0 && y) ? y->size() : 0;
  const std::size_t n = report.n1 + report.n2;

  const NeighborCounts counts = counts_for(x, y, order, epsilon);
  report.q_raw = q_from_counts(counts, order);
  report.q = report.q_raw;
  if (!discrete) {
    const int power = order.total() - 1;
    if (power > 0) {
      report.q.value /= std::pow(ball_volume(x.dim(), epsilon), power);
    }
    report.q.normalized = true;
  }

  const double normalizer =
      discrete ? 1.0 : ball_volume(x.dim(), epsilon);
  try {
    report.variance = variance_from_counts(counts, order, normalizer);
  } catch (const InsufficientSampleError&) {
    if (require_variance) throw;
  }

  if (order.total() >= 2) {
    report.entropy = entropy_estimate(report.q, n);
    if (ci_level && report.variance && report.q.value > 0.0) {
      report.ci =
          confidence_interval(*report.entropy, *report.variance, n, *ci_level);
    }
  }
  return report;
}

}  // namespace entrofunc
