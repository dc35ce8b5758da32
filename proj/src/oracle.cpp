#include "entrofunc/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace entrofunc {

namespace {

double dist2(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - b[k];
    s += diff * diff;
  }
  return s;
}

double binomial(std::size_t n, int k) {
  if (k < 0 || static_cast<std::size_t>(k) > n) return 0.0;
  double c = 1.0;
  for (int j = 0; j < k; ++j) {
    c *= static_cast<double>(n - j) / static_cast<double>(j + 1);
  }
  return c;
}

// Visits every k-subset of {0..n-1} in lexicographic order.
template <typename Visitor>
void for_each_subset(std::size_t n, int k, Visitor&& visit) {
  std::vector<std::size_t> idx(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) idx[static_cast<std::size_t>(j)] = j;
  while (true) {
    visit(std::span<const std::size_t>(idx));
    int pos = k - 1;
    while (pos >= 0 && idx[pos] == n - static_cast<std::size_t>(k - pos)) {
      --pos;
    }
    if (pos < 0) break;
    ++idx[pos];
    for (int j = pos + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

double brute_force_q(const Sample& x, const Sample* y, FunctionalOrder order,
                     double epsilon) {
  validate_order(order);
  if (order.r1 == 0) {
    if (y == nullptr || y->size() == 0) {
      throw std::invalid_argument("order (0, r2) needs a nonempty Y sample");
    }
    return brute_force_q(*y, &x, order.swapped(), epsilon);
  }
  if (order.r2 > 0 && (y == nullptr || y->size() == 0)) {
    throw std::invalid_argument("order with r2 > 0 needs a Y sample");
  }
  const std::size_t n1 = x.size();
  const std::size_t n2 = (order.r2 > 0 && y) ? y->size() : 0;
  if (n1 < static_cast<std::size_t>(order.r1) ||
      n2 < static_cast<std::size_t>(order.r2)) {
    throw InsufficientSampleError("sample smaller than the requested order");
  }

  const double pairs = binomial(n1, order.r1) * binomial(n2, order.r2);
  if (pairs > 1e6) {
    throw EnumerationGuardError(
        "subset enumeration would visit " + std::to_string(pairs) +
        " pairs (guard: 1e6)");
  }

  const double eps2 = epsilon * epsilon;
  // Count satisfied kernel indicators over all (S, T, center) triples.
  std::uint64_t hits = 0;
  for_each_subset(n1, order.r1, [&](std::span<const std::size_t> s) {
    for_each_subset(n2, order.r2, [&](std::span<const std::size_t> t) {
      for (std::size_t center : s) {
        const auto ci = x.point(center);
        bool all_close = true;
        for (std::size_t j : s) {
          if (dist2(ci, x.point(j)) > eps2) {
            all_close = false;
            break;
          }
        }
        if (all_close) {
          for (std::size_t k : t) {
            if (dist2(ci, y->point(k)) > eps2) {
              all_close = false;
              break;
            }
          }
        }
        if (all_close) ++hits;
      }
    });
  });
  return static_cast<double>(hits) /
         (pairs * static_cast<double>(order.r1));
}

double simpson(const std::function<double(double)>& f, double lo, double hi,
               std::size_t intervals) {
  if (!(hi > lo)) {
    throw std::invalid_argument("simpson needs hi > lo");
  }
  if (intervals < 2) intervals = 2;
  if (intervals % 2 != 0) ++intervals;
  const double h = (hi - lo) / static_cast<double>(intervals);
  double odd = 0.0;
  double even = 0.0;
  for (std::size_t i = 1; i < intervals; ++i) {
    const double v = f(lo + h * static_cast<double>(i));
    if (!std::isfinite(v)) {
      throw std::invalid_argument("integrand returned a non-finite value");
    }
    if (i % 2 == 1) {
      odd += v;
    } else {
      even += v;
    }
  }
  return h / 3.0 * (f(lo) + f(hi) + 4.0 * odd + 2.0 * even);
}

namespace {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Truncation domain holding all but < 1e-12 of each family's mass under
// every catalog order.
Interval domain1d(const DistributionSpec& spec) {
  if (const auto* g = std::get_if<Gaussian1D>(&spec)) {
    const double sd = std::sqrt(g->variance);
    return {g->mean - 12.0 * sd, g->mean + 12.0 * sd};
  }
  if (const auto* e = std::get_if<Exponential>(&spec)) {
    return {0.0, 40.0 / e->rate};
  }
  if (const auto* s = std::get_if<StudentR>(&spec)) {
    // Exact support: |x - mu| <= sqrt(C) with C = (m + 2) sigma.
    const double m =
        1.0 + 2.0 / (static_cast<double>(s->s) - 1.0);
    const double c = (m + 2.0) * s->covariance.at(0, 0);
    return {s->mean[0] - std::sqrt(c), s->mean[0] + std::sqrt(c)};
  }
  throw UnsupportedPairError("no quadrature domain for " + describe(spec));
}

Interval hull(Interval a, Interval b) {
  return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}

constexpr std::size_t kDefault1dIntervals = 1 << 14;
constexpr std::size_t kDefault2dIntervals = 1 << 11;

}  // namespace

double numeric_q(const DistributionSpec& x, const DistributionSpec* y,
                 FunctionalOrder order, std::size_t intervals) {
  validate_order(order);
  validate_distribution(x);
  if (y) validate_distribution(*y);
  if (order.r2 > 0 && y == nullptr) {
    throw std::invalid_argument("order with r2 > 0 needs a Y distribution");
  }

  const Mode mode = distribution_mode(x);
  if (y && distribution_mode(*y) != mode) {
    throw UnsupportedPairError("cannot mix discrete and continuous laws");
  }

  if (mode == Mode::discrete) {
    // Exact summation over the enumerated support.
    const std::size_t d = distribution_dim(x);
    if (y && distribution_dim(*y) != d) {
      throw std::invalid_argument("distribution dimensions disagree");
    }
    std::vector<double> point(d, 0.0);
    double lo = 0.0;
    double hi = 1.0;
    if (const auto* u = std::get_if<UniformDiscrete>(&x)) {
      lo = 1.0;
      hi = static_cast<double>(u->atoms);
      if (y) {
        if (const auto* uy = std::get_if<UniformDiscrete>(y)) {
          hi = std::max(hi, static_cast<double>(uy->atoms));
        } else {
          throw UnsupportedPairError(
              "discrete summation requires same-family pairs");
        }
      }
    } else if (std::holds_alternative<BernoulliProduct>(x)) {
      if (y && !std::holds_alternative<BernoulliProduct>(*y)) {
        throw UnsupportedPairError(
            "discrete summation requires same-family pairs");
      }
      if (d > 24) {
        throw UnsupportedPairError("support enumeration limited to d <= 24");
      }
    }

    double sum = 0.0;
    const auto account = [&](std::span<const double> p) {
      double v = 1.0;
      if (order.r1 > 0) v *= std::pow(density(x, p), order.r1);
      if (order.r2 > 0) v *= std::pow(density(*y, p), order.r2);
      sum += v;
    };
    if (std::holds_alternative<BernoulliProduct>(x)) {
      const std::size_t combos = std::size_t{1} << d;
      for (std::size_t bits = 0; bits < combos; ++bits) {
        for (std::size_t k = 0; k < d; ++k) {
          point[k] = (bits >> k) & 1 ? 1.0 : 0.0;
        }
        account(point);
      }
    } else {
      for (double v = lo; v <= hi; v += 1.0) {
        point[0] = v;
        account(point);
      }
    }
    return sum;
  }

  // Continuous: composite Simpson on the truncation hull.
  const std::size_t d = distribution_dim(x);
  if (y && distribution_dim(*y) != d) {
    throw std::invalid_argument("distribution dimensions disagree");
  }
  if (d > 2) {
    throw UnsupportedPairError("quadrature supports d <= 2 only");
  }

  if (d == 1) {
    std::optional<Interval> box;
    if (order.r1 > 0) box = domain1d(x);
    if (order.r2 > 0) {
      const Interval dy = domain1d(*y);
      box = box ? hull(*box, dy) : dy;
    }
    const std::size_t n = intervals == 0 ? kDefault1dIntervals : intervals;
    std::vector<double> point(1, 0.0);
    return simpson(
        [&](double t) {
          point[0] = t;
          double v = 1.0;
          if (order.r1 > 0) {
            v *= std::pow(density(x, point), order.r1);
          }
          if (order.r2 > 0) {
            v *= std::pow(density(*y, point), order.r2);
          }
          return v;
        },
        box->lo, box->hi, n);
  }

  // d == 2: tensor Simpson over a square hull; catalog 2-d families are
  // centered isotropic, so one interval per axis suffices.
  const auto axis_domain = [&](const DistributionSpec& spec) -> Interval {
    if (std::holds_alternative<GaussianIso>(spec)) return {-12.0, 12.0};
    if (const auto* s = std::get_if<StudentR>(&spec)) {
      const double m = 2.0 + 2.0 / (static_cast<double>(s->s) - 1.0);
      double radius = 0.0;
      for (std::size_t k = 0; k < 2; ++k) {
        radius = std::max(radius, std::sqrt((m + 2.0) * s->covariance.at(k, k)));
      }
      return {std::min(s->mean[0], s->mean[1]) - radius,
              std::max(s->mean[0], s->mean[1]) + radius};
    }
    throw UnsupportedPairError("no 2-d quadrature domain for " +
                               describe(spec));
  };

  std::optional<Interval> box;
  if (order.r1 > 0) box = axis_domain(x);
  if (order.r2 > 0) {
    const Interval dy = axis_domain(*y);
    box = box ? hull(*box, dy) : dy;
  }
  const std::size_t n = intervals == 0 ? kDefault2dIntervals : intervals;
  std::vector<double> point(2, 0.0);
  return simpson(
      [&](double u) {
        point[0] = u;
        return simpson(
            [&](double v) {
              point[1] = v;
              double val = 1.0;
              if (order.r1 > 0) {
                val *= std::pow(density(x, point), order.r1);
              }
              if (order.r2 > 0) {
                val *= std::pow(density(*y, point), order.r2);
              }
              return val;
            },
            box->lo, box->hi, n);
      },
      box->lo, box->hi, n);
}

double numeric_q_epsilon(const DistributionSpec& x, const DistributionSpec* y,
                         FunctionalOrder order, double epsilon,
                         std::size_t intervals) {
  validate_order(order);
  if (order.r1 == 0) {
    if (y == nullptr) {
      throw std::invalid_argument("order (0, r2) needs a Y distribution");
    }
    return numeric_q_epsilon(*y, &x, order.swapped(), epsilon, intervals);
  }
  if (order.r2 > 0 && y == nullptr) {
    throw std::invalid_argument("order with r2 > 0 needs a Y distribution");
  }
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("epsilon must be > 0");
  }
  if (distribution_dim(x) != 1 || (y && distribution_dim(*y) != 1)) {
    throw UnsupportedPairError(
        "epsilon-coincidence quadrature is one-dimensional");
  }

  Interval box = domain1d(x);
  const std::size_t n = intervals == 0 ? kDefault1dIntervals : intervals;
  std::vector<double> point(1, 0.0);
  return simpson(
      [&](double t) {
        point[0] = t;
        double v = density(x, point);
        if (order.r1 > 1) {
          v *= std::pow(cdf1d(x, t + epsilon) - cdf1d(x, t - epsilon),
                        order.r1 - 1);
        }
        if (order.r2 > 0) {
          v *= std::pow(cdf1d(*y, t + epsilon) - cdf1d(*y, t - epsilon),
                        order.r2);
        }
        return v;
      },
      box.lo, box.hi, n);
}

namespace {

// Closed-form catalog. Each formula is the direct evaluation of the
// product integral/sum; numeric_q cross-checks every supported pair in the
// test suite.
std::optional<double> closed_form_q(const DistributionSpec& x,
                                    const DistributionSpec* y,
                                    FunctionalOrder order) {
  const int r1 = order.r1;
  const int r2 = order.r2;
  const int r = r1 + r2;
  if (r1 == 0) return std::nullopt;  // callers swap first

  if (const auto* gx = std::get_if<Gaussian1D>(&x)) {
    const Gaussian1D* gy = nullptr;
    if (r2 > 0) {
      gy = std::get_if<Gaussian1D>(y);
      if (gy == nullptr) return std::nullopt;
    }
    // Product of Gaussian powers is an unnormalized Gaussian: complete the
    // square in the exponent and integrate.
    const double mu1 = gx->mean;
    const double s1 = gx->variance;
    const double mu2 = gy ? gy->mean : 0.0;
    const double s2 = gy ? gy->variance : 1.0;
    const double a = r1 / s1 + r2 / s2;
    const double b = r1 * mu1 / s1 + r2 * mu2 / s2;
    const double c = r1 * mu1 * mu1 / s1 + r2 * mu2 * mu2 / s2;
    const double two_pi = 2.0 * std::numbers::pi;
    return std::pow(two_pi * s1, -0.5 * r1) * std::pow(two_pi * s2, -0.5 * r2) *
           std::sqrt(two_pi / a) * std::exp(-0.5 * (c - b * b / a));
  }

  if (const auto* gx = std::get_if<GaussianIso>(&x)) {
    if (r2 > 0) {
      const auto* gy = std::get_if<GaussianIso>(y);
      if (gy == nullptr || gy->dim != gx->dim) return std::nullopt;
    }
    // All factors share the standard law, so the integrand is N(0,I)^r.
    const double two_pi = 2.0 * std::numbers::pi;
    return std::pow(std::pow(two_pi, r - 1) * static_cast<double>(r),
                    -0.5 * static_cast<double>(gx->dim));
  }

  if (const auto* ex = std::get_if<Exponential>(&x)) {
    const Exponential* ey = nullptr;
    if (r2 > 0) {
      ey = std::get_if<Exponential>(y);
      if (ey == nullptr) return std::nullopt;
    }
    const double b1 = ex->rate;
    const double b2 = ey ? ey->rate : 1.0;
    return std::pow(b1, r1) * std::pow(b2, r2) / (r1 * b1 + r2 * b2);
  }

  if (const auto* bx = std::get_if<BernoulliProduct>(&x)) {
    const BernoulliProduct* by = nullptr;
    if (r2 > 0) {
      by = std::get_if<BernoulliProduct>(y);
      if (by == nullptr || by->dim != bx->dim) return std::nullopt;
    }
    const double p1 = bx->p;
    const double p2 = by ? by->p : 0.5;
    const double per_axis = std::pow(p1, r1) * std::pow(p2, r2) +
                            std::pow(1.0 - p1, r1) * std::pow(1.0 - p2, r2);
    return std::pow(per_axis, static_cast<double>(bx->dim));
  }

  if (const auto* ux = std::get_if<UniformDiscrete>(&x)) {
    std::int64_t m1 = ux->atoms;
    std::int64_t m2 = m1;
    if (r2 > 0) {
      const auto* uy = std::get_if<UniformDiscrete>(y);
      if (uy == nullptr) return std::nullopt;
      m2 = uy->atoms;
    }
    const double overlap = static_cast<double>(std::min(m1, m2));
    return overlap * std::pow(static_cast<double>(m1), -r1) *
           std::pow(static_cast<double>(m2), -r2);
  }

  return std::nullopt;
}

}  // namespace

double true_q(const DistributionSpec& x, const DistributionSpec* y,
              FunctionalOrder order) {
  validate_order(order);
  validate_distribution(x);
  if (y) validate_distribution(*y);
  if (order.r2 > 0 && y == nullptr) {
    throw std::invalid_argument("order with r2 > 0 needs a Y distribution");
  }
  if (order.r1 == 0) {
    return true_q(*y, &x, order.swapped());
  }
  if (y && distribution_mode(*y) != distribution_mode(x)) {
    throw UnsupportedPairError("cannot mix discrete and continuous laws");
  }

  if (auto closed = closed_form_q(x, y, order)) {
    return *closed;
  }
  return numeric_q(x, y, order);
}

}  // namespace entrofunc
