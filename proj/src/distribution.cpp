#include "entrofunc/distribution.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "entrofunc/inference.hpp"
#include "entrofunc/normal.hpp"

namespace entrofunc {

namespace {

template <class... Ts>
struct Overload : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overload(Ts...) -> Overload<Ts...>;

}  // namespace

Mode distribution_mode(const DistributionSpec& spec) {
  return std::visit(
      Overload{
          [](const BernoulliProduct&) { return Mode::discrete; },
          [](const UniformDiscrete&) { return Mode::discrete; },
          [](const auto&) { return Mode::continuous; },
      },
      spec);
}

std::size_t distribution_dim(const DistributionSpec& spec) {
  return std::visit(
      Overload{
          [](const Gaussian1D&) -> std::size_t { return 1; },
          [](const GaussianIso& g) { return g.dim; },
          [](const Exponential&) -> std::size_t { return 1; },
          [](const BernoulliProduct& b) { return b.dim; },
          [](const UniformDiscrete&) -> std::size_t { return 1; },
          [](const StudentR& s) { return s.mean.size(); },
      },
      spec);
}

void validate_distribution(const DistributionSpec& spec) {
  std::visit(
      Overload{
          [](const Gaussian1D& g) {
            if (!(g.variance > 0.0)) {
              throw std::invalid_argument("gaussian1d needs sigma2 > 0");
            }
          },
          [](const GaussianIso& g) {
            if (g.dim == 0) {
              throw std::invalid_argument("gaussianIso needs d >= 1");
            }
          },
          [](const Exponential& e) {
            if (!(e.rate > 0.0)) {
              throw std::invalid_argument("exponential needs beta > 0");
            }
          },
          [](const BernoulliProduct& b) {
            if (b.dim == 0 || !(b.p > 0.0) || !(b.p < 1.0)) {
              throw std::invalid_argument(
                  "bernoulliProduct needs d >= 1 and p in (0, 1)");
            }
          },
          [](const UniformDiscrete& u) {
            if (u.atoms < 1) {
              throw std::invalid_argument("uniformDiscrete needs m >= 1");
            }
          },
          [](const StudentR& s) {
            if (s.s < 2) {
              throw std::invalid_argument("studentR needs s >= 2");
            }
            if (s.mean.empty() || s.covariance.n != s.mean.size()) {
              throw std::invalid_argument(
                  "studentR covariance must match the mean dimension");
            }
          },
      },
      spec);
}

double density(const DistributionSpec& spec, std::span<const double> x) {
  if (x.size() != distribution_dim(spec)) {
    throw std::invalid_argument("density point has the wrong dimension");
  }
  return std::visit(
      Overload{
          [&](const Gaussian1D& g) {
            const double z = (x[0] - g.mean);
            return std::exp(-0.5 * z * z / g.variance) /
                   std::sqrt(2.0 * std::numbers::pi * g.variance);
          },
          [&](const GaussianIso& g) {
            double s2 = 0.0;
            for (double v : x) s2 += v * v;
            return std::exp(-0.5 * s2) /
                   std::pow(2.0 * std::numbers::pi,
                            0.5 * static_cast<double>(g.dim));
          },
          [&](const Exponential& e) {
            return x[0] < 0.0 ? 0.0 : e.rate * std::exp(-e.rate * x[0]);
          },
          [&](const BernoulliProduct& b) {
            double mass = 1.0;
            for (double v : x) {
              if (v == 1.0) {
                mass *= b.p;
              } else if (v == 0.0) {
                mass *= 1.0 - b.p;
              } else {
                return 0.0;
              }
            }
            return mass;
          },
          [&](const UniformDiscrete& u) {
            const double m = static_cast<double>(u.atoms);
            return (x[0] >= 1.0 && x[0] <= m && x[0] == std::floor(x[0]))
                       ? 1.0 / m
                       : 0.0;
          },
          [&](const StudentR& s) {
            return student_r_density(x, s.mean, s.covariance, s.s);
          },
      },
      spec);
}

double cdf1d(const DistributionSpec& spec, double x) {
  return std::visit(
      Overload{
          [&](const Gaussian1D& g) {
            return normal_cdf((x - g.mean) / std::sqrt(g.variance));
          },
          [&](const Exponential& e) {
            return x < 0.0 ? 0.0 : 1.0 - std::exp(-e.rate * x);
          },
          [&](const auto&) -> double {
            throw UnsupportedPairError(
                "closed CDF available for gaussian1d and exponential only");
          },
      },
      spec);
}

std::string describe(const DistributionSpec& spec) {
  std::ostringstream out;
  std::visit(
      Overload{
          [&](const Gaussian1D& g) {
            out << "gaussian1d(mu=" << g.mean << ",sigma2=" << g.variance
                << ")";
          },
          [&](const GaussianIso& g) { out << "gaussianIso(d=" << g.dim << ")"; },
          [&](const Exponential& e) { out << "exponential(beta=" << e.rate << ")"; },
          [&](const BernoulliProduct& b) {
            out << "bernoulliProduct(d=" << b.dim << ",p=" << b.p << ")";
          },
          [&](const UniformDiscrete& u) {
            out << "uniformDiscrete(m=" << u.atoms << ")";
          },
          [&](const StudentR& s) {
            out << "studentR(d=" << s.mean.size() << ",s=" << s.s << ")";
          },
      },
      spec);
  return out.str();
}

}  // namespace entrofunc
