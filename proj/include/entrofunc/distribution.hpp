#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "entrofunc/types.hpp"

namespace entrofunc {

struct Gaussian1D {
  double mean = 0.0;
  double variance = 1.0;
};

// d independent N(0,1) components.
struct GaussianIso {
  std::size_t dim = 1;
};

struct Exponential {
  double rate = 1.0;
};

// d independent Bernoulli(p) components on {0,1}^d.
struct BernoulliProduct {
  std::size_t dim = 1;
  double p = 0.5;
};

// Uniform on the atoms {1, ..., m}.
struct UniformDiscrete {
  std::int64_t atoms = 1;
};

// Compactly supported maximum-entropy (Student-r type) density with the
// given mean and covariance; see student_r_density.
struct StudentR {
  std::vector<double> mean;
  SquareMatrix covariance;
  int s = 2;
};

using DistributionSpec = std::variant<Gaussian1D, GaussianIso, Exponential,
                                      BernoulliProduct, UniformDiscrete,
                                      StudentR>;

Mode distribution_mode(const DistributionSpec& spec);
std::size_t distribution_dim(const DistributionSpec& spec);

// Throws std::invalid_argument when a parameter is out of range.
void validate_distribution(const DistributionSpec& spec);

// Density (continuous families) or probability mass (discrete families)
// at x; x.size() must equal the family dimension.
double density(const DistributionSpec& spec, std::span<const double> x);

// One-dimensional CDF; supported for gaussian1d and exponential.
double cdf1d(const DistributionSpec& spec, double x);

// Compact one-line description, e.g. "gaussian1d(mu=0,sigma2=1.5)".
std::string describe(const DistributionSpec& spec);

// Parses the compact description format accepted by the CLI, e.g.
// "bernoulliProduct:d=3,p=0.8". Throws ConfigError on unknown families or
// keys.
DistributionSpec parse_distribution(const std::string& text);

}  // namespace entrofunc
