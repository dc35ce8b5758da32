#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "entrofunc/distribution.hpp"
#include "entrofunc/rng.hpp"
#include "entrofunc/types.hpp"

namespace entrofunc {

// n i.i.d. draws from the family; deterministic given the generator state.
Sample draw_sample(const DistributionSpec& spec, std::size_t n,
                   SplitMix64& rng);

enum class Target {
  q_value,       // the functional itself
  entropy,       // H at the configured order
  variability,   // v at order (1,1)
  bregman,       // order-s Bregman distance
  ks_residuals,  // entropy residuals, normality-check emphasis
  mse_curve,     // sweep of sample sizes (and bandwidth constants)
};

enum class EpsilonRule {
  fixed,     // epsilon given directly (0 in discrete mode)
  rate,   // rate-driven select_epsilon(alpha, c)
  scaled,    // epsilon = a / n with n the per-sample size
};

// Declarative description of one replication study.
struct ExperimentConfig {
  DistributionSpec dist_x = Gaussian1D{};
  std::optional<DistributionSpec> dist_y;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  FunctionalOrder order{2, 0};
  Mode mode = Mode::continuous;
  EpsilonRule epsilon_rule = EpsilonRule::fixed;
  double epsilon = 0.0;
  double alpha = 1.0;
  double c = 1.0;
  std::vector<double> a_values;     // scaled-rule sweep
  std::size_t n_sim = 1;
  std::uint64_t seed = 0;
  Target target = Target::entropy;
  int bregman_s = 2;
  bool bregman_symmetrized = false;
  std::vector<std::size_t> n_list;  // mse_curve sizes, n1 = n2 = n
  Target curve_estimand = Target::bregman;
  unsigned threads = 0;             // 0 = hardware concurrency
};

// Throws ConfigError naming every violated field.
void validate_config(const ExperimentConfig& config);

// Named study configurations example1..example4.
ExperimentConfig preset_config(const std::string& name);

struct Replication {
  double estimate = 0.0;  // target estimand
  double q_value = 0.0;   // underlying functional estimate (NaN for Bregman)
  double variance = 0.0;  // kappa_hat (NaN for Bregman)
  double residual = 0.0;
};

struct CellSummary {
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  double epsilon = 0.0;
  std::optional<double> a;  // scaled-rule constant, when applicable
  double truth = 0.0;
  std::vector<Replication> replications;
  double mean = 0.0;
  double sd = 0.0;
  double mse = 0.0;
  double ks_d = 0.0;  // NaN when residuals are not pivot-normalized
  double ks_p = 0.0;
};

struct ReplicationResult {
  std::vector<CellSummary> cells;
};

// Runs the study: one cell for scalar targets, a (a, n) sweep for
// mse_curve. Replication i of cell c draws fresh samples from a generator
// seeded with seed ^ (c << 32) ^ i, so results are reproducible and
// independent of the worker schedule. A replication that violates a sample
// size precondition aborts the whole run with the diagnostic attached.
ReplicationResult run_replications(const ExperimentConfig& config);

struct KsResult {
  double d = 0.0;
  double p = 1.0;
};

// One-sample Kolmogorov-Smirnov test against the standard normal;
// p-value from the asymptotic Kolmogorov series at lambda = sqrt(n) D.
KsResult ks_test(std::span<const double> values);

// Tail of the Kolmogorov distribution Q(lambda) = 2 sum (-1)^(k-1)
// exp(-2 k^2 lambda^2), evaluated through the dual theta form for small
// lambda where the alternating series converges slowly.
double kolmogorov_tail(double lambda);

// Mean of (estimate - truth)^2.
double empirical_mse(std::span<const double> estimates, double truth);

// Truth value the residuals and MSE are measured against (closed-form
// catalog value of the target estimand).
double target_truth(const ExperimentConfig& config, Target estimand);

}  // namespace entrofunc
