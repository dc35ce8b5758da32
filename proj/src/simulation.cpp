#include "entrofunc/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "entrofunc/inference.hpp"
#include "entrofunc/normal.hpp"
#include "entrofunc/oracle.hpp"

namespace entrofunc {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

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

void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& body) {
  if (threads == 0) threads = std::thread::hardware_concurrency();
  if (threads == 0) threads = 1;
  threads = static_cast<unsigned>(
      std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));

  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }

  std::atomic<std::size_t> cursor{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  const auto worker = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      const std::size_t i = cursor.fetch_add(1, std::memory_order_relaxed);
      if (i >= count) break;
      try {
        body(i);
      } catch (...) {
        std::scoped_lock lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
      }
    }
  };

  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

Sample draw_sample(const DistributionSpec& spec, std::size_t n,
                   SplitMix64& rng) {
  validate_distribution(spec);
  const std::size_t d = distribution_dim(spec);
  std::vector<double> data;
  data.reserve(n * d);

  if (const auto* g = std::get_if<Gaussian1D>(&spec)) {
    const double sd = std::sqrt(g->variance);
    for (std::size_t i = 0; i < n; ++i) data.push_back(g->mean + sd * rng.normal());
    return Sample(std::move(data), 1, Mode::continuous);
  }
  if (std::holds_alternative<GaussianIso>(spec)) {
    for (std::size_t i = 0; i < n * d; ++i) data.push_back(rng.normal());
    return Sample(std::move(data), d, Mode::continuous);
  }
  if (const auto* e = std::get_if<Exponential>(&spec)) {
    for (std::size_t i = 0; i < n; ++i) data.push_back(rng.exponential(e->rate));
    return Sample(std::move(data), 1, Mode::continuous);
  }
  if (const auto* b = std::get_if<BernoulliProduct>(&spec)) {
    for (std::size_t i = 0; i < n * d; ++i) {
      data.push_back(static_cast<double>(rng.bernoulli(b->p)));
    }
    return Sample(std::move(data), d, Mode::discrete);
  }
  if (const auto* u = std::get_if<UniformDiscrete>(&spec)) {
    const double m = static_cast<double>(u->atoms);
    for (std::size_t i = 0; i < n; ++i) {
      data.push_back(std::floor(rng.uniform01() * m) + 1.0);
    }
    return Sample(std::move(data), 1, Mode::discrete);
  }
  const auto& s = std::get<StudentR>(spec);
  if (d != 1) {
    throw std::invalid_argument(
        "studentR sampling is implemented in one dimension only");
  }
  // Accept-reject from the uniform box over the compact support, with the
  // density peak at the mean as the envelope height.
  const double m = 1.0 + 2.0 / (static_cast<double>(s.s) - 1.0);
  const double radius = std::sqrt((m + 2.0) * s.covariance.at(0, 0));
  const double peak = student_r_density(s.mean, s.mean, s.covariance, s.s);
  std::vector<double> candidate(1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    while (true) {
      candidate[0] = s.mean[0] + radius * (2.0 * rng.uniform01() - 1.0);
      const double u = peak * rng.uniform01();
      if (u <= student_r_density(candidate, s.mean, s.covariance, s.s)) {
        data.push_back(candidate[0]);
        break;
      }
    }
  }
  return Sample(std::move(data), 1, Mode::continuous);
}

double kolmogorov_tail(double lambda) {
  if (!(lambda > 0.0)) return 1.0;
  if (lambda < 1.18) {
    // Dual theta form; the direct alternating series converges too slowly
    // here. Terms are t^((2k-1)^2) with t = exp(-pi^2 / (8 lambda^2)).
    const double t =
        std::exp(-std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda));
    if (t == 0.0) return 1.0;
    const double sum = t * (1.0 + std::pow(t, 8) * (1.0 + std::pow(t, 16) *
                                                              (1.0 + std::pow(t, 24))));
    const double p =
        1.0 - std::sqrt(2.0 * std::numbers::pi) / lambda * sum;
    return std::clamp(p, 0.0, 1.0);
  }
  // Direct series 2 sum (-1)^(k-1) exp(-2 k^2 lambda^2).
  const double t = std::exp(-2.0 * lambda * lambda);
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::pow(t, k * k);
    if (term < 1e-300) break;
    sum += sign * term;
    sign = -sign;
    if (term < 1e-16 * std::abs(sum)) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_test(std::span<const double> values) {
  if (values.empty()) {
    throw std::invalid_argument("ks_test needs at least one value");
  }
  std::vector<double> sorted(values.begin(), values.end());
  for (double v : sorted) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("ks_test values must be finite");
    }
  }
  std::sort(sorted.begin(), sorted.end());

  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double cdf = normal_cdf(sorted[i]);
    const double upper = (static_cast<double>(i) + 1.0) / n - cdf;
    const double lower = cdf - static_cast<double>(i) / n;
    d = std::max({d, upper, lower});
  }
  KsResult result;
  result.d = d;
  result.p = kolmogorov_tail(std::sqrt(n) * d);
  return result;
}

double empirical_mse(std::span<const double> estimates, double truth) {
  if (estimates.empty()) {
    throw std::invalid_argument("empirical_mse needs at least one estimate");
  }
  KahanSum acc;
  for (double e : estimates) {
    const double diff = e - truth;
    acc.add(diff * diff);
  }
  return acc.sum / static_cast<double>(estimates.size());
}

namespace {

Target effective_estimand(const ExperimentConfig& config) {
  Target t = config.target == Target::mse_curve ? config.curve_estimand
                                                : config.target;
  if (t == Target::ks_residuals) t = Target::entropy;
  return t;
}

FunctionalOrder estimand_order(const ExperimentConfig& config,
                               Target estimand) {
  if (estimand == Target::variability) return {1, 1};
  return config.order;
}

int rate_order(const ExperimentConfig& config) {
  const Target estimand = effective_estimand(config);
  if (estimand == Target::bregman) return config.bregman_s;
  return estimand_order(config, estimand).total();
}

}  // namespace

double target_truth(const ExperimentConfig& config, Target estimand) {
  const DistributionSpec* y =
      config.dist_y ? &*config.dist_y : nullptr;
  switch (estimand) {
    case Target::bregman: {
      const int s = config.bregman_s;
      const double q_s0 = true_q(config.dist_x, y, {s, 0});
      const double q_0s = true_q(config.dist_x, y, {0, s});
      const double q_1s = true_q(config.dist_x, y, {1, s - 1});
      const double q_s1 = true_q(config.dist_x, y, {s - 1, 1});
      return bregman_combine(q_s0, q_0s, q_1s, q_s1, s,
                             config.bregman_symmetrized);
    }
    case Target::variability:
      return -std::log(true_q(config.dist_x, y, {1, 1}));
    case Target::q_value:
      return true_q(config.dist_x, y, config.order);
    case Target::entropy:
    case Target::ks_residuals: {
      const int r = config.order.total();
      return std::log(true_q(config.dist_x, y, config.order)) /
             (1.0 - static_cast<double>(r));
    }
    case Target::mse_curve:
      return target_truth(config, effective_estimand(config));
  }
  throw std::logic_error("unreachable target");
}

namespace {

struct CellPlan {
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  double epsilon = 0.0;
  std::optional<double> a;
};

double resolve_epsilon(const ExperimentConfig& config, std::size_t n1,
                       std::size_t n2, std::optional<double> a) {
  if (config.mode == Mode::discrete) return 0.0;
  switch (config.epsilon_rule) {
    case EpsilonRule::fixed:
      return config.epsilon;
    case EpsilonRule::rate:
      return select_epsilon(n1 + n2, distribution_dim(config.dist_x),
                            rate_order(config), config.alpha, config.c);
    case EpsilonRule::scaled:
      // n epsilon = a with n the per-sample size.
      return *a / static_cast<double>(n1);
  }
  throw std::logic_error("unreachable epsilon rule");
}

std::vector<CellPlan> plan_cells(const ExperimentConfig& config) {
  std::vector<CellPlan> cells;
  if (config.target == Target::mse_curve) {
    std::vector<std::optional<double>> sweep;
    if (config.epsilon_rule == EpsilonRule::scaled) {
      for (double a : config.a_values) sweep.emplace_back(a);
    } else {
      sweep.emplace_back(std::nullopt);
    }
    for (const auto& a : sweep) {
      for (std::size_t n : config.n_list) {
        cells.push_back({n, n, resolve_epsilon(config, n, n, a), a});
      }
    }
    return cells;
  }
  std::optional<double> a;
  if (config.epsilon_rule == EpsilonRule::scaled) a = config.a_values.front();
  cells.push_back(
      {config.n1, config.n2, resolve_epsilon(config, config.n1, config.n2, a),
       a});
  return cells;
}

Replication run_one(const ExperimentConfig& config, Target estimand,
                    const CellPlan& cell, double truth,
                    std::uint64_t replication_seed) {
  SplitMix64 rng(replication_seed);
  const Sample x = draw_sample(config.dist_x, cell.n1, rng);
  std::optional<Sample> y;
  if (config.dist_y && cell.n2 > 0) {
    y = draw_sample(*config.dist_y, cell.n2, rng);
  }
  const Sample* y_ptr = y ? &*y : nullptr;

  Replication rep;
  if (estimand == Target::bregman) {
    rep.estimate = bregman_estimate(x, *y, config.bregman_s, cell.epsilon,
                                    config.bregman_symmetrized);
    rep.q_value = kNan;
    rep.variance = kNan;
    rep.residual = rep.estimate - truth;
    return rep;
  }

  const FunctionalOrder order = estimand_order(config, estimand);
  const EstimateReport report =
      estimate_report(x, y_ptr, order, cell.epsilon, std::nullopt, true);
  const std::size_t n = report.n1 + report.n2;
  rep.q_value = report.q.value;
  rep.variance = report.variance->kappa_hat;
  if (estimand == Target::q_value) {
    rep.estimate = report.q.value;
    rep.residual = std::sqrt(static_cast<double>(n)) *
                   (report.q.value - truth) / std::sqrt(rep.variance);
  } else {
    rep.estimate = report.entropy->h_hat;
    rep.residual = normalized_residual(rep.estimate, truth, rep.variance,
                                       report.q.value, n, order.total());
  }
  return rep;
}

}  // namespace

ReplicationResult run_replications(const ExperimentConfig& config) {
  validate_config(config);
  const Target estimand = effective_estimand(config);
  const double truth = target_truth(config, estimand);
  const std::vector<CellPlan> cells = plan_cells(config);

  ReplicationResult result;
  result.cells.reserve(cells.size());

  for (std::size_t cell_index = 0; cell_index < cells.size(); ++cell_index) {
    const CellPlan& cell = cells[cell_index];
    CellSummary summary;
    summary.n1 = cell.n1;
    summary.n2 = cell.n2;
    summary.epsilon = cell.epsilon;
    summary.a = cell.a;
    summary.truth = truth;
    summary.replications.resize(config.n_sim);

    // Replication seeds are split deterministically from the study seed,
    // so the result is independent of worker scheduling.
    parallel_for(config.n_sim, config.threads, [&](std::size_t rep) {
      const std::uint64_t rep_seed = config.seed ^
                                     (static_cast<std::uint64_t>(cell_index)
                                      << 32) ^
                                     static_cast<std::uint64_t>(rep);
      summary.replications[rep] =
          run_one(config, estimand, cell, truth, rep_seed);
    });

    KahanSum mean_acc;
    for (const auto& rep : summary.replications) mean_acc.add(rep.estimate);
    summary.mean = mean_acc.sum / static_cast<double>(config.n_sim);

    KahanSum var_acc;
    std::vector<double> estimates(config.n_sim);
    for (std::size_t i = 0; i < config.n_sim; ++i) {
      estimates[i] = summary.replications[i].estimate;
      const double diff = estimates[i] - summary.mean;
      var_acc.add(diff * diff);
    }
    summary.sd = std::sqrt(var_acc.sum / static_cast<double>(config.n_sim));
    summary.mse = empirical_mse(estimates, truth);

    if (estimand == Target::bregman) {
      summary.ks_d = kNan;
      summary.ks_p = kNan;
    } else {
      std::vector<double> residuals(config.n_sim);
      for (std::size_t i = 0; i < config.n_sim; ++i) {
        residuals[i] = summary.replications[i].residual;
      }
      const KsResult ks = ks_test(residuals);
      summary.ks_d = ks.d;
      summary.ks_p = ks.p;
    }
    result.cells.push_back(std::move(summary));
  }
  return result;
}

void validate_config(const ExperimentConfig& config) {
  std::vector<std::string> problems;
  const auto complain = [&](const std::string& text) {
    problems.push_back(text);
  };

  try {
    validate_distribution(config.dist_x);
  } catch (const std::exception& e) {
    complain(std::string("dist_x: ") + e.what());
  }
  if (config.dist_y) {
    try {
      validate_distribution(*config.dist_y);
    } catch (const std::exception& e) {
      complain(std::string("dist_y: ") + e.what());
    }
    if (distribution_dim(*config.dist_y) != distribution_dim(config.dist_x)) {
      complain("dist_y: dimension differs from dist_x");
    }
  }
  if (distribution_mode(config.dist_x) != config.mode) {
    complain("mode: does not match dist_x");
  }
  if (config.dist_y && distribution_mode(*config.dist_y) != config.mode) {
    complain("mode: does not match dist_y");
  }
  if (config.n_sim < 1) complain("n_sim: must be >= 1");

  const Target estimand = effective_estimand(config);
  if (estimand == Target::variability || estimand == Target::bregman) {
    if (!config.dist_y) complain("dist_y: required by the target");
  }
  if (estimand == Target::variability && !(config.order == FunctionalOrder{1, 1})) {
    complain("order: variability fixes the order to (1,1)");
  }
  if (estimand == Target::bregman && config.bregman_s < 2) {
    complain("s: Bregman order must be >= 2");
  }
  if (estimand == Target::q_value || estimand == Target::entropy) {
    if (config.order.r1 < 0 || config.order.r2 < 0 ||
        config.order.total() < 1) {
      complain("order: needs r1, r2 >= 0 and r1 + r2 >= 1");
    } else if (estimand == Target::entropy && config.order.total() < 2) {
      complain("order: entropy needs r1 + r2 >= 2");
    }
    if (config.order.r2 > 0 && !config.dist_y) {
      complain("dist_y: required when r2 > 0");
    }
  }

  if (config.target == Target::mse_curve) {
    if (config.n_list.empty()) complain("n_list: required for mse-curve");
    for (std::size_t n : config.n_list) {
      if (n < 1) complain("n_list: entries must be >= 1");
    }
    if (config.curve_estimand == Target::mse_curve ||
        config.curve_estimand == Target::ks_residuals) {
      complain("estimand: must be one of q, h, v, bregman");
    }
  } else {
    if (config.n1 < 1) complain("n1: must be >= 1");
    if (config.dist_y && config.n2 < 1) {
      complain("n2: must be >= 1 when dist_y is set");
    }
  }

  if (config.mode == Mode::continuous) {
    switch (config.epsilon_rule) {
      case EpsilonRule::fixed:
        if (!(config.epsilon > 0.0)) complain("epsilon: must be > 0");
        break;
      case EpsilonRule::rate:
        if (!(config.alpha > 0.0)) complain("alpha: must be > 0");
        if (!(config.c > 0.0)) complain("c: must be > 0");
        if (rate_order(config) < 2) complain("order: rate rule needs r >= 2");
        break;
      case EpsilonRule::scaled:
        if (config.a_values.empty()) {
          complain("a_list: required by the scaled rule");
        }
        for (double a : config.a_values) {
          if (!(a > 0.0)) complain("a_list: entries must be > 0");
        }
        if (config.target != Target::mse_curve && config.a_values.size() > 1) {
          complain("a_list: single value required outside mse-curve");
        }
        break;
    }
  } else {
    if (config.epsilon_rule != EpsilonRule::fixed || config.epsilon != 0.0) {
      complain("epsilon: discrete mode uses exact coincidences (epsilon 0)");
    }
  }

  if (!problems.empty()) {
    std::ostringstream out;
    out << "invalid experiment configuration:";
    for (const auto& p : problems) out << "\n  - " << p;
    throw ConfigError(out.str());
  }
}

ExperimentConfig preset_config(const std::string& name) {
  ExperimentConfig config;
  if (name == "example1") {
    // Cubic entropy of a 3-dimensional Bernoulli(0.8) product law,
    // exact-coincidence estimator, residual normality study.
    config.dist_x = BernoulliProduct{3, 0.8};
    config.mode = Mode::discrete;
    config.n1 = 300;
    config.order = {3, 0};
    config.target = Target::ks_residuals;
    config.n_sim = 500;
    config.seed = 20101;
    return config;
  }
  if (name == "example2") {
    // Variability between N(0, 3/2) and N(2, 1/2) at epsilon = 1/10.
    config.dist_x = Gaussian1D{0.0, 1.5};
    config.dist_y = Gaussian1D{2.0, 0.5};
    config.n1 = 100;
    config.n2 = 200;
    config.order = {1, 1};
    config.target = Target::variability;
    config.epsilon_rule = EpsilonRule::fixed;
    config.epsilon = 0.1;
    config.n_sim = 300;
    config.seed = 20102;
    return config;
  }
  if (name == "example3") {
    // Cubic entropy of the bivariate standard normal at epsilon = 1/2.
    config.dist_x = GaussianIso{2};
    config.n1 = 300;
    config.order = {3, 0};
    config.target = Target::ks_residuals;
    config.epsilon_rule = EpsilonRule::fixed;
    config.epsilon = 0.5;
    config.n_sim = 300;
    config.seed = 20103;
    return config;
  }
  if (name == "example4") {
    // Quadratic Bregman distance between Exp(1) and Exp(3); MSE decay over
    // equal sample sizes with n epsilon = a.
    config.dist_x = Exponential{1.0};
    config.dist_y = Exponential{3.0};
    config.target = Target::mse_curve;
    config.curve_estimand = Target::bregman;
    config.bregman_s = 2;
    config.epsilon_rule = EpsilonRule::scaled;
    config.a_values = {2.0, 5.0, 10.0};
    config.n_list = {100, 200, 400};
    config.n_sim = 2000;
    config.seed = 20104;
    return config;
  }
  throw ConfigError("unknown preset '" + name +
                    "' (expected example1..example4)");
}

}  // namespace entrofunc
