// Command-line front end: estimate functionals from CSV samples, run
// configured replication studies, query the closed-form/numeric oracles.
//
// Exit codes: 0 ok, 2 malformed input or usage, 3 insufficient sample,
// 4 config validation, 5 unsupported oracle pair.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "entrofunc/ball.hpp"
#include "entrofunc/distribution.hpp"
#include "entrofunc/inference.hpp"
#include "entrofunc/io.hpp"
#include "entrofunc/oracle.hpp"
#include "entrofunc/simulation.hpp"
#include "entrofunc/version.hpp"

namespace {

using namespace entrofunc;

std::string join_args(int argc, char** argv) {
  std::string joined;
  for (int i = 0; i < argc; ++i) {
    if (i > 0) joined += ' ';
    joined += argv[i];
  }
  return joined;
}

struct EstimateArgs {
  std::string x_path;
  std::string y_path;
  int r1 = 0;
  int r2 = 0;
  double epsilon = 0.0;
  std::string auto_eps;
  std::string mode = "continuous";
  double ci_level = 0.95;
  std::string out = "estimate_report.json";
  std::string join_size;  // "m1,m2"
  int bregman_s = 0;
  bool symmetrized = false;
};

// "alpha=A,c=C" for the rate-driven bandwidth.
std::pair<double, double> parse_auto_eps(const std::string& text) {
  double alpha = 0.0;
  double c = 0.0;
  bool have_alpha = false;
  bool have_c = false;
  std::istringstream in(text);
  std::string part;
  while (std::getline(in, part, ',')) {
    const auto eq = part.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("--auto-eps expects alpha=A,c=C");
    }
    const std::string key = part.substr(0, eq);
    const double value = std::strtod(part.c_str() + eq + 1, nullptr);
    if (key == "alpha") {
      alpha = value;
      have_alpha = true;
    } else if (key == "c") {
      c = value;
      have_c = true;
    } else {
      throw std::invalid_argument("--auto-eps expects alpha=A,c=C");
    }
  }
  if (!have_alpha || !have_c) {
    throw std::invalid_argument("--auto-eps expects alpha=A,c=C");
  }
  return {alpha, c};
}

int run_estimate(const EstimateArgs& args, const std::string& command) {
  const auto started = std::chrono::steady_clock::now();

  const Mode mode =
      args.mode == "discrete" ? Mode::discrete : Mode::continuous;
  if (args.mode != "discrete" && args.mode != "continuous") {
    throw std::invalid_argument("--mode must be continuous or discrete");
  }
  const FunctionalOrder order{args.r1, args.r2};
  validate_order(order);

  const Sample x = read_sample_csv(args.x_path, mode);
  std::optional<Sample> y;
  if (!args.y_path.empty()) y = read_sample_csv(args.y_path, mode);
  const Sample* y_ptr = y ? &*y : nullptr;

  const std::size_t n_total = x.size() + (y ? y->size() : 0);
  double epsilon = 0.0;
  if (mode == Mode::continuous) {
    if (!args.auto_eps.empty()) {
      const auto [alpha, c] = parse_auto_eps(args.auto_eps);
      epsilon = select_epsilon(n_total, x.dim(), order.total(), alpha, c);
    } else if (args.epsilon > 0.0) {
      epsilon = args.epsilon;
    } else {
      throw std::invalid_argument(
          "continuous mode needs --epsilon or --auto-eps");
    }
  } else if (args.epsilon != 0.0 || !args.auto_eps.empty()) {
    throw std::invalid_argument(
        "discrete mode uses exact coincidences; drop --epsilon/--auto-eps");
  }

  std::optional<double> ci;
  if (args.ci_level > 0.0 && args.ci_level < 1.0) ci = args.ci_level;

  const EstimateReport report =
      estimate_report(x, y_ptr, order, epsilon, ci, true);
  const std::size_t n = report.n1 + report.n2;

  nlohmann::json j;
  j["mode"] = mode == Mode::discrete ? "discrete" : "continuous";
  j["d"] = x.dim();
  j["n1"] = x.size();
  j["n2"] = y ? y->size() : 0;
  j["order"] = {order.r1, order.r2};
  j["epsilon"] = epsilon;
  j["q_raw"] = report.q_raw.value;
  j["q"] = report.q.value;
  j["normalized"] = report.q.normalized;
  if (report.variance) {
    j["k_n"] = report.variance->kappa_hat;
    j["raw_K"] = report.variance->raw_k;
    j["k_truncated"] = report.variance->truncated;
    j["p_hat"] = report.variance->p_hat;
  }
  if (report.entropy) {
    j["h"] = report.entropy->h_hat;
    j["h_truncated"] = report.entropy->truncated;
    if (order == FunctionalOrder{1, 1}) j["variability"] = report.entropy->h_hat;
  }
  if (report.ci) {
    j["ci"] = {{"level", report.ci->level},
               {"lower", report.ci->lower},
               {"upper", report.ci->upper}};
  }

  std::optional<double> join_prediction;
  if (!args.join_size.empty()) {
    if (!(order == FunctionalOrder{1, 1})) {
      throw std::invalid_argument("--join-size needs order (1,1)");
    }
    const auto comma = args.join_size.find(',');
    if (comma == std::string::npos) {
      throw std::invalid_argument("--join-size expects m1,m2");
    }
    const double m1 = std::strtod(args.join_size.c_str(), nullptr);
    const double m2 = std::strtod(args.join_size.c_str() + comma + 1, nullptr);
    join_prediction = join_size_estimate(m1, m2, epsilon, x.dim(),
                                         report.entropy->h_hat);
    j["join_size"] = *join_prediction;
    j["join_m"] = {m1, m2};
  }

  if (args.bregman_s >= 2) {
    if (!y) throw std::invalid_argument("--bregman needs --y");
    j["bregman_s"] = args.bregman_s;
    j["bregman"] =
        bregman_estimate(x, *y, args.bregman_s, epsilon, args.symmetrized);
    j["bregman_symmetrized"] = args.symmetrized;
  }

  {
    std::ofstream out(args.out, std::ios::binary);
    if (!out) throw InputError("cannot write report '" + args.out + "'");
    out << j.dump(2) << '\n';
  }

  const auto elapsed = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - started)
                           .count();
  const std::string manifest_path = args.out + ".manifest.json";
  write_manifest(manifest_path, command, j.dump(), 0, elapsed, {args.out});

  std::ostringstream line;
  line << "q=" << format_real(report.q.value);
  if (report.entropy) line << " h=" << format_real(report.entropy->h_hat);
  if (report.variance) {
    line << " k_n=" << format_real(report.variance->kappa_hat);
  }
  if (report.ci) {
    line << " ci" << report.ci->level * 100 << "=["
         << format_real(report.ci->lower) << ","
         << format_real(report.ci->upper) << "]";
  }
  if (join_prediction) line << " join=" << format_real(*join_prediction);
  line << " (n=" << n << ", order=(" << order.r1 << "," << order.r2
       << "), eps=" << format_real(epsilon) << ")";
  std::cout << line.str() << '\n';
  return 0;
}

struct ExperimentArgs {
  std::string config_path;
  std::string preset;
  std::string out_dir = "experiment_out";
  unsigned threads = 0;
  bool threads_given = false;
};

int run_experiment(const ExperimentArgs& args, const std::string& command) {
  const auto started = std::chrono::steady_clock::now();

  ExperimentConfig config;
  if (!args.config_path.empty()) {
    config = experiment_from_config(parse_config_file(args.config_path));
  } else if (!args.preset.empty()) {
    config = preset_config(args.preset);
  } else {
    throw ConfigError("experiment needs --config FILE or --preset NAME");
  }
  if (args.threads_given) config.threads = args.threads;

  if (const char* env_seed = std::getenv("ENTROFUNC_SEED")) {
    char* end = nullptr;
    const unsigned long long parsed = std::strtoull(env_seed, &end, 10);
    if (end == env_seed || *end != '\0') {
      throw ConfigError("ENTROFUNC_SEED must be a non-negative integer");
    }
    config.seed = parsed;
  }

  validate_config(config);
  const ReplicationResult result = run_replications(config);

  std::filesystem::create_directories(args.out_dir);
  const std::string residuals_path =
      (std::filesystem::path(args.out_dir) / "residuals.csv").string();
  const std::string summary_path =
      (std::filesystem::path(args.out_dir) / "summary.csv").string();
  const std::string manifest_path =
      (std::filesystem::path(args.out_dir) / "manifest.json").string();
  write_residuals_csv(residuals_path, result);
  write_summary_csv(summary_path, result);

  const auto elapsed = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - started)
                           .count();
  write_manifest(manifest_path, command, config_to_json(config), config.seed,
                 elapsed, {residuals_path, summary_path});

  for (const auto& cell : result.cells) {
    std::ostringstream line;
    line << "cell n1=" << cell.n1 << " n2=" << cell.n2
         << " eps=" << format_real(cell.epsilon);
    if (cell.a) line << " a=" << format_real(*cell.a);
    line << ": mean=" << format_real(cell.mean)
         << " sd=" << format_real(cell.sd) << " mse=" << format_real(cell.mse);
    if (std::isfinite(cell.ks_p)) {
      line << " ks_p=" << format_real(cell.ks_p);
    }
    line << " truth=" << format_real(cell.truth);
    std::cout << line.str() << '\n';
  }
  std::cout << "wrote " << residuals_path << ", " << summary_path << ", "
            << manifest_path << '\n';
  return 0;
}

struct OracleArgs {
  std::string dist_x;
  std::string dist_y;
  int r1 = 0;
  int r2 = 0;
  bool numeric = false;
};

int run_oracle(const OracleArgs& args) {
  const DistributionSpec x = parse_distribution(args.dist_x);
  std::optional<DistributionSpec> y;
  if (!args.dist_y.empty()) y = parse_distribution(args.dist_y);
  const DistributionSpec* y_ptr = y ? &*y : nullptr;
  const FunctionalOrder order{args.r1, args.r2};
  validate_order(order);

  const double value = args.numeric ? numeric_q(x, y_ptr, order)
                                    : true_q(x, y_ptr, order);
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.12g", value);
  std::cout << buffer << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coincidence-based estimation of entropy-type functionals"};
  app.set_version_flag("--version", entrofunc::kVersion);
  app.require_subcommand(1);

  EstimateArgs estimate;
  CLI::App* cmd_estimate =
      app.add_subcommand("estimate", "Estimate a functional from CSV samples");
  cmd_estimate->add_option("--x", estimate.x_path, "Sample X (CSV)")
      ->required();
  cmd_estimate->add_option("--y", estimate.y_path, "Sample Y (CSV)");
  cmd_estimate->add_option("--r1", estimate.r1, "Order exponent r1")
      ->required();
  cmd_estimate->add_option("--r2", estimate.r2, "Order exponent r2")
      ->required();
  cmd_estimate->add_option("--epsilon", estimate.epsilon,
                           "Coincidence radius (continuous mode)");
  cmd_estimate->add_option("--auto-eps", estimate.auto_eps,
                           "Rate-driven radius, format alpha=A,c=C");
  cmd_estimate->add_option("--mode", estimate.mode,
                           "continuous (default) or discrete");
  cmd_estimate->add_option("--ci", estimate.ci_level,
                           "Confidence level (default 0.95)");
  cmd_estimate->add_option("--out", estimate.out,
                           "Report path (default estimate_report.json)");
  cmd_estimate->add_option("--join-size", estimate.join_size,
                           "Predict epsilon-join size for tables m1,m2");
  cmd_estimate->add_option("--bregman", estimate.bregman_s,
                           "Also estimate the order-s Bregman distance");
  cmd_estimate->add_flag("--symmetrized", estimate.symmetrized,
                         "Symmetrize the Bregman distance");

  ExperimentArgs experiment;
  CLI::App* cmd_experiment =
      app.add_subcommand("experiment", "Run a replication study");
  cmd_experiment->add_option("--config", experiment.config_path,
                             "Experiment config file");
  cmd_experiment->add_option("--preset", experiment.preset,
                             "Named preset example1..example4");
  cmd_experiment->add_option("--out-dir", experiment.out_dir,
                             "Output directory (default experiment_out)");
  cmd_experiment
      ->add_option("--threads", experiment.threads,
                   "Worker cap (default: machine parallelism)")
      ->each([&](const std::string&) { experiment.threads_given = true; });

  OracleArgs oracle;
  CLI::App* cmd_oracle =
      app.add_subcommand("oracle", "Closed-form / numeric functional values");
  cmd_oracle->add_option("--dist-x", oracle.dist_x, "X law, family:k=v,...")
      ->required();
  cmd_oracle->add_option("--dist-y", oracle.dist_y, "Y law");
  cmd_oracle->add_option("--r1", oracle.r1, "Order exponent r1")->required();
  cmd_oracle->add_option("--r2", oracle.r2, "Order exponent r2")->required();
  cmd_oracle->add_flag("--numeric", oracle.numeric,
                       "Force quadrature/summation instead of closed forms");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  }

  const std::string command = join_args(argc, argv);
  const bool is_experiment = cmd_experiment->parsed();
  try {
    if (cmd_estimate->parsed()) return run_estimate(estimate, command);
    if (is_experiment) return run_experiment(experiment, command);
    return run_oracle(oracle);
  } catch (const entrofunc::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const entrofunc::InsufficientSampleError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const entrofunc::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return is_experiment ? 4 : 2;
  } catch (const entrofunc::UnsupportedPairError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 5;
  } catch (const entrofunc::EnumerationGuardError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
