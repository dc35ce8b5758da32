#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"

#include "entrofunc/io.hpp"
#include "entrofunc/rng.hpp"
#include "entrofunc/ustat.hpp"
#include "test_support.hpp"

using namespace entrofunc;

namespace {

std::filesystem::path temp_file(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("sample csv round trip preserves estimates bit-exactly") {
  SplitMix64 rng(1201);
  const Sample x = test::random_cloud(rng, 50, 3);
  const auto path = temp_file("entrofunc_roundtrip.csv");
  write_sample_csv(path.string(), x);
  const Sample back = read_sample_csv(path.string(), Mode::continuous);
  REQUIRE(back.size() == x.size());
  REQUIRE(back.dim() == x.dim());
  CHECK(back.data() == x.data());
  CHECK(estimate_q(back, nullptr, {2, 0}, 0.3).value ==
        estimate_q(x, nullptr, {2, 0}, 0.3).value);
  std::filesystem::remove(path);
}

TEST_CASE("sample csv parsing") {
  const auto path = temp_file("entrofunc_parse.csv");

  SUBCASE("header row is auto-detected") {
    std::ofstream(path.string()) << "u,v\n1.5,2\n3,4\n";
    const Sample s = read_sample_csv(path.string(), Mode::continuous);
    CHECK(s.size() == 2);
    CHECK(s.dim() == 2);
    CHECK(s.point(0)[0] == 1.5);
  }

  SUBCASE("ragged rows are rejected") {
    std::ofstream(path.string()) << "1,2\n3\n";
    CHECK_THROWS_AS(read_sample_csv(path.string(), Mode::continuous),
                    InputError);
  }

  SUBCASE("non-numeric body cell is rejected") {
    std::ofstream(path.string()) << "1,2\n3,oops\n";
    CHECK_THROWS_AS(read_sample_csv(path.string(), Mode::continuous),
                    InputError);
  }

  SUBCASE("discrete mode requires integer cells") {
    std::ofstream(path.string()) << "1,2\n3,4.5\n";
    CHECK_THROWS_AS(read_sample_csv(path.string(), Mode::discrete),
                    InputError);
  }

  SUBCASE("empty file is rejected") {
    std::ofstream(path.string()) << "";
    CHECK_THROWS_AS(read_sample_csv(path.string(), Mode::continuous),
                    InputError);
  }

  SUBCASE("missing file is rejected") {
    CHECK_THROWS_AS(
        read_sample_csv("/nonexistent/entrofunc.csv", Mode::continuous),
        InputError);
  }

  std::filesystem::remove(path);
}

TEST_CASE("config text parsing") {
  const ConfigMap config = parse_config_text(
      "# comment\n"
      "[experiment]\n"
      "target = v\n"
      "n1 = 100\n"
      "\n"
      "[dist_x]\n"
      "family = gaussian1d\n"
      "mu = 0\n");
  CHECK(config.at("experiment").at("target") == "v");
  CHECK(config.at("experiment").at("n1") == "100");
  CHECK(config.at("dist_x").at("family") == "gaussian1d");

  CHECK_THROWS_AS(parse_config_text("[experiment\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("just words\n"), ConfigError);
}

TEST_CASE("experiment config building") {
  SUBCASE("full explicit config") {
    const ExperimentConfig config = experiment_from_config(parse_config_text(
        "[experiment]\n"
        "target = v\n"
        "n1 = 100\n"
        "n2 = 200\n"
        "n_sim = 300\n"
        "seed = 99\n"
        "epsilon_rule = fixed\n"
        "epsilon = 0.1\n"
        "[dist_x]\n"
        "family = gaussian1d\n"
        "mu = 0\n"
        "sigma2 = 1.5\n"
        "[dist_y]\n"
        "family = gaussian1d\n"
        "mu = 2\n"
        "sigma2 = 0.5\n"));
    CHECK(config.target == Target::variability);
    CHECK(config.order == FunctionalOrder{1, 1});
    CHECK(config.mode == Mode::continuous);
    CHECK(config.seed == 99);
    CHECK(std::get<Gaussian1D>(config.dist_x).variance == 1.5);
    CHECK(std::get<Gaussian1D>(*config.dist_y).mean == 2.0);
  }

  SUBCASE("preset plus overrides") {
    const ExperimentConfig config = experiment_from_config(parse_config_text(
        "[experiment]\n"
        "preset = example1\n"
        "n_sim = 25\n"
        "seed = 7\n"));
    CHECK(config.mode == Mode::discrete);
    CHECK(config.n1 == 300);
    CHECK(config.n_sim == 25);
    CHECK(config.seed == 7);
  }

  SUBCASE("unknown keys fail closed and are named") {
    try {
      experiment_from_config(parse_config_text(
          "[experiment]\n"
          "preset = example1\n"
          "n_simm = 25\n"));
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("n_simm") != std::string::npos);
    }
  }

  SUBCASE("unknown sections fail closed") {
    CHECK_THROWS_AS(experiment_from_config(parse_config_text(
                        "[experiment]\npreset = example1\n[extra]\nx = 1\n")),
                    ConfigError);
  }

  SUBCASE("missing experiment section") {
    CHECK_THROWS_AS(
        experiment_from_config(parse_config_text("[dist_x]\nfamily = exp\n")),
        ConfigError);
  }
}

TEST_CASE("distribution spec strings") {
  const DistributionSpec g = parse_distribution("gaussian1d:mu=2,sigma2=0.5");
  CHECK(std::get<Gaussian1D>(g).mean == 2.0);
  CHECK(describe(g) == "gaussian1d(mu=2,sigma2=0.5)");

  const DistributionSpec b = parse_distribution("bernoulliProduct:d=3,p=0.8");
  CHECK(std::get<BernoulliProduct>(b).dim == 3);

  const DistributionSpec u = parse_distribution("uniformDiscrete:m=6");
  CHECK(std::get<UniformDiscrete>(u).atoms == 6);

  CHECK_THROWS_AS(parse_distribution("cauchy:scale=1"), ConfigError);
  CHECK_THROWS_AS(parse_distribution("gaussian1d:mu=0,spread=2"), ConfigError);
  CHECK_THROWS_AS(parse_distribution("exponential:beta=-1"),
                  std::invalid_argument);
}

TEST_CASE("result csv formatting") {
  ExperimentConfig config = preset_config("example1");
  config.n_sim = 3;
  const ReplicationResult result = run_replications(config);

  const auto residuals_path = temp_file("entrofunc_residuals.csv");
  const auto summary_path = temp_file("entrofunc_summary.csv");
  write_residuals_csv(residuals_path.string(), result);
  write_summary_csv(summary_path.string(), result);

  std::ifstream residuals(residuals_path.string());
  std::string line;
  std::getline(residuals, line);
  CHECK(line == "replication,estimate,k_n,residual");
  int rows = 0;
  while (std::getline(residuals, line)) ++rows;
  CHECK(rows == 3);

  std::ifstream summary(summary_path.string());
  std::getline(summary, line);
  CHECK(line == "mean,sd,mse,ks_D,ks_p,truth");

  std::filesystem::remove(residuals_path);
  std::filesystem::remove(summary_path);
}

TEST_CASE("format_real survives round trips") {
  SplitMix64 rng(1301);
  for (int i = 0; i < 200; ++i) {
    const double v = (rng.uniform01() - 0.5) * std::pow(10.0, i % 7);
    CHECK(std::stod(format_real(v)) == v);
  }
}
