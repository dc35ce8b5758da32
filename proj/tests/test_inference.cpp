#include <cmath>
#include <numbers>

#include "doctest.h"

#include "entrofunc/ball.hpp"
#include "entrofunc/inference.hpp"
#include "entrofunc/oracle.hpp"
#include "entrofunc/rng.hpp"
#include "entrofunc/simulation.hpp"
#include "entrofunc/ustat.hpp"
#include "test_support.hpp"

using namespace entrofunc;

TEST_CASE("variance estimator structure") {
  SUBCASE("single-sample order drops the second term") {
    SplitMix64 rng(41);
    const Sample x = draw_sample(BernoulliProduct{3, 0.8}, 200, rng);
    const VarianceEstimate k = variance_estimate(x, nullptr, {3, 0}, 0.0);
    CHECK_FALSE(k.plug_second.has_value());
    CHECK(k.p_hat == 1.0);
    CHECK(k.kappa_hat >= 1.0 / 200.0);
    CHECK(k.plug_first.order == FunctionalOrder{5, 0});
  }

  SUBCASE("degenerate kernel truncates to 1/n") {
    // Uniform on {1,2} for both samples: all ball probabilities are 1/2, so
    // both kernel variances vanish and K concentrates below 1/n.
    SplitMix64 rng(42);
    const Sample x = draw_sample(UniformDiscrete{2}, 6000, rng);
    const Sample y = draw_sample(UniformDiscrete{2}, 6000, rng);
    const VarianceEstimate k = variance_estimate(x, &y, {1, 1}, 0.0);
    CHECK(k.truncated);
    CHECK(k.kappa_hat == 1.0 / 12000.0);
  }

  SUBCASE("plug-in converges to the closed-form kappa") {
    // kappa = 9 (q_{5,0} - q_{3,0}^2) for the product-Bernoulli law.
    const DistributionSpec b = BernoulliProduct{3, 0.8};
    const double q5 = true_q(b, nullptr, {5, 0});
    const double q3 = true_q(b, nullptr, {3, 0});
    const double kappa = 9.0 * (q5 - q3 * q3);
    SplitMix64 rng(43);
    const Sample x = draw_sample(b, 20000, rng);
    const VarianceEstimate k = variance_estimate(x, nullptr, {3, 0}, 0.0);
    CHECK(k.raw_k == doctest::Approx(kappa).epsilon(0.15));
  }

  SUBCASE("insufficient sample for the inflated order") {
    SplitMix64 rng(44);
    const Sample x = draw_sample(BernoulliProduct{2, 0.5}, 4, rng);
    CHECK_THROWS_AS(variance_estimate(x, nullptr, {3, 0}, 0.0),
                    InsufficientSampleError);
  }
}

TEST_CASE("entropy estimator") {
  QEstimate q;
  q.order = {3, 0};
  q.epsilon = 0.0;

  q.value = 0.140608;
  const EntropyEstimate h = entropy_estimate(q, 1000000);
  CHECK(h.h_hat == doctest::Approx(0.980889701109996).epsilon(1e-12));
  CHECK_FALSE(h.truncated);

  q.value = 1.0;
  CHECK(entropy_estimate(q, 100).h_hat == 0.0);

  q.value = 0.0;
  q.order = {2, 0};
  const EntropyEstimate clipped = entropy_estimate(q, 100);
  CHECK(clipped.h_hat == doctest::Approx(std::log(100.0)).epsilon(1e-15));
  CHECK(clipped.truncated);

  q.order = {1, 0};
  CHECK_THROWS_AS(entropy_estimate(q, 100), std::invalid_argument);
}

TEST_CASE("entropy is monotone decreasing in the point estimate") {
  QEstimate q;
  q.order = {3, 0};
  double previous = std::numeric_limits<double>::infinity();
  for (double value : {0.01, 0.05, 0.2, 0.5, 0.9}) {
    q.value = value;
    const double h = entropy_estimate(q, 1000).h_hat;
    CHECK(h < previous);
    previous = h;
  }
}

TEST_CASE("confidence interval geometry") {
  QEstimate q;
  q.order = {3, 0};
  q.value = 0.14;
  EntropyEstimate h = entropy_estimate(q, 300);
  VarianceEstimate k;
  k.kappa_hat = 0.09;

  const ConfidenceInterval ci = confidence_interval(h, k, 300, 0.95);
  const double half = 1.959963984540054 * std::sqrt(0.09) /
                      (std::sqrt(300.0) * 2.0 * 0.14);
  CHECK(ci.center == h.h_hat);
  CHECK(ci.upper - ci.center == doctest::Approx(half).epsilon(1e-9));
  CHECK(ci.center - ci.lower == doctest::Approx(half).epsilon(1e-9));
  CHECK(ci.pivot == Pivot::discrete_exact);

  // Quadrupling n at fixed estimates halves the width.
  const ConfidenceInterval wide = confidence_interval(h, k, 300, 0.95);
  const ConfidenceInterval narrow = confidence_interval(h, k, 1200, 0.95);
  CHECK((wide.upper - wide.lower) / (narrow.upper - narrow.lower) ==
        doctest::Approx(2.0).epsilon(1e-12));

  // Tiny level collapses to the point estimate.
  const ConfidenceInterval point = confidence_interval(h, k, 300, 1e-12);
  CHECK(point.upper - point.lower ==
        doctest::Approx(0.0).epsilon(1e-9));

  q.value = 0.0;
  h.q = q;
  CHECK_THROWS_AS(confidence_interval(h, k, 300, 0.95),
                  std::invalid_argument);
}

TEST_CASE("normalized residual arithmetic") {
  CHECK(normalized_residual(1.0, 1.0, 0.09, 0.14, 300, 3) == 0.0);
  CHECK(normalized_residual(1.01, 1.0, 0.09, 0.14, 300, 3) ==
        doctest::Approx(0.16165807537309526).epsilon(1e-12));
}

TEST_CASE("bandwidth selection regimes") {
  // alpha = d/2 keeps the bias-driven rate: exponent 1/3 at d=2, r=2.
  CHECK(select_epsilon(1000, 2, 2, 1.0, 1.0) ==
        doctest::Approx(std::pow(1000.0, -1.0 / 3.0)).epsilon(1e-14));
  // Smooth case: eps = c (log n / n)^(1/d), so n eps^d = log n.
  CHECK(select_epsilon(100, 1, 2, 2.0, 1.0) ==
        doctest::Approx(0.04605170185988092).epsilon(1e-13));
  CHECK(select_epsilon(100, 1, 2, 2.0, 2.0) ==
        doctest::Approx(2.0 * 0.04605170185988092).epsilon(1e-13));
  CHECK_THROWS_AS(select_epsilon(100, 1, 1, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(select_epsilon(100, 1, 2, 0.0, 1.0), std::invalid_argument);
}

TEST_CASE("variability estimate directions") {
  SUBCASE("near-coincident samples give small variability") {
    SplitMix64 rng(61);
    std::vector<double> data(200, 0.0);
    for (double& v : data) v = 1e-4 * rng.uniform01();
    const Sample x(std::move(data), 1, Mode::continuous);
    std::vector<double> data2(200, 0.0);
    for (double& v : data2) v = 1e-4 * rng.uniform01();
    const Sample y(std::move(data2), 1, Mode::continuous);
    const EntropyEstimate v = variability_estimate(x, y, 0.01);
    CHECK(v.h_hat < 0.0);  // Q-tilde far above 1, log negative
  }

  SUBCASE("sample swap converges to the same target") {
    const DistributionSpec gx = Gaussian1D{0.0, 1.5};
    const DistributionSpec gy = Gaussian1D{2.0, 0.5};
    SplitMix64 rng(62);
    const Sample x = draw_sample(gx, 10000, rng);
    const Sample y = draw_sample(gy, 10000, rng);
    const double forward = variability_estimate(x, y, 0.05).h_hat;
    const double backward = variability_estimate(y, x, 0.05).h_hat;
    // Shared target log(2 sqrt(pi) e); both directions estimate it.
    CHECK(forward == doctest::Approx(2.2655121234846454).epsilon(0.05));
    CHECK(backward == doctest::Approx(2.2655121234846454).epsilon(0.05));
    CHECK(forward == doctest::Approx(backward).epsilon(0.05));
  }
}

TEST_CASE("Renyi entropy estimate on uniform atoms") {
  // q_{s,0} = m^(1-s), so the entropy converges to log m for every s.
  SplitMix64 rng(63);
  const Sample x = draw_sample(UniformDiscrete{6}, 8000, rng);
  for (int s : {2, 3}) {
    const EntropyEstimate h = renyi_entropy_estimate(x, s, 0.0);
    CHECK(h.h_hat == doctest::Approx(std::log(6.0)).epsilon(0.02));
  }
  CHECK_THROWS_AS(renyi_entropy_estimate(x, 1, 0.0), std::invalid_argument);
}

TEST_CASE("Renyi entropy estimate on the Bernoulli product law") {
  // -log((0.8^3 + 0.2^3)^3)/2 = 0.98089.
  SplitMix64 rng(68);
  const Sample x = draw_sample(BernoulliProduct{3, 0.8}, 20000, rng);
  const EntropyEstimate h = renyi_entropy_estimate(x, 3, 0.0);
  CHECK(h.h_hat == doctest::Approx(0.980889701109996).epsilon(0.02));
}

TEST_CASE("Bregman combination and estimate") {
  SUBCASE("combination matches the hand-expanded s = 2 distance") {
    CHECK(bregman_combine(0.5, 1.5, 0.75, 0.75, 2, false) ==
          doctest::Approx(0.5).epsilon(1e-15));
    CHECK(bregman_combine(0.5, 1.5, 0.75, 0.75, 2, true) ==
          doctest::Approx(0.5).epsilon(1e-15));
  }

  SUBCASE("symmetrized form is exactly swap-invariant") {
    SplitMix64 rng(64);
    for (int trial = 0; trial < 50; ++trial) {
      const double qs0 = rng.uniform01();
      const double q0s = rng.uniform01();
      const double q1s = rng.uniform01();
      const double qs1 = rng.uniform01();
      for (int s : {2, 3, 4}) {
        const double forward = bregman_combine(qs0, q0s, q1s, qs1, s, true);
        const double swapped = bregman_combine(q0s, qs0, qs1, q1s, s, true);
        CHECK(forward == swapped);
      }
    }
  }

  SUBCASE("exponential pair estimate approaches 1/2") {
    SplitMix64 rng(65);
    const Sample x = draw_sample(Exponential{1.0}, 5000, rng);
    const Sample y = draw_sample(Exponential{3.0}, 5000, rng);
    const double b2 = bregman_estimate(x, y, 2, 10.0 / 5000.0, false);
    CHECK(b2 == doctest::Approx(0.5).epsilon(0.25));
  }

  SUBCASE("same law gives a small, possibly negative, distance") {
    SplitMix64 rng(66);
    const Sample x = draw_sample(Exponential{2.0}, 4000, rng);
    const Sample y = draw_sample(Exponential{2.0}, 4000, rng);
    const double b2 = bregman_estimate(x, y, 2, 5.0 / 4000.0, false);
    CHECK(std::abs(b2) < 0.1);
  }
}

TEST_CASE("join size prediction") {
  CHECK(join_size_estimate(1000, 1000, 0.1, 1, 2.2655121234846454) ==
        doctest::Approx(20755.374871029737).epsilon(1e-12));
  CHECK(join_size_estimate(1000, 1000, 0.1, 1, 1e9) ==
        doctest::Approx(0.0).epsilon(1e-12));
  const double base = join_size_estimate(500, 1000, 0.1, 1, 2.0);
  CHECK(join_size_estimate(1000, 1000, 0.1, 1, 2.0) ==
        doctest::Approx(2.0 * base).epsilon(1e-14));
}

TEST_CASE("student-r maximum-entropy density") {
  const SquareMatrix unit = SquareMatrix::identity(1);
  const std::vector<double> mu = {0.0};

  SUBCASE("peak value and support") {
    // d=1, s=2: m=3, C=5, A = 3/(4 sqrt 5).
    CHECK(student_r_density(std::vector<double>{0.0}, mu, unit, 2) ==
          doctest::Approx(0.33541019662496846).epsilon(1e-14));
    CHECK(student_r_density(std::vector<double>{2.2360679774997896}, mu, unit,
                            2) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(student_r_density(std::vector<double>{5.0}, mu, unit, 2) == 0.0);
    CHECK(student_r_density(std::vector<double>{-5.0}, mu, unit, 2) == 0.0);
  }

  SUBCASE("normalization and covariance by quadrature") {
    for (int s : {2, 3}) {
      const double lim = std::sqrt((1.0 + 2.0 / (s - 1.0) + 2.0));
      const auto dens = [&](double t) {
        return student_r_density(std::vector<double>{t}, mu, unit, s);
      };
      const double mass = simpson(dens, -lim, lim, 1 << 15);
      const double second = simpson(
          [&](double t) { return t * t * dens(t); }, -lim, lim, 1 << 15);
      CHECK(mass == doctest::Approx(1.0).epsilon(s == 2 ? 1e-9 : 1e-6));
      CHECK(second == doctest::Approx(1.0).epsilon(s == 2 ? 1e-9 : 1e-6));
    }
  }

  SUBCASE("rejects bad inputs") {
    SquareMatrix negative = SquareMatrix::identity(1);
    negative.at(0, 0) = -1.0;
    CHECK_THROWS_AS(
        student_r_density(std::vector<double>{0.0}, mu, negative, 2),
        std::invalid_argument);
    CHECK_THROWS_AS(student_r_density(std::vector<double>{0.0}, mu, unit, 1),
                    std::invalid_argument);
  }

  SUBCASE("two-dimensional normalization via numeric_q") {
    const DistributionSpec s2 = StudentR{{0.0, 0.0}, SquareMatrix::identity(2), 2};
    CHECK(numeric_q(s2, nullptr, {1, 0}, 512) ==
          doctest::Approx(1.0).epsilon(1e-5));
  }
}

TEST_CASE("estimate_report reuses one counting pass consistently") {
  SplitMix64 rng(67);
  const Sample x = test::random_cloud(rng, 60, 2);
  const Sample y = test::random_cloud(rng, 50, 2);
  const EstimateReport report = estimate_report(x, &y, {1, 1}, 0.2, 0.95);

  CHECK(report.q.value ==
        doctest::Approx(estimate_q(x, &y, {1, 1}, 0.2).value).epsilon(1e-15));
  const VarianceEstimate standalone = variance_estimate(x, &y, {1, 1}, 0.2);
  CHECK(report.variance->kappa_hat ==
        doctest::Approx(standalone.kappa_hat).epsilon(1e-15));
  CHECK(report.entropy.has_value());
  CHECK(report.ci.has_value());
  CHECK(report.ci->pivot == Pivot::continuous_ball);
  CHECK(report.n1 == 60);
  CHECK(report.n2 == 50);
}
