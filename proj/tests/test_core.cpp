#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"

#include "entrofunc/ball.hpp"
#include "entrofunc/distribution.hpp"
#include "entrofunc/neighbor.hpp"
#include "entrofunc/oracle.hpp"
#include "entrofunc/rng.hpp"
#include "entrofunc/simulation.hpp"
#include "entrofunc/ustat.hpp"
#include "test_support.hpp"

using namespace entrofunc;

TEST_CASE("ball volume closed form") {
  CHECK(ball_volume(1, 0.5) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(ball_volume(2, 1.0) ==
        doctest::Approx(std::numbers::pi).epsilon(1e-14));
  // Gamma-function form evaluated independently: 4 pi / 3.
  CHECK(ball_volume(3, 1.0) ==
        doctest::Approx(4.1887902047863905).epsilon(1e-14));
  CHECK(ball_volume(3, 2.0) ==
        doctest::Approx(8.0 * 4.1887902047863905).epsilon(1e-14));
  CHECK_THROWS_AS(ball_volume(0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(ball_volume(1, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(ball_volume(1, -1.0), std::invalid_argument);
}

TEST_CASE("q_from_counts hand examples") {
  const Sample x = Sample::from_values({0.0, 0.1, 5.0}, Mode::continuous);
  const NeighborCounts counts = neighbor_counts(x, nullptr, 0.2);
  REQUIRE(counts.same == std::vector<std::uint32_t>{1, 1, 0});

  // Brute-force enumeration of all three 2-subsets gives 1/3.
  const QEstimate q = q_from_counts(counts, {2, 0});
  CHECK(q.value == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK_FALSE(q.normalized);

  // Empty indicator product: order (1,0) is identically 1.
  CHECK(q_from_counts(counts, {1, 0}).value == 1.0);
}

TEST_CASE("discrete pair counting example") {
  const Sample x = Sample::from_values({1, 1, 2}, Mode::discrete);
  const Sample y = Sample::from_values({1, 2, 2}, Mode::discrete);
  const QEstimate q = estimate_q_discrete(x, &y, {1, 1});
  // 4 matching pairs out of 9.
  CHECK(q.value == doctest::Approx(4.0 / 9.0).epsilon(1e-15));
  CHECK(q.epsilon == 0.0);
}

TEST_CASE("single-point discrete sample at order (1,0)") {
  const Sample x = Sample::from_values({7}, Mode::discrete);
  CHECK(estimate_q_discrete(x, nullptr, {1, 0}).value == 1.0);
}

TEST_CASE("cross-sample counts around each X point") {
  const Sample x = Sample::from_values({0.0}, Mode::continuous);
  const Sample y = Sample::from_values({0.1, 0.3}, Mode::continuous);
  const NeighborCounts counts = neighbor_counts(x, &y, 0.2);
  CHECK(counts.same == std::vector<std::uint32_t>{0});
  CHECK(counts.other == std::vector<std::uint32_t>{1});
}

TEST_CASE("estimate_q trivial cases") {
  SUBCASE("r2 = 0 ignores Y entirely") {
    SplitMix64 rng(7);
    const Sample x = test::random_cloud(rng, 20, 2);
    const Sample y1 = test::random_cloud(rng, 15, 2);
    const Sample y2 = test::random_cloud(rng, 5, 2, 10.0);
    const double a = estimate_q(x, &y1, {2, 0}, 0.3).value;
    const double b = estimate_q(x, &y2, {2, 0}, 0.3).value;
    const double c = estimate_q(x, nullptr, {2, 0}, 0.3).value;
    CHECK(a == b);
    CHECK(a == c);
  }

  SUBCASE("coincident sample saturates at 1 / ball volume") {
    const Sample x =
        Sample(std::vector<double>(30, 1.25), 1, Mode::continuous);
    const QEstimate q = estimate_q(x, nullptr, {2, 0}, 0.4);
    CHECK(q.value == doctest::Approx(1.0 / ball_volume(1, 0.4)).epsilon(1e-14));
  }

  SUBCASE("order (0, r2) swaps the samples") {
    SplitMix64 rng(11);
    const Sample x = test::random_cloud(rng, 10, 1);
    const Sample y = test::random_cloud(rng, 14, 1);
    const double swapped = estimate_q(x, &y, {0, 2}, 0.2).value;
    const double direct = estimate_q(y, &x, {2, 0}, 0.2).value;
    CHECK(swapped == direct);
  }

  SUBCASE("insufficient sample") {
    const Sample x = Sample::from_values({0.0, 1.0}, Mode::continuous);
    CHECK_THROWS_AS(estimate_q(x, nullptr, {3, 0}, 0.1),
                    InsufficientSampleError);
  }
}

TEST_CASE("closed form equals literal subset enumeration") {
  // The core identity: the per-point collapsed form must reproduce the
  // literal U-statistic on random instances, essentially exactly.
  const std::vector<FunctionalOrder> orders = {{2, 0}, {3, 0}, {1, 1},
                                               {2, 1}, {2, 2}, {0, 2}};
  SplitMix64 rng(20250811);
  for (int instance = 0; instance < 60; ++instance) {
    const FunctionalOrder order = orders[instance % orders.size()];
    const std::size_t d = 1 + instance % 3;
    const std::size_t n1 =
        std::max<std::size_t>(order.r1 + (order.r1 == 0 ? 1 : 0),
                              3 + static_cast<std::size_t>(
                                      rng.uniform01() * 10.0));
    const std::size_t n2 = std::max<std::size_t>(
        order.r2, 3 + static_cast<std::size_t>(rng.uniform01() * 10.0));
    const double eps = 0.05 + 0.5 * rng.uniform01();
    const Sample x = test::random_cloud(rng, n1, d);
    const Sample y = test::random_cloud(rng, n2, d);

    const double literal = brute_force_q(x, &y, order, eps);

    double collapsed;
    if (order.r1 == 0) {
      collapsed = q_from_counts(neighbor_counts(y, &x, eps), order.swapped())
                      .value;
    } else {
      collapsed =
          q_from_counts(neighbor_counts(x, order.r2 > 0 ? &y : nullptr, eps),
                        order)
              .value;
    }
    CHECK(collapsed == doctest::Approx(literal).epsilon(1e-12));
  }
}

TEST_CASE("raw estimate stays in [0,1] and is monotone in epsilon") {
  SplitMix64 rng(99);
  const Sample x = test::random_cloud(rng, 40, 2);
  const Sample y = test::random_cloud(rng, 30, 2);
  double previous = -1.0;
  for (double eps : {0.02, 0.05, 0.1, 0.2, 0.4, 0.8, 1.6}) {
    const double q =
        q_from_counts(neighbor_counts(x, &y, eps), {2, 1}).value;
    CHECK(q >= 0.0);
    CHECK(q <= 1.0);
    CHECK(q >= previous);
    previous = q;
  }
}

TEST_CASE("permutation invariance of the estimate") {
  SplitMix64 rng(123);
  const Sample x = test::random_cloud(rng, 25, 2);
  const Sample y = test::random_cloud(rng, 35, 2);
  const double base = estimate_q(x, &y, {2, 1}, 0.3).value;
  for (int trial = 0; trial < 10; ++trial) {
    const Sample xs = test::shuffled(x, rng);
    const Sample ys = test::shuffled(y, rng);
    const double permuted = estimate_q(xs, &ys, {2, 1}, 0.3).value;
    // Counts are identical as multisets; only summation order moves, and
    // the compensated reduction pins that below 1e-14 relative.
    CHECK(permuted == doctest::Approx(base).epsilon(1e-14));
  }
}

TEST_CASE("scale equivariance of raw counts and estimate") {
  SplitMix64 rng(321);
  const Sample x = test::random_cloud(rng, 30, 3);
  const Sample y = test::random_cloud(rng, 20, 3);
  const double eps = 0.25;
  const double base = q_from_counts(neighbor_counts(x, &y, eps), {2, 1}).value;
  for (double lambda : {0.5, 2.0, 3.0, 7.5}) {
    const Sample xs = test::scaled(x, lambda);
    const Sample ys = test::scaled(y, lambda);
    const double scaled_q =
        q_from_counts(neighbor_counts(xs, &ys, lambda * eps), {2, 1}).value;
    CHECK(scaled_q == base);
  }
}

TEST_CASE("raw statistic is unbiased for the coincidence probability") {
  // Independent quadrature oracle for E Q at finite epsilon, then a seeded
  // replication average.
  const DistributionSpec dist_x = Gaussian1D{0.0, 1.0};
  const DistributionSpec dist_y = Gaussian1D{1.0, 0.5};
  const FunctionalOrder order{2, 1};
  const double eps = 0.3;
  const double target = numeric_q_epsilon(dist_x, &dist_y, order, eps);

  const int replications = 2000;
  const std::size_t n1 = 12;
  const std::size_t n2 = 12;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int rep = 0; rep < replications; ++rep) {
    SplitMix64 rng(40000u + static_cast<unsigned>(rep));
    const Sample x = draw_sample(dist_x, n1, rng);
    const Sample y = draw_sample(dist_y, n2, rng);
    const double q = q_from_counts(neighbor_counts(x, &y, eps), order).value;
    sum += q;
    sum_sq += q * q;
  }
  const double mean = sum / replications;
  const double variance = sum_sq / replications - mean * mean;
  const double se = std::sqrt(variance / replications);
  CHECK(std::abs(mean - target) < 4.0 * se);
}
