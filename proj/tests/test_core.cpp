#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "pmeta/core_test.hpp"
#include "pmeta/stats.hpp"
#include "test_util.hpp"

using namespace pmeta;
using testutil::make_dataset;
using testutil::random_dataset;

TEST_CASE("sign_weight matches the normal CDF distance from one half") {
  CHECK(sign_weight(1.0, 1.0, 1.0) == 0.0);
  CHECK(sign_weight(0.0, 0.0, 1.0) == 0.5);
  CHECK(sign_weight(0.0, 0.0, 0.0) == 0.0);
  CHECK(sign_weight(0.0, 1.0, 1.959964) == doctest::Approx(0.475).epsilon(1e-6));
  CHECK(sign_weight(3.0, 2.0, 1.0) ==
        doctest::Approx(std::fabs(stats::normal_cdf(-1.0) - 0.5)).epsilon(1e-15));
  CHECK_THROWS_AS(sign_weight(0.0, -1.0, 0.0), std::invalid_argument);
}

TEST_CASE("sign_weight stays in [0, 1/2]") {
  rng::Pcg32 gen(3);
  for (int i = 0; i < 2000; ++i) {
    const double w = sign_weight(4.0 * gen.next_double() - 2.0, 2.0 * gen.next_double(),
                                 4.0 * gen.next_double() - 2.0);
    CHECK(w >= 0.0);
    CHECK(w <= 0.5);
  }
}

TEST_CASE("weighted statistic reproduces the hand-computed example") {
  const auto d = make_dataset({-1.0, 0.0, 2.0}, {1.0, 1.0, 1.0});
  const auto s = statistic_weighted(d, 0.0);
  CHECK(s.value == doctest::Approx(-0.13590512198327784).epsilon(1e-12));
  CHECK(s.value == doctest::Approx(-0.135905).epsilon(1e-5));
  REQUIRE(s.signs.size() == 3);
  CHECK(s.signs[0] == 1);
  CHECK(s.signs[1] == 0);
  CHECK(s.signs[2] == -1);
  CHECK(s.weights[1] == 0.0);
}

TEST_CASE("weighted statistic vanishes at ties and symmetric configurations") {
  const auto tied = make_dataset({0.7, 0.7, 0.7}, {1.0, 2.0, 0.5});
  CHECK(statistic_weighted(tied, 0.7).value == 0.0);
  const auto sym = make_dataset({-1.5, 1.5}, {0.8, 0.8});
  CHECK(statistic_weighted(sym, 0.0).value == 0.0);
}

TEST_CASE("weighted statistic equals the signed CDF sum when all SEs are positive") {
  rng::Pcg32 gen(17);
  for (int rep = 0; rep < 50; ++rep) {
    const auto d = random_dataset(6, gen);
    const double mu0 = -2.5 + 5.0 * gen.next_double();
    double direct = 0.0;
    for (const auto& s : d.studies) {
      direct += stats::normal_cdf((mu0 - s.theta_hat) / s.sigma_hat) - 0.5;
    }
    CHECK(statistic_weighted(d, mu0).value == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("weighted statistic is strictly increasing in mu0") {
  rng::Pcg32 gen(29);
  const auto d = random_dataset(8, gen);
  double prev = statistic_weighted(d, -4.0).value;
  for (int i = 1; i <= 80; ++i) {
    const double mu0 = -4.0 + 8.0 * i / 80.0;
    const double cur = statistic_weighted(d, mu0).value;
    CHECK(cur > prev);
    prev = cur;
  }
}

TEST_CASE("statistic magnitudes respect their bounds") {
  rng::Pcg32 gen(41);
  for (int rep = 0; rep < 30; ++rep) {
    const long k = 3 + static_cast<long>(gen.next_double() * 8);
    const auto d = random_dataset(k, gen);
    const double mu0 = -6.0 + 12.0 * gen.next_double();
    CHECK(std::fabs(statistic_weighted(d, mu0).value) <= k / 2.0 + 1e-12);
    CHECK(std::fabs(statistic_unweighted(d, mu0).value) <= static_cast<double>(k));
  }
}

TEST_CASE("unweighted statistic counts signs with unit weights") {
  const auto d1 = make_dataset({-1.0, 0.0, 2.0}, {1.0, 1.0, 1.0});
  const auto s1 = statistic_unweighted(d1, 0.0);
  CHECK(s1.value == 0.0);
  CHECK(s1.weights == std::vector<double>{1.0, 1.0, 1.0});

  const auto d2 = make_dataset({1.0, 2.0, 3.0}, {1.0, 1.0, 1.0});
  CHECK(statistic_unweighted(d2, 0.0).value == -3.0);

  const auto d3 = make_dataset({0.1, 0.4, 0.9, 1.2}, {1.0, 1.0, 1.0, 1.0});
  CHECK(statistic_unweighted(d3, 0.5).value == 0.0);
}

TEST_CASE("both statistics are affine equivariant") {
  // Dyadic inputs make the transformed evaluation bit-identical.
  const std::vector<double> thetas{-1.25, 0.5, 2.75, 0.25};
  const std::vector<double> sigmas{0.5, 1.5, 2.0, 0.25};
  const double a = 2.0, b = 3.0, mu0 = 0.25;
  std::vector<double> t2, s2;
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    t2.push_back(a * thetas[i] + b);
    s2.push_back(a * sigmas[i]);
  }
  const auto orig = make_dataset(thetas, sigmas);
  const auto mapped = make_dataset(t2, s2);
  CHECK(statistic_weighted(mapped, a * mu0 + b).value ==
        statistic_weighted(orig, mu0).value);
  CHECK(statistic_unweighted(mapped, a * mu0 + b).value ==
        statistic_unweighted(orig, mu0).value);
}

TEST_CASE("shrinking the SEs drives the weighted statistic to half the sign count") {
  const std::vector<double> thetas{-1.2, -0.3, 0.4, 1.1, 2.2};
  const std::vector<double> base_se{1.0, 2.0, 1.5, 0.7, 1.3};
  const double mu0 = 0.05;
  const auto ref = make_dataset(thetas, base_se);
  const double target = statistic_unweighted(ref, mu0).value / 2.0;

  double prev_gap = 1e100;
  for (const double eps : {1e-2, 1e-4, 1e-6}) {
    std::vector<double> sig;
    for (const double s : base_se) sig.push_back(s * eps);
    const double got = statistic_weighted(make_dataset(thetas, sig), mu0).value;
    const double gap = std::fabs(got - target);
    CHECK(gap <= prev_gap);
    prev_gap = gap;
  }
  CHECK(prev_gap < 1e-9);
}
