#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>

#include "oracle_norm.hpp"
#include "pmeta/stats.hpp"

using pmeta::stats::betainc;
using pmeta::stats::binomial_pmf;
using pmeta::stats::log_beta;
using pmeta::stats::normal_cdf;
using pmeta::stats::normal_pdf;
using pmeta::stats::normal_quantile;
using pmeta::stats::t_cdf;
using pmeta::stats::t_quantile;

namespace {
const double kInf = std::numeric_limits<double>::infinity();
}

// The test oracle itself is pinned against an independent high-precision
// evaluation before anything else trusts it.
TEST_CASE("oracle normal cdf matches high-precision reference values") {
  struct Spot {
    long double z;
    long double phi;
  };
  const Spot spots[] = {
      {-7.5L, 3.190891672910896227767e-14L},
      {-3.25L, 0.0005770250423907670429169L},
      {-1.0L, 0.1586552539314570514148L},
      {0.0L, 0.5L},
      {0.5L, 0.6914624612740131036377L},
      {2.0L, 0.9772498680518207927997L},
      {4.75L, 0.9999989829167574312968L},
  };
  for (const auto& s : spots) {
    const long double got = oracle::normal_cdf(s.z);
    CHECK(std::fabs(got - s.phi) <= 1e-17L + 1e-16L * std::fabs(s.phi));
  }
}

TEST_CASE("normal_cdf spot values and limits") {
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(normal_cdf(kInf) == 1.0);
  CHECK(normal_cdf(-kInf) == 0.0);
  CHECK(normal_cdf(1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-15));
  CHECK(std::isnan(normal_cdf(std::numeric_limits<double>::quiet_NaN())));
}

TEST_CASE("normal_cdf within 1e-12 of the oracle across [-8, 8]") {
  double worst = 0.0;
  for (int i = 0; i <= 10000; ++i) {
    const double z = -8.0 + 16.0 * i / 10000.0;
    const double err = std::fabs(normal_cdf(z) - static_cast<double>(oracle::normal_cdf(z)));
    worst = std::max(worst, err);
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("normal_cdf is nondecreasing and symmetric") {
  double prev = 0.0;
  for (int i = 0; i <= 400; ++i) {
    const double z = -10.0 + 20.0 * i / 400.0;
    const double v = normal_cdf(z);
    CHECK(v >= prev);
    prev = v;
    CHECK(normal_cdf(z) + normal_cdf(-z) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("normal_pdf spot value") {
  CHECK(normal_pdf(0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-15));
  CHECK(normal_pdf(2.0) == doctest::Approx(0.05399096651318806).epsilon(1e-14));
}

TEST_CASE("normal_quantile round trips and pins z_{0.975}") {
  CHECK(normal_quantile(0.5) == 0.0);
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-14));
  CHECK(normal_quantile(0.025) == doctest::Approx(-1.959963984540054).epsilon(1e-14));
  for (int i = 1; i < 100; ++i) {
    const double p = i / 100.0;
    CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-12));
  }
  CHECK_THROWS_AS(normal_quantile(0.0), std::domain_error);
  CHECK_THROWS_AS(normal_quantile(1.0), std::domain_error);
}

TEST_CASE("betainc edge cases and a closed-form polynomial case") {
  CHECK(betainc(2.0, 3.0, 0.0) == 0.0);
  CHECK(betainc(2.0, 3.0, 1.0) == 1.0);
  // I_x(2,3) = 6x^2 - 8x^3 + 3x^4.
  for (const double x : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const double want = 6 * x * x - 8 * x * x * x + 3 * x * x * x * x;
    CHECK(betainc(2.0, 3.0, x) == doctest::Approx(want).epsilon(1e-13));
  }
}

TEST_CASE("log_beta spot value") {
  CHECK(log_beta(2.0, 3.0) == doctest::Approx(-2.4849066497880004).epsilon(1e-14));
}

TEST_CASE("t_cdf symmetry and center") {
  for (const double nu : {1.0, 4.0, 39.0}) {
    CHECK(t_cdf(0.0, nu) == doctest::Approx(0.5).epsilon(1e-14));
    for (const double t : {0.3, 1.0, 2.5, 6.0}) {
      CHECK(t_cdf(t, nu) + t_cdf(-t, nu) == doctest::Approx(1.0).epsilon(1e-13));
    }
  }
}

TEST_CASE("t_quantile pins published two-sided critical values") {
  CHECK(t_quantile(0.975, 1) == doctest::Approx(12.706204736432095).epsilon(1e-10));
  CHECK(t_quantile(0.975, 2) == doctest::Approx(4.302652729696142).epsilon(1e-10));
  CHECK(t_quantile(0.975, 5) == doctest::Approx(2.570581835636314).epsilon(1e-10));
  CHECK(t_quantile(0.975, 10) == doctest::Approx(2.2281388519649385).epsilon(1e-10));
  CHECK(t_quantile(0.975, 39) == doctest::Approx(2.0226909200367604).epsilon(1e-10));
  CHECK(t_quantile(0.95, 9) == doctest::Approx(1.8331129326536335).epsilon(1e-10));
  CHECK(t_quantile(0.5, 7) == doctest::Approx(0.0).epsilon(1e-12));
  for (const double nu : {1.0, 3.0, 30.0}) {
    for (const double p : {0.05, 0.2, 0.5, 0.8, 0.99}) {
      CHECK(t_cdf(t_quantile(p, nu), nu) == doctest::Approx(p).epsilon(1e-9));
    }
  }
}

TEST_CASE("binomial_pmf matches coefficients and handles edge probabilities") {
  const double want[] = {1.0 / 16, 4.0 / 16, 6.0 / 16, 4.0 / 16, 1.0 / 16};
  double total = 0.0;
  for (long k = 0; k <= 4; ++k) {
    CHECK(binomial_pmf(k, 4, 0.5) == doctest::Approx(want[k]).epsilon(1e-14));
    total += binomial_pmf(k, 4, 0.5);
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(binomial_pmf(0, 10, 0.0) == 1.0);
  CHECK(binomial_pmf(3, 10, 0.0) == 0.0);
  CHECK(binomial_pmf(10, 10, 1.0) == 1.0);
  CHECK(binomial_pmf(9, 10, 1.0) == 0.0);
  CHECK(binomial_pmf(-1, 4, 0.5) == 0.0);
  CHECK(binomial_pmf(5, 4, 0.5) == 0.0);
}
