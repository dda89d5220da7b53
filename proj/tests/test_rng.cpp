#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <vector>

#include "pmeta/rng.hpp"

using pmeta::rng::derive_seed;
using pmeta::rng::Pcg32;
using pmeta::rng::sample_binomial;
using pmeta::rng::sample_gamma;
using pmeta::rng::sample_normal;

TEST_CASE("pcg32 reproduces the reference stream for seed 42, stream 54") {
  Pcg32 gen(42, 54);
  CHECK(gen.next_u32() == 0xa15c02b7u);
  CHECK(gen.next_u32() == 0x7b47f409u);
  CHECK(gen.next_u32() == 0xba1d3330u);
  CHECK(gen.next_u32() == 0x83d2f293u);
  CHECK(gen.next_u32() == 0xbfa4784bu);
  CHECK(gen.next_u32() == 0xcbed606eu);
}

TEST_CASE("pcg32 streams with the same seed do not collide") {
  Pcg32 a(7, 1);
  Pcg32 b(7, 2);
  int differing = 0;
  for (int i = 0; i < 16; ++i) {
    if (a.next_u32() != b.next_u32()) ++differing;
  }
  CHECK(differing >= 15);
}

TEST_CASE("derive_seed is deterministic and injective on small indices") {
  CHECK(derive_seed(123, 0) == derive_seed(123, 0));
  std::vector<std::uint64_t> seen;
  for (std::uint64_t i = 0; i < 1000; ++i) seen.push_back(derive_seed(99, i));
  for (std::size_t i = 1; i < seen.size(); ++i) {
    CHECK(seen[i] != seen[0]);
  }
  CHECK(derive_seed(1, 5) != derive_seed(2, 5));
}

TEST_CASE("uniform draws stay inside their documented ranges") {
  Pcg32 gen(2024);
  for (int i = 0; i < 20000; ++i) {
    const double u = gen.next_double();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double v = gen.next_open();
    CHECK(v > 0.0);
    CHECK(v < 1.0);
  }
}

TEST_CASE("sample_normal moments match the standard normal") {
  Pcg32 gen(5);
  const int n = 100000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = sample_normal(gen);
    sum += z;
    sumsq += z * z;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  CHECK(std::fabs(mean) < 4.0 / std::sqrt(static_cast<double>(n)));
  CHECK(var == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("sample_gamma moments match for shapes above and below one") {
  const int n = 100000;
  for (const double shape : {0.5, 2.0, 8.0}) {
    Pcg32 gen(31 + static_cast<std::uint64_t>(shape * 10));
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double g = sample_gamma(gen, shape);
      CHECK(g > 0.0);
      sum += g;
      sumsq += g * g;
    }
    const double mean = sum / n;
    const double var = sumsq / n - mean * mean;
    CHECK(mean == doctest::Approx(shape).epsilon(0.02));
    CHECK(var == doctest::Approx(shape).epsilon(0.08));
  }
}

TEST_CASE("sample_binomial edge probabilities are exact") {
  Pcg32 gen(9);
  for (int i = 0; i < 50; ++i) {
    CHECK(sample_binomial(gen, 12, 1.0) == 12);
    CHECK(sample_binomial(gen, 12, 0.0) == 0);
  }
}

TEST_CASE("sample_binomial consumes a fixed number of uniforms") {
  Pcg32 a(77);
  Pcg32 b(77);
  (void)sample_binomial(a, 7, 0.3);
  for (int i = 0; i < 7; ++i) (void)b.next_double();
  CHECK(a.next_u32() == b.next_u32());
}

TEST_CASE("sample_binomial mean matches n*p") {
  Pcg32 gen(13);
  const int reps = 20000;
  long total = 0;
  for (int i = 0; i < reps; ++i) total += sample_binomial(gen, 50, 0.4);
  const double mean = static_cast<double>(total) / reps;
  CHECK(mean == doctest::Approx(20.0).epsilon(0.01));
}
