#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "pmeta/effects.hpp"
#include "pmeta/rng.hpp"

// Scenario generators for the coverage experiments.  A scenario describes the
// joint distribution of (control rate, treatment rate); each simulated study
// draws a rate pair, then binomial event counts in two equal-size arms.

namespace pmeta {

enum class ScenarioKind { logit_normal, bivariate_beta, fixed };

struct Scenario {
  ScenarioKind kind = ScenarioKind::fixed;

  // logit_normal: (logit control rate, logit treatment rate) is bivariate
  // normal with mean eta and covariance sigma (row-major, PSD).
  std::array<double, 2> eta{0.0, 0.0};
  std::array<double, 4> sigma{0.0, 0.0, 0.0, 0.0};

  // bivariate_beta: rates P0 = G0/(G0+Gs), P1 = G1/(G1+Gs) built from
  // independent gammas with shapes (shape_ctl, shape_trt, shape_shared);
  // the shared divisor makes the rates positively dependent.
  std::array<double, 3> shapes{1.0, 1.0, 1.0};

  // fixed: every study has exactly these rates.
  double rate_ctl = 0.0;
  double rate_trt = 0.0;

  // Per-arm sample sizes: one entry used for all studies, or one per study.
  std::vector<long> sample_sizes{200};

  EffectMeasure measure;

  void validate(long k_studies) const;
  // Stable text form used in report provenance and oracle memoization.
  std::string describe() const;
};

struct RatePair {
  double ctl = 0.0;
  double trt = 0.0;
};

// One rate pair.  Draw order per call is fixed: logit_normal consumes two
// normals (control component first); bivariate_beta three gammas (control,
// treatment, shared); fixed consumes nothing.
RatePair draw_rate_pair(const Scenario& sc, rng::Pcg32& gen);

// The effect implied by a rate pair on the scenario's analysis scale.
double theta_of(const Scenario& sc, const RatePair& rates);

struct SimulatedMeta {
  std::vector<TwoByTwoTable> tables;  // all K studies, before any exclusion
  std::vector<double> true_thetas;    // study-level effects behind the tables
};

// Draws a K-study meta-analysis.  Per study: the rate pair, then the control
// arm count, then the treatment arm count, all from one generator seeded with
// Pcg32(seed, kStreamMetaDraw).
SimulatedMeta draw_meta(const Scenario& sc, long k_studies, std::uint64_t seed);

inline constexpr long kDefaultOracleDraws = 10000000;
inline constexpr std::uint64_t kDefaultOracleSeed = 20250101;

// Large-sample truth: the p-th percentile (or the mean) of the effect
// distribution, from `draws` simulated rate pairs.  Fixed scenarios are
// evaluated in closed form.  Results are memoized per (scenario, p, draws,
// seed), and identical across thread counts.
double true_percentile(const Scenario& sc, double p, long draws = kDefaultOracleDraws,
                       std::uint64_t seed = kDefaultOracleSeed);
double true_mean(const Scenario& sc, long draws = kDefaultOracleDraws,
                 std::uint64_t seed = kDefaultOracleSeed);

}  // namespace pmeta
