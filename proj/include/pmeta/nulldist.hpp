#pragma once

#include <cstdint>
#include <span>
#include <vector>

// Null distributions of the sign statistic, conditional on the weights.
// Under the null the signs are independent +1/-1 multipliers with success
// probability p, so the statistic is a weighted sum of random signs.  Small
// study counts admit exact enumeration over all 2^K sign patterns; larger
// ones use Monte Carlo over a resampled sign matrix.  The unweighted
// statistic has the closed-form lattice law 2*Bin(K, p) - K.

namespace pmeta {

inline constexpr int kDefaultExactThreshold = 20;
inline constexpr long kDefaultResamples = 100000;

// Absolute slack when comparing statistic values, so that tail probabilities
// treat values equal up to accumulated rounding as ties.
inline constexpr double kTailTolerance = 1e-12;

enum class NullKind { exact_enumeration, binomial_lattice, monte_carlo };

struct NullLaw {
  std::vector<double> support;  // strictly increasing
  std::vector<double> probs;    // same length, each > 0, summing to 1
  NullKind kind = NullKind::exact_enumeration;
  long n_resamples = 0;   // monte_carlo only
  std::uint64_t seed = 0; // monte_carlo only
};

// A matrix of resampled sign patterns: n_resamples rows by K columns of
// +1.0/-1.0, generated row by row from Pcg32(seed, kStreamSignMatrix).
// Entry (r, k) is +1 when the (r*K + k)-th uniform falls below prob_plus.
struct SignMatrix {
  long rows = 0;
  long cols = 0;
  double prob_plus = 0.5;
  std::uint64_t seed = 0;
  std::vector<double> entries;  // row-major

  double at(long r, long k) const { return entries[static_cast<std::size_t>(r) * cols + k]; }
  const double* row(long r) const { return entries.data() + static_cast<std::size_t>(r) * cols; }
};

SignMatrix make_sign_matrix(long k_studies, double p, long n_resamples, std::uint64_t seed);

// Exact law by enumeration of all 2^K sign patterns.  K is capped at 24.
NullLaw null_exact(std::span<const double> weights, double p);

// Lattice law of the unweighted statistic: support {2j - K}, j = 0..K.
NullLaw null_binomial(long k_studies, double p);

// Empirical law of the weighted statistic over the rows of a sign matrix.
NullLaw null_mc(std::span<const double> weights, const SignMatrix& signs);

enum class TailSide { le, ge };

// P(T <= t) or P(T >= t) under a law, with kTailTolerance slack.
double tail_prob(const NullLaw& law, double t, TailSide side);

// Tail pair evaluated without materializing a law; these are the hot paths
// for interval inversion.
struct TailPair {
  double le = 0.0;
  double ge = 0.0;
};

TailPair exact_tails(std::span<const double> weights, double p, double t);
TailPair mc_tails(std::span<const double> weights, const SignMatrix& signs, double t);
TailPair mc_tails_serial(std::span<const double> weights, const SignMatrix& signs, double t);

// Row sums weight . sign_row for every row of the matrix.  The parallel and
// serial versions produce bitwise-identical output.
std::vector<double> resample_values(std::span<const double> weights, const SignMatrix& signs);
std::vector<double> resample_values_serial(std::span<const double> weights,
                                           const SignMatrix& signs);

}  // namespace pmeta
