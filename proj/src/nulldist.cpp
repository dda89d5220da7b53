#include "pmeta/nulldist.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>

#include "pmeta/rng.hpp"
#include "pmeta/stats.hpp"

namespace pmeta {

namespace {

constexpr int kExactHardLimit = 24;

// Number of fixed mask ranges for parallel exact enumeration.  The partial
// sums are combined serially in range order, so results do not depend on the
// thread count.
constexpr long kExactChunks = 64;

void check_weights(std::span<const double> weights) {
  if (weights.empty()) throw std::invalid_argument("null distribution: no weights");
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw std::invalid_argument("null distribution: weights must be finite and >= 0");
    }
  }
}

void check_prob(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("null distribution: p must lie in [0,1]");
  }
}

// p^j * (1-p)^(K-j) for j = 0..K.
std::vector<double> pattern_probs_by_count(int k_studies, double p) {
  std::vector<double> out(static_cast<std::size_t>(k_studies) + 1);
  for (int j = 0; j <= k_studies; ++j) {
    out[j] = std::pow(p, j) * std::pow(1.0 - p, k_studies - j);
  }
  return out;
}

double pattern_value(std::span<const double> weights, std::uint64_t mask) {
  double s = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    s += (mask >> k) & 1u ? weights[k] : -weights[k];
  }
  return s;
}

// Sorts (value, prob) atoms and merges values equal up to kTailTolerance,
// anchoring each group at its first member.
NullLaw merge_atoms(std::vector<std::pair<double, double>> atoms, NullKind kind) {
  std::sort(atoms.begin(), atoms.end());
  NullLaw law;
  law.kind = kind;
  std::size_t i = 0;
  while (i < atoms.size()) {
    const double anchor = atoms[i].first;
    long double mass = 0.0L;
    std::size_t j = i;
    while (j < atoms.size() && atoms[j].first - anchor <= kTailTolerance) {
      mass += atoms[j].second;
      ++j;
    }
    law.support.push_back(anchor);
    law.probs.push_back(static_cast<double>(mass));
    i = j;
  }
  return law;
}

}  // namespace

SignMatrix make_sign_matrix(long k_studies, double p, long n_resamples, std::uint64_t seed) {
  if (k_studies < 1) throw std::invalid_argument("make_sign_matrix: need at least one study");
  if (n_resamples < 1) throw std::invalid_argument("make_sign_matrix: need at least one row");
  check_prob(p);
  SignMatrix m;
  m.rows = n_resamples;
  m.cols = k_studies;
  m.prob_plus = p;
  m.seed = seed;
  m.entries.resize(static_cast<std::size_t>(n_resamples) * k_studies);
  rng::Pcg32 gen(seed, rng::kStreamSignMatrix);
  for (std::size_t i = 0; i < m.entries.size(); ++i) {
    m.entries[i] = gen.next_double() < p ? 1.0 : -1.0;
  }
  return m;
}

NullLaw null_exact(std::span<const double> weights, double p) {
  check_weights(weights);
  check_prob(p);
  const int K = static_cast<int>(weights.size());
  if (K > kExactHardLimit) {
    throw std::invalid_argument("null_exact: too many studies for enumeration");
  }
  const auto prob_by_count = pattern_probs_by_count(K, p);
  const std::uint64_t n_patterns = std::uint64_t{1} << K;
  std::vector<std::pair<double, double>> atoms;
  atoms.reserve(n_patterns);
  for (std::uint64_t mask = 0; mask < n_patterns; ++mask) {
    atoms.emplace_back(pattern_value(weights, mask),
                       prob_by_count[std::popcount(mask)]);
  }
  return merge_atoms(std::move(atoms), NullKind::exact_enumeration);
}

NullLaw null_binomial(long k_studies, double p) {
  if (k_studies < 1) throw std::invalid_argument("null_binomial: need at least one study");
  check_prob(p);
  NullLaw law;
  law.kind = NullKind::binomial_lattice;
  for (long j = 0; j <= k_studies; ++j) {
    const double pr = stats::binomial_pmf(j, k_studies, p);
    if (pr > 0.0) {
      law.support.push_back(static_cast<double>(2 * j - k_studies));
      law.probs.push_back(pr);
    }
  }
  return law;
}

std::vector<double> resample_values_serial(std::span<const double> weights,
                                           const SignMatrix& signs) {
  const long n = signs.rows;
  const long K = signs.cols;
  std::vector<double> out(static_cast<std::size_t>(n));
  for (long r = 0; r < n; ++r) {
    const double* row = signs.row(r);
    double s = 0.0;
    for (long k = 0; k < K; ++k) s += weights[k] * row[k];
    out[r] = s;
  }
  return out;
}

std::vector<double> resample_values(std::span<const double> weights, const SignMatrix& signs) {
  const long n = signs.rows;
  const long K = signs.cols;
  std::vector<double> out(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static)
  for (long r = 0; r < n; ++r) {
    const double* row = signs.row(r);
    double s = 0.0;
    for (long k = 0; k < K; ++k) s += weights[k] * row[k];
    out[r] = s;
  }
  return out;
}

NullLaw null_mc(std::span<const double> weights, const SignMatrix& signs) {
  check_weights(weights);
  if (static_cast<long>(weights.size()) != signs.cols) {
    throw std::invalid_argument("null_mc: weight count does not match matrix columns");
  }
  const auto values = resample_values(weights, signs);
  std::vector<std::pair<double, double>> atoms;
  atoms.reserve(values.size());
  const double unit = 1.0 / static_cast<double>(signs.rows);
  for (double v : values) atoms.emplace_back(v, unit);
  NullLaw law = merge_atoms(std::move(atoms), NullKind::monte_carlo);
  law.n_resamples = signs.rows;
  law.seed = signs.seed;
  return law;
}

double tail_prob(const NullLaw& law, double t, TailSide side) {
  double total = 0.0;
  if (side == TailSide::le) {
    const double bound = t + kTailTolerance;
    for (std::size_t i = 0; i < law.support.size(); ++i) {
      if (law.support[i] <= bound) total += law.probs[i];
    }
  } else {
    const double bound = t - kTailTolerance;
    for (std::size_t i = 0; i < law.support.size(); ++i) {
      if (law.support[i] >= bound) total += law.probs[i];
    }
  }
  return std::min(total, 1.0);
}

TailPair exact_tails(std::span<const double> weights, double p, double t) {
  check_weights(weights);
  check_prob(p);
  const int K = static_cast<int>(weights.size());
  if (K > kExactHardLimit) {
    throw std::invalid_argument("exact_tails: too many studies for enumeration");
  }
  const auto prob_by_count = pattern_probs_by_count(K, p);
  const std::uint64_t n_patterns = std::uint64_t{1} << K;
  const double le_bound = t + kTailTolerance;
  const double ge_bound = t - kTailTolerance;

  if (n_patterns <= static_cast<std::uint64_t>(kExactChunks)) {
    double le = 0.0;
    double ge = 0.0;
    for (std::uint64_t mask = 0; mask < n_patterns; ++mask) {
      const double v = pattern_value(weights, mask);
      const double pr = prob_by_count[std::popcount(mask)];
      if (v <= le_bound) le += pr;
      if (v >= ge_bound) ge += pr;
    }
    return {std::min(le, 1.0), std::min(ge, 1.0)};
  }

  const std::uint64_t per_chunk = n_patterns / kExactChunks;
  double le_part[kExactChunks];
  double ge_part[kExactChunks];
#pragma omp parallel for schedule(static)
  for (long c = 0; c < kExactChunks; ++c) {
    const std::uint64_t begin = per_chunk * static_cast<std::uint64_t>(c);
    const std::uint64_t end =
        c + 1 == kExactChunks ? n_patterns : begin + per_chunk;
    double le = 0.0;
    double ge = 0.0;
    for (std::uint64_t mask = begin; mask < end; ++mask) {
      const double v = pattern_value(weights, mask);
      const double pr = prob_by_count[std::popcount(mask)];
      if (v <= le_bound) le += pr;
      if (v >= ge_bound) ge += pr;
    }
    le_part[c] = le;
    ge_part[c] = ge;
  }
  double le = 0.0;
  double ge = 0.0;
  for (long c = 0; c < kExactChunks; ++c) {
    le += le_part[c];
    ge += ge_part[c];
  }
  return {std::min(le, 1.0), std::min(ge, 1.0)};
}

TailPair mc_tails_serial(std::span<const double> weights, const SignMatrix& signs, double t) {
  const long n = signs.rows;
  const long K = signs.cols;
  const double le_bound = t + kTailTolerance;
  const double ge_bound = t - kTailTolerance;
  long le = 0;
  long ge = 0;
  for (long r = 0; r < n; ++r) {
    const double* row = signs.row(r);
    double s = 0.0;
    for (long k = 0; k < K; ++k) s += weights[k] * row[k];
    le += s <= le_bound ? 1 : 0;
    ge += s >= ge_bound ? 1 : 0;
  }
  const double dn = static_cast<double>(n);
  return {static_cast<double>(le) / dn, static_cast<double>(ge) / dn};
}

TailPair mc_tails(std::span<const double> weights, const SignMatrix& signs, double t) {
  if (static_cast<long>(weights.size()) != signs.cols) {
    throw std::invalid_argument("mc_tails: weight count does not match matrix columns");
  }
  const long n = signs.rows;
  const long K = signs.cols;
  const double le_bound = t + kTailTolerance;
  const double ge_bound = t - kTailTolerance;
  long le = 0;
  long ge = 0;
#pragma omp parallel for schedule(static) reduction(+ : le, ge)
  for (long r = 0; r < n; ++r) {
    const double* row = signs.row(r);
    double s = 0.0;
    for (long k = 0; k < K; ++k) s += weights[k] * row[k];
    le += s <= le_bound ? 1 : 0;
    ge += s >= ge_bound ? 1 : 0;
  }
  const double dn = static_cast<double>(n);
  return {static_cast<double>(le) / dn, static_cast<double>(ge) / dn};
}

}  // namespace pmeta
