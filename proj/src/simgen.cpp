#include "pmeta/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <mutex>
#include <stdexcept>

namespace pmeta {

namespace {

double expit(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Lower Cholesky factor of the 2x2 covariance; tolerates the PSD boundary
// (zero variance in either component).
struct Chol2 {
  double c00 = 0.0;
  double c10 = 0.0;
  double c11 = 0.0;
};

Chol2 cholesky2(const std::array<double, 4>& sigma) {
  const double s00 = sigma[0];
  const double s01 = sigma[1];
  const double s10 = sigma[2];
  const double s11 = sigma[3];
  if (s01 != s10) throw std::invalid_argument("scenario: covariance must be symmetric");
  if (!(s00 >= 0.0) || !(s11 >= 0.0)) {
    throw std::invalid_argument("scenario: variances must be nonnegative");
  }
  Chol2 c;
  c.c00 = std::sqrt(s00);
  if (s00 > 0.0) {
    c.c10 = s01 / c.c00;
  } else if (s01 != 0.0) {
    throw std::invalid_argument("scenario: covariance is not positive semidefinite");
  }
  const double rem = s11 - c.c10 * c.c10;
  if (rem < -1e-12 * std::max(1.0, s11)) {
    throw std::invalid_argument("scenario: covariance is not positive semidefinite");
  }
  c.c11 = std::sqrt(std::max(rem, 0.0));
  return c;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

}  // namespace

void Scenario::validate(long k_studies) const {
  if (sample_sizes.empty()) {
    throw std::invalid_argument("scenario: sample_sizes must not be empty");
  }
  if (k_studies > 0 && sample_sizes.size() != 1 &&
      static_cast<long>(sample_sizes.size()) != k_studies) {
    throw std::invalid_argument(
        "scenario: sample_sizes must have one entry or one per study");
  }
  for (long n : sample_sizes) {
    if (n < 1) throw std::invalid_argument("scenario: arm sizes must be at least 1");
  }
  if (measure.kind == MeasureKind::log_hazard_ratio) {
    throw std::invalid_argument("scenario: simulated tables support log-rr and rd only");
  }
  switch (kind) {
    case ScenarioKind::logit_normal:
      cholesky2(sigma);
      break;
    case ScenarioKind::bivariate_beta:
      for (double a : shapes) {
        if (!(a > 0.0)) throw std::invalid_argument("scenario: gamma shapes must be positive");
      }
      break;
    case ScenarioKind::fixed:
      if (!(rate_ctl > 0.0 && rate_ctl < 1.0 && rate_trt > 0.0 && rate_trt < 1.0)) {
        throw std::invalid_argument("scenario: fixed rates must lie strictly in (0,1)");
      }
      break;
  }
}

std::string Scenario::describe() const {
  std::string out;
  switch (kind) {
    case ScenarioKind::logit_normal:
      out = "logit-normal eta=(" + fmt(eta[0]) + "," + fmt(eta[1]) + ") sigma=(" +
            fmt(sigma[0]) + "," + fmt(sigma[1]) + "," + fmt(sigma[2]) + "," + fmt(sigma[3]) +
            ")";
      break;
    case ScenarioKind::bivariate_beta:
      out = "bivariate-beta shapes=(" + fmt(shapes[0]) + "," + fmt(shapes[1]) + "," +
            fmt(shapes[2]) + ")";
      break;
    case ScenarioKind::fixed:
      out = "fixed rates=(" + fmt(rate_ctl) + "," + fmt(rate_trt) + ")";
      break;
  }
  out += " measure=";
  out += measure.flag();
  return out;
}

RatePair draw_rate_pair(const Scenario& sc, rng::Pcg32& gen) {
  switch (sc.kind) {
    case ScenarioKind::logit_normal: {
      const Chol2 c = cholesky2(sc.sigma);
      const double z0 = rng::sample_normal(gen);
      const double z1 = rng::sample_normal(gen);
      const double l0 = sc.eta[0] + c.c00 * z0;
      const double l1 = sc.eta[1] + c.c10 * z0 + c.c11 * z1;
      return {expit(l0), expit(l1)};
    }
    case ScenarioKind::bivariate_beta: {
      const double g_ctl = rng::sample_gamma(gen, sc.shapes[0]);
      const double g_trt = rng::sample_gamma(gen, sc.shapes[1]);
      const double g_shared = rng::sample_gamma(gen, sc.shapes[2]);
      return {g_ctl / (g_ctl + g_shared), g_trt / (g_trt + g_shared)};
    }
    case ScenarioKind::fixed:
      return {sc.rate_ctl, sc.rate_trt};
  }
  throw std::logic_error("draw_rate_pair: unreachable");
}

double theta_of(const Scenario& sc, const RatePair& rates) {
  if (sc.measure.kind == MeasureKind::risk_difference) {
    return rates.trt - rates.ctl;
  }
  return std::log(rates.trt / rates.ctl);
}

SimulatedMeta draw_meta(const Scenario& sc, long k_studies, std::uint64_t seed) {
  if (k_studies < 1) throw std::invalid_argument("draw_meta: need at least one study");
  sc.validate(k_studies);
  SimulatedMeta out;
  out.tables.reserve(k_studies);
  out.true_thetas.reserve(k_studies);
  rng::Pcg32 gen(seed, rng::kStreamMetaDraw);
  for (long k = 0; k < k_studies; ++k) {
    const RatePair rates = draw_rate_pair(sc, gen);
    const long n = sc.sample_sizes.size() == 1
                       ? sc.sample_sizes[0]
                       : sc.sample_sizes[static_cast<std::size_t>(k)];
    TwoByTwoTable t;
    t.study_id = "s" + std::to_string(k + 1);
    t.events_ctl = rng::sample_binomial(gen, n, rates.ctl);
    t.n_ctl = n;
    t.events_trt = rng::sample_binomial(gen, n, rates.trt);
    t.n_trt = n;
    out.tables.push_back(std::move(t));
    out.true_thetas.push_back(theta_of(sc, rates));
  }
  return out;
}

namespace {

// Simulated effect draws, filled in fixed-size chunks with per-chunk derived
// seeds so the result is independent of the thread count.
std::vector<double> oracle_draws_vec(const Scenario& sc, long draws, std::uint64_t seed) {
  constexpr long kChunk = 16384;
  const long n_chunks = (draws + kChunk - 1) / kChunk;
  std::vector<double> thetas(static_cast<std::size_t>(draws));
#pragma omp parallel for schedule(static)
  for (long c = 0; c < n_chunks; ++c) {
    rng::Pcg32 gen(rng::derive_seed(seed, static_cast<std::uint64_t>(c)),
                   rng::kStreamOracle);
    const long begin = c * kChunk;
    const long end = std::min(draws, begin + kChunk);
    for (long i = begin; i < end; ++i) {
      thetas[i] = theta_of(sc, draw_rate_pair(sc, gen));
    }
  }
  return thetas;
}

std::mutex g_oracle_mutex;
std::map<std::string, double> g_oracle_cache;

std::string oracle_key(const Scenario& sc, const char* what, double p, long draws,
                       std::uint64_t seed) {
  return sc.describe() + "|" + what + "|" + fmt(p) + "|" + std::to_string(draws) + "|" +
         std::to_string(seed);
}

}  // namespace

double true_percentile(const Scenario& sc, double p, long draws, std::uint64_t seed) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("true_percentile: p must lie strictly in (0,1)");
  }
  sc.validate(0);
  if (sc.kind == ScenarioKind::fixed) {
    return theta_of(sc, {sc.rate_ctl, sc.rate_trt});
  }
  if (draws < 1) throw std::invalid_argument("true_percentile: draws must be positive");
  const std::string key = oracle_key(sc, "pct", p, draws, seed);
  {
    std::lock_guard<std::mutex> lock(g_oracle_mutex);
    auto it = g_oracle_cache.find(key);
    if (it != g_oracle_cache.end()) return it->second;
  }
  std::vector<double> thetas = oracle_draws_vec(sc, draws, seed);
  const long rank = std::clamp(
      static_cast<long>(std::ceil(p * static_cast<double>(draws))), 1L, draws);
  std::nth_element(thetas.begin(), thetas.begin() + (rank - 1), thetas.end());
  const double value = thetas[rank - 1];
  std::lock_guard<std::mutex> lock(g_oracle_mutex);
  g_oracle_cache.emplace(key, value);
  return value;
}

double true_mean(const Scenario& sc, long draws, std::uint64_t seed) {
  sc.validate(0);
  if (sc.kind == ScenarioKind::fixed) {
    return theta_of(sc, {sc.rate_ctl, sc.rate_trt});
  }
  if (draws < 1) throw std::invalid_argument("true_mean: draws must be positive");
  const std::string key = oracle_key(sc, "mean", 0.0, draws, seed);
  {
    std::lock_guard<std::mutex> lock(g_oracle_mutex);
    auto it = g_oracle_cache.find(key);
    if (it != g_oracle_cache.end()) return it->second;
  }
  const std::vector<double> thetas = oracle_draws_vec(sc, draws, seed);
  double total = 0.0;
  for (double t : thetas) total += t;
  const double value = total / static_cast<double>(draws);
  std::lock_guard<std::mutex> lock(g_oracle_mutex);
  g_oracle_cache.emplace(key, value);
  return value;
}

}  // namespace pmeta
