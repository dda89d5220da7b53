#include "pmeta/inversion.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "pmeta/rng.hpp"
#include "pmeta/stats.hpp"

namespace pmeta {

Method method_from_flag(std::string_view flag) {
  if (flag == "weighted") return Method::weighted;
  if (flag == "unweighted") return Method::unweighted;
  if (flag == "dl") return Method::dl;
  if (flag == "sj") return Method::sj;
  throw std::invalid_argument("unknown method: " + std::string(flag) +
                              " (expected weighted, unweighted, dl, or sj)");
}

const char* method_flag(Method method) {
  switch (method) {
    case Method::weighted:
      return "weighted";
    case Method::unweighted:
      return "unweighted";
    case Method::dl:
      return "dl";
    case Method::sj:
      return "sj";
  }
  return "weighted";
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_level(double x, const char* name) {
  if (!(x > 0.0 && x < 1.0)) {
    throw std::invalid_argument(std::string(name) + " must lie strictly in (0,1)");
  }
}

double side_pvalue(TestSide side, const TailPair& tails) {
  switch (side) {
    case TestSide::two_sided:
      return std::min(1.0, 2.0 * std::min(tails.le, tails.ge));
    case TestSide::lower_only:
      return tails.le;
    case TestSide::upper_only:
      return tails.ge;
  }
  return 1.0;
}

// One-stop p-value evaluation for a fixed dataset, percentile level and
// sign-test flavor.  Holds the shared sign matrix when Monte Carlo is in
// play, and the binomial null when the statistic is unweighted.
struct NullEvaluator {
  const Dataset* data = nullptr;
  double p = 0.5;
  Method method = Method::weighted;
  TestSide side = TestSide::two_sided;
  bool use_exact = false;
  const SignMatrix* shared_signs = nullptr;
  SignMatrix owned_signs;
  bool fresh_draws = false;
  long n_resamples = 0;
  std::uint64_t seed = 0;
  std::vector<double> lattice_probs;  // unweighted: pmf of #positives

  static NullEvaluator make(const Dataset& data, double p, Method method,
                            const SignMatrix* shared, const InversionConfig& cfg) {
    if (method != Method::weighted && method != Method::unweighted) {
      throw std::invalid_argument("sign test p-values exist only for weighted/unweighted");
    }
    if (data.size() < 1) throw std::invalid_argument("dataset is empty");
    check_level(p, "percentile p");
    NullEvaluator ev;
    ev.data = &data;
    ev.p = p;
    ev.method = method;
    ev.side = cfg.side;
    ev.seed = cfg.seed;
    ev.n_resamples = cfg.n_resamples;
    const long K = data.size();
    if (method == Method::unweighted) {
      ev.lattice_probs.resize(static_cast<std::size_t>(K) + 1);
      for (long j = 0; j <= K; ++j) {
        ev.lattice_probs[j] = stats::binomial_pmf(j, K, p);
      }
    } else if (K <= cfg.exact_threshold) {
      ev.use_exact = true;
    } else if (shared != nullptr) {
      if (shared->cols != K) {
        throw std::invalid_argument("sign matrix columns do not match study count");
      }
      ev.shared_signs = shared;
    } else if (cfg.fresh_draws) {
      ev.fresh_draws = true;
    } else {
      ev.owned_signs = make_sign_matrix(K, p, cfg.n_resamples, cfg.seed);
    }
    return ev;
  }

  TailPair tails_at(double mu0) const {
    if (method == Method::unweighted) {
      const StatisticValue t = statistic_unweighted(*data, mu0);
      const long K = data->size();
      const double le_bound = t.value + kTailTolerance;
      const double ge_bound = t.value - kTailTolerance;
      TailPair out;
      for (long j = 0; j <= K; ++j) {
        const double v = static_cast<double>(2 * j - K);
        if (v <= le_bound) out.le += lattice_probs[j];
        if (v >= ge_bound) out.ge += lattice_probs[j];
      }
      out.le = std::min(out.le, 1.0);
      out.ge = std::min(out.ge, 1.0);
      return out;
    }
    const StatisticValue t = statistic_weighted(*data, mu0);
    if (use_exact) {
      return exact_tails(t.weights, p, t.value);
    }
    if (shared_signs != nullptr) {
      return mc_tails(t.weights, *shared_signs, t.value);
    }
    if (fresh_draws) {
      const std::uint64_t mu_bits = std::bit_cast<std::uint64_t>(mu0);
      const SignMatrix fresh = make_sign_matrix(
          data->size(), p, n_resamples, rng::derive_seed(seed, mu_bits));
      return mc_tails(t.weights, fresh, t.value);
    }
    return mc_tails(t.weights, owned_signs, t.value);
  }

  double pvalue_at(double mu0) const { return side_pvalue(side, tails_at(mu0)); }
};

struct ScanRange {
  double lo = 0.0;
  double hi = 0.0;
};

ScanRange scan_range(const Dataset& data, double scan_mult) {
  double tmin = kInf;
  double tmax = -kInf;
  double smax = 0.0;
  for (const auto& s : data.studies) {
    tmin = std::min(tmin, s.theta_hat);
    tmax = std::max(tmax, s.theta_hat);
    smax = std::max(smax, s.sigma_hat);
  }
  ScanRange r{tmin - scan_mult * smax, tmax + scan_mult * smax};
  if (!(r.hi > r.lo)) {
    r.lo -= 1.0;
    r.hi += 1.0;
  }
  return r;
}

std::vector<double> grid_points(const ScanRange& r, long n) {
  std::vector<double> mu(static_cast<std::size_t>(n));
  const double step = (r.hi - r.lo) / static_cast<double>(n - 1);
  for (long i = 0; i < n; ++i) {
    mu[i] = r.lo + step * static_cast<double>(i);
  }
  mu.back() = r.hi;
  return mu;
}

std::vector<double> grid_pvalues(const NullEvaluator& ev, const std::vector<double>& mu,
                                 bool parallel) {
  std::vector<double> pv(mu.size());
  const long n = static_cast<long>(mu.size());
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) pv[i] = ev.pvalue_at(mu[i]);
  } else {
    for (long i = 0; i < n; ++i) pv[i] = ev.pvalue_at(mu[i]);
  }
  return pv;
}

// Bisects for the accept/reject boundary inside (lo, hi), where exactly one
// end accepts.  Runs to the floating-point fixed point, then snaps to a study
// estimate when one lies in the final bracket: jumps of the unweighted
// statistic sit exactly at the data values, and this returns them untouched
// by bisection rounding.  In fresh-draw mode stops at refine_tol (the
// boundary is not well defined beyond the draw noise).
double refine_boundary(const NullEvaluator& ev, const Dataset& data, double alpha,
                       double lo, double hi, bool accept_right, double refine_tol,
                       long* evals) {
  for (int iter = 0; iter < 2000; ++iter) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (ev.fresh_draws && hi - lo <= refine_tol) break;
    const bool accepts = ev.pvalue_at(mid) > alpha;
    ++*evals;
    if (accepts == accept_right) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  if (ev.fresh_draws) return lo + 0.5 * (hi - lo);
  for (const auto& s : data.studies) {
    if (lo <= s.theta_hat && s.theta_hat <= hi) return s.theta_hat;
  }
  return accept_right ? hi : lo;
}

double percentile_of_values(std::vector<double> values, double p) {
  std::sort(values.begin(), values.end());
  const long K = static_cast<long>(values.size());
  if (p == 0.5 && K % 2 == 0) {
    return 0.5 * (values[K / 2 - 1] + values[K / 2]);
  }
  const long rank = std::clamp(
      static_cast<long>(std::ceil(p * static_cast<double>(K))), 1L, K);
  return values[rank - 1];
}

}  // namespace

double pvalue(const Dataset& data, const PercentileQuery& query, Method method,
              const SignMatrix* signs, const InversionConfig& cfg) {
  const NullEvaluator ev = NullEvaluator::make(data, query.p, method, signs, cfg);
  return ev.pvalue_at(query.mu0);
}

PValueCurve pvalue_curve(const Dataset& data, double p, Method method,
                         const InversionConfig& cfg, bool parallel) {
  if (cfg.grid_points < 2) throw std::invalid_argument("grid_points must be at least 2");
  const NullEvaluator ev = NullEvaluator::make(data, p, method, nullptr, cfg);
  PValueCurve curve;
  curve.mu_grid = grid_points(scan_range(data, cfg.scan_mult), cfg.grid_points);
  curve.pvalues = grid_pvalues(ev, curve.mu_grid, parallel);
  return curve;
}

double point_estimate(const Dataset& data, double p, Method method) {
  check_level(p, "percentile p");
  if (data.size() < 1) throw std::invalid_argument("dataset is empty");
  if (method != Method::weighted && method != Method::unweighted) {
    throw std::invalid_argument("point_estimate: method must be weighted or unweighted");
  }

  std::vector<double> thetas;
  thetas.reserve(data.studies.size());
  double smax = 0.0;
  for (const auto& s : data.studies) {
    thetas.push_back(s.theta_hat);
    smax = std::max(smax, s.sigma_hat);
  }
  if (method == Method::unweighted || smax == 0.0) {
    return percentile_of_values(std::move(thetas), p);
  }

  // Root of T(mu) - (2p-1) * W(mu), where T is the weighted statistic and W
  // the total weight; the function is increasing in mu with limits -pK and
  // (1-p)K, so a sign change always brackets the root.
  const auto center = [&](double mu) {
    const StatisticValue t = statistic_weighted(data, mu);
    double total = 0.0;
    for (double w : t.weights) total += w;
    return t.value - (2.0 * p - 1.0) * total;
  };
  const auto [mn, mx] = std::minmax_element(thetas.begin(), thetas.end());
  double lo = *mn - 6.0 * smax - 1.0;
  double hi = *mx + 6.0 * smax + 1.0;
  for (int i = 0; i < 120 && center(lo) > 0.0; ++i) lo -= (hi - lo);
  for (int i = 0; i < 120 && center(hi) < 0.0; ++i) hi += (hi - lo);
  for (int iter = 0; iter < 2000; ++iter) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (center(mid) < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo + 0.5 * (hi - lo);
}

IntervalResult invert_ci(const Dataset& data, double p, double alpha, Method method,
                         const InversionConfig& cfg) {
  check_level(alpha, "alpha");
  if (cfg.grid_points < 2) throw std::invalid_argument("grid_points must be at least 2");
  if (method != Method::weighted && method != Method::unweighted) {
    throw std::invalid_argument("invert_ci: method must be weighted or unweighted");
  }
  const NullEvaluator ev = NullEvaluator::make(data, p, method, nullptr, cfg);

  IntervalResult res;
  res.method = method;
  res.p = p;
  res.level = 1.0 - alpha;
  res.diagnostics.grid_points = cfg.grid_points;
  res.diagnostics.seed = cfg.seed;

  const ScanRange range = scan_range(data, cfg.scan_mult);
  const std::vector<double> mu = grid_points(range, cfg.grid_points);
  const std::vector<double> pv = grid_pvalues(ev, mu, true);

  long first = -1;
  long last = -1;
  bool gap = false;
  for (long i = 0; i < cfg.grid_points; ++i) {
    if (pv[i] > alpha) {
      if (first < 0) first = i;
      last = i;
    }
  }
  if (first >= 0) {
    for (long i = first; i <= last; ++i) {
      if (!(pv[i] > alpha)) gap = true;
    }
  }

  long evals = 0;
  if (first < 0) {
    const long best = static_cast<long>(
        std::max_element(pv.begin(), pv.end()) - pv.begin());
    res.lower = res.upper = mu[best];
    res.diagnostics.non_interval = true;
  } else {
    res.diagnostics.non_interval = gap;
    // An accepted edge point does not by itself make the side unbounded: when
    // every sigma_hat is zero the scan edge sits exactly on the extreme
    // estimate, a tie whose p-value can exceed alpha while the open ray
    // beyond it rejects.  The p-value is constant on each ray outside the
    // data range, so a single probe past the edge settles the side.
    if (first == 0) {
      ++evals;
      if (ev.pvalue_at(mu.front() - 1.0) > alpha) {
        res.lower = -kInf;
      } else {
        res.lower = refine_boundary(ev, data, alpha, mu.front() - 1.0, mu.front(),
                                    /*accept_right=*/true, cfg.refine_tol, &evals);
      }
    } else {
      res.lower = refine_boundary(ev, data, alpha, mu[first - 1], mu[first],
                                  /*accept_right=*/true, cfg.refine_tol, &evals);
    }
    if (last == cfg.grid_points - 1) {
      ++evals;
      if (ev.pvalue_at(mu.back() + 1.0) > alpha) {
        res.upper = kInf;
      } else {
        res.upper = refine_boundary(ev, data, alpha, mu.back(), mu.back() + 1.0,
                                    /*accept_right=*/false, cfg.refine_tol, &evals);
      }
    } else {
      res.upper = refine_boundary(ev, data, alpha, mu[last], mu[last + 1],
                                  /*accept_right=*/false, cfg.refine_tol, &evals);
    }
  }
  res.diagnostics.refinement_evals = evals;

  res.point = point_estimate(data, p, method);
  res.point_bt = back_transform_value(data.measure, res.point);
  res.lower_bt = back_transform_value(data.measure, res.lower);
  res.upper_bt = back_transform_value(data.measure, res.upper);
  return res;
}

}  // namespace pmeta
