#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "pmeta/core_test.hpp"
#include "pmeta/effects.hpp"
#include "pmeta/nulldist.hpp"

// Confidence intervals for a percentile of the effect distribution, obtained
// by inverting the sign test: the interval is the closure of the set of null
// values mu0 whose p-value exceeds alpha, located by a grid scan over the
// data range followed by bisection at the two boundaries.

namespace pmeta {

enum class Method { weighted, unweighted, dl, sj };

Method method_from_flag(std::string_view flag);
const char* method_flag(Method method);

enum class TestSide { two_sided, lower_only, upper_only };

struct InversionConfig {
  long grid_points = 512;
  double refine_tol = 1e-6;
  double scan_mult = 6.0;  // scan range: data range widened by this many max-SEs
  int exact_threshold = kDefaultExactThreshold;
  long n_resamples = kDefaultResamples;
  std::uint64_t seed = 1;
  TestSide side = TestSide::two_sided;
  // When set, every candidate mu0 gets its own freshly seeded sign matrix
  // instead of one shared across the inversion.  Much slower and the p-value
  // curve is noisier; endpoints are then only refined to refine_tol.
  bool fresh_draws = false;
};

struct IntervalDiagnostics {
  long grid_points = 0;
  long refinement_evals = 0;
  bool non_interval = false;  // non-rejection region had gaps (or was empty)
  std::uint64_t seed = 0;
};

struct IntervalResult {
  Method method = Method::weighted;
  double p = 0.5;
  double level = 0.95;
  double point = 0.0;
  double lower = 0.0;  // analysis scale; +-infinity when a side never rejects
  double upper = 0.0;
  double point_bt = 0.0;  // reporting scale
  double lower_bt = 0.0;
  double upper_bt = 0.0;
  IntervalDiagnostics diagnostics;
};

struct PValueCurve {
  std::vector<double> mu_grid;
  std::vector<double> pvalues;
};

// P-value of H0: the p-th percentile equals query.mu0.  Exact enumeration is
// used for the weighted statistic when the study count is at most
// cfg.exact_threshold, Monte Carlo otherwise; `signs` (when non-null)
// supplies the Monte Carlo sign matrix, letting callers share draws across
// many candidate values.  Method must be weighted or unweighted.
double pvalue(const Dataset& data, const PercentileQuery& query, Method method,
              const SignMatrix* signs = nullptr, const InversionConfig& cfg = {});

// P-values over an evenly spaced grid spanning the scan range.  The parallel
// and serial paths return bitwise-identical curves.
PValueCurve pvalue_curve(const Dataset& data, double p, Method method = Method::weighted,
                         const InversionConfig& cfg = {}, bool parallel = true);

// Point estimate of the p-th percentile.  Weighted: the value where the
// weighted statistic sits at its null center, located by bisection.
// Unweighted: the sample percentile of the estimates (rank ceil(p*K), with
// the two middle values averaged for the even-count median).  Falls back to
// the unweighted estimate when no study has a positive standard error.
double point_estimate(const Dataset& data, double p, Method method);

// Inverts the test at size alpha into a confidence interval for the p-th
// percentile.  Both endpoints are refined past refine_tol down to the exact
// decision boundary; when the non-rejection set on the grid is disconnected
// its convex hull is reported and the non_interval flag is set; when it is
// empty the interval degenerates to the p-value-maximizing grid point.
IntervalResult invert_ci(const Dataset& data, double p, double alpha, Method method,
                         const InversionConfig& cfg = {});

}  // namespace pmeta
