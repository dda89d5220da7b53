#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pmeta/inversion.hpp"
#include "pmeta/simgen.hpp"

// Coverage experiments: draw many meta-analyses from a scenario, run every
// requested method on each, and score the intervals against the scenario's
// large-sample truth.

namespace pmeta {

struct ExperimentSpec {
  Scenario scenario;
  long k_studies = 10;
  long reps = 1000;
  double level = 0.95;
  std::vector<double> percentiles{0.5};
  std::vector<Method> methods{Method::weighted, Method::unweighted, Method::dl, Method::sj};
  std::uint64_t base_seed = 1;

  // Inversion settings for the sign-test methods.  The replication defaults
  // trade p-value resolution for throughput relative to the single-analysis
  // defaults; see the README.
  long n_resamples = 10000;
  int exact_threshold = 12;
  long grid_points = 512;
  double refine_tol = 1e-6;

  long oracle_draws = kDefaultOracleDraws;
  std::uint64_t oracle_seed = kDefaultOracleSeed;

  // When nonempty, overrides the per-replication seeds (size must equal
  // reps).  Replications are exchangeable: permuting these seeds permutes
  // per-rep results but leaves every aggregate untouched.
  std::vector<std::uint64_t> rep_seeds;

  void validate() const;
};

struct CoverageRow {
  Method method = Method::weighted;
  double p = 0.5;
  long k_studies = 0;
  double ecl = 0.0;    // empirical coverage level, in [0,1]
  double ml = 0.0;     // median length of the finite intervals
  long reps_used = 0;  // replications where the method produced an interval
  double truth = 0.0;  // oracle value the intervals were scored against
};

// Runs the experiment.  Rows come out grouped by method in spec order, with
// percentiles in spec order within each method.  The parallel and serial
// versions return identical rows for the same spec, as does any thread
// count: every replication draws from its own derived seed.
std::vector<CoverageRow> run_experiment(const ExperimentSpec& spec);
std::vector<CoverageRow> run_experiment_serial(const ExperimentSpec& spec);

enum class ReportFormat { csv, markdown };

// Renders rows with the fixed column order method,p,K,ECL,ML,reps.
std::string write_report(std::span<const CoverageRow> rows, ReportFormat format);

}  // namespace pmeta
