#pragma once

#include <iosfwd>
#include <string>

#include "pmeta/harness.hpp"

// Experiment spec files: plain "key = value" lines, '#' comments, lists
// whitespace-separated.  Scenario keys:
//   kind = logit-normal | bivariate-beta | fixed
//   eta = <2 numbers>            (logit-normal: means of the logit rates)
//   cov = <4 numbers>            (logit-normal: row-major 2x2 covariance)
//   shapes = <3 numbers>         (bivariate-beta: ctl, trt, shared)
//   rates = <2 numbers>          (fixed: control, treatment)
//   measure = log-rr | rd
//   n_per_arm = <1 or K numbers>
// Experiment keys (all optional, with the ExperimentSpec defaults):
//   K, reps, level, percentiles, methods, seed, resamples, exact_threshold,
//   grid, refine_tol, oracle_draws, oracle_seed

namespace pmeta {

ExperimentSpec parse_experiment_spec(std::istream& in);
ExperimentSpec parse_experiment_spec_file(const std::string& path);

}  // namespace pmeta
