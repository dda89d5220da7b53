#pragma once

#include <vector>

#include "pmeta/effects.hpp"

// The conditional sign test statistic.  For a candidate value mu0, each study
// contributes +1 if its estimate lies below mu0 and -1 if above, scaled by a
// weight measuring how far mu0 sits in the study's sampling distribution;
// ties contribute nothing.  The statistic is nondecreasing in mu0.

namespace pmeta {

struct PercentileQuery {
  double p = 0.5;      // percentile level in (0, 1)
  double alpha = 0.05; // test size in (0, 1)
  double mu0 = 0.0;    // null value on the analysis scale
};

struct StatisticValue {
  double value = 0.0;
  std::vector<double> weights;  // per study, in dataset order
  std::vector<int> signs;       // +1 below mu0, -1 above, 0 tied
};

// Weight of one study at mu0: |Phi((mu0 - theta_hat)/sigma_hat) - 1/2|.
// A study with sigma_hat == 0 is treated as the limit of that expression:
// 1/2 away from its point estimate, 0 at it.
double sign_weight(double theta_hat, double sigma_hat, double mu0);

// Weighted statistic: sum of weight * sign over studies, accumulated in
// dataset order.
StatisticValue statistic_weighted(const Dataset& data, double mu0);

// Unweighted statistic: every study counts with weight 1, so the value is the
// signed count (#below - #above) of studies around mu0.
StatisticValue statistic_unweighted(const Dataset& data, double mu0);

}  // namespace pmeta
