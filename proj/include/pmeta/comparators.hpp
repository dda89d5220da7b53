#pragma once

#include "pmeta/effects.hpp"
#include "pmeta/inversion.hpp"

// Parametric random-effects intervals for the mean effect, used as reference
// methods next to the percentile intervals.

namespace pmeta {

struct MeanInterval {
  Method method = Method::dl;
  double level = 0.95;
  double mean = 0.0;
  double tau2 = 0.0;  // between-study variance estimate
  double lower = 0.0;
  double upper = 0.0;
};

// DerSimonian-Laird: moment estimator of the between-study variance from
// Cochran's Q, normal interval with inverse-variance weights.  Requires
// K >= 2 and every sigma_hat > 0.
MeanInterval dersimonian_laird(const Dataset& data, double alpha);

// Sidik-Jonkman: reweighted variance estimator seeded by the crude
// between-study variance, t interval on K-1 degrees of freedom.  Requires
// K >= 2.
MeanInterval sidik_jonkman(const Dataset& data, double alpha);

}  // namespace pmeta
