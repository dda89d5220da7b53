#pragma once

// Scalar distribution functions used throughout the library.  Everything here
// is deterministic, locale-independent and has no global state.

namespace pmeta::stats {

// Standard normal CDF.  Accurate to ~1e-15 absolute over the full range.
double normal_cdf(double z);

// Standard normal density.
double normal_pdf(double z);

// Inverse of normal_cdf for p in (0, 1).  Throws std::domain_error otherwise.
double normal_quantile(double p);

// log of the complete beta function B(a, b), a > 0, b > 0.
double log_beta(double a, double b);

// Regularized incomplete beta function I_x(a, b) for x in [0, 1].
double betainc(double a, double b, double x);

// CDF of Student's t distribution with nu > 0 degrees of freedom.
double t_cdf(double t, double nu);

// Quantile of Student's t for p in (0, 1).
double t_quantile(double p, double nu);

// Binomial point mass P(X = k) for X ~ Bin(n, p).
double binomial_pmf(long k, long n, double p);

}  // namespace pmeta::stats
