#pragma once

#include <cmath>

// Independent long-double standard normal CDF used as the reference in tests.
// Built from first principles so it shares no code with the library: the erf
// Maclaurin series on |x| <= 2 and the erfc continued fraction (evaluated
// with the modified Lentz algorithm) on x > 2.  Both pieces carry ~1e-19
// relative rounding error in 80-bit arithmetic, well below every tolerance
// they back.

namespace oracle {

inline long double erf_series(long double x) {
  // erf(x) = 2/sqrt(pi) * sum (-1)^n x^(2n+1) / (n! (2n+1))
  const long double x2 = x * x;
  long double term = x;
  long double sum = x;
  for (int n = 1; n < 200; ++n) {
    term *= -x2 / n;
    const long double inc = term / (2 * n + 1);
    sum += inc;
    if (std::fabs(inc) < 1e-25L * std::fabs(sum)) break;
  }
  return sum * 1.1283791670955125738961589031215452L;  // 2/sqrt(pi)
}

inline long double erfc_cf(long double x) {
  // erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + (2/2)/(x + ...))), x > 0.
  long double f = x;
  long double c = x;
  long double d = 0.0L;
  const long double tiny = 1e-300L;
  for (int i = 1; i < 400; ++i) {
    const long double a = 0.5L * i;
    d = x + a * d;
    if (d == 0.0L) d = tiny;
    c = x + a / c;
    if (c == 0.0L) c = tiny;
    d = 1.0L / d;
    const long double delta = c * d;
    f *= delta;
    if (std::fabs(delta - 1.0L) < 1e-22L) break;
  }
  return std::exp(-x * x) / (1.7724538509055160272981674833411452L * f);  // sqrt(pi)
}

inline long double normal_cdf(long double z) {
  // Phi(z) = erfc(-z/sqrt(2)) / 2.
  const long double x = -z / 1.4142135623730950488016887242096981L;  // sqrt(2)
  if (x > 2.0L) return 0.5L * erfc_cf(x);
  if (x < -2.0L) return 1.0L - 0.5L * erfc_cf(-x);
  return 0.5L * (1.0L - erf_series(x));
}

}  // namespace oracle
