#include "pmeta/rng.hpp"

#include <cmath>
#include <stdexcept>

#include "pmeta/stats.hpp"

namespace pmeta::rng {

double sample_normal(Pcg32& gen) { return stats::normal_quantile(gen.next_open()); }

double sample_gamma(Pcg32& gen, double shape) {
  if (!(shape > 0.0)) throw std::domain_error("sample_gamma: shape must be positive");
  if (shape < 1.0) {
    const double u = gen.next_open();
    return sample_gamma(gen, shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / (3.0 * std::sqrt(d));
  for (;;) {
    double x;
    double v;
    do {
      x = sample_normal(gen);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = gen.next_open();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d - d * v + d * std::log(v)) return d * v;
  }
}

long sample_binomial(Pcg32& gen, long n, double p) {
  if (n < 0) throw std::domain_error("sample_binomial: n must be nonnegative");
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("sample_binomial: p must lie in [0,1]");
  long count = 0;
  for (long i = 0; i < n; ++i) {
    count += gen.next_double() < p ? 1 : 0;
  }
  return count;
}

}  // namespace pmeta::rng
