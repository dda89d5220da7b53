#include "pmeta/core_test.hpp"

#include <cmath>
#include <stdexcept>

#include "pmeta/stats.hpp"

namespace pmeta {

double sign_weight(double theta_hat, double sigma_hat, double mu0) {
  if (!(sigma_hat >= 0.0)) throw std::invalid_argument("sign_weight: sigma_hat must be >= 0");
  if (sigma_hat == 0.0) {
    return theta_hat == mu0 ? 0.0 : 0.5;
  }
  return std::fabs(stats::normal_cdf((mu0 - theta_hat) / sigma_hat) - 0.5);
}

namespace {

int sign_around(double theta_hat, double mu0) {
  if (theta_hat < mu0) return 1;
  if (theta_hat > mu0) return -1;
  return 0;
}

}  // namespace

StatisticValue statistic_weighted(const Dataset& data, double mu0) {
  StatisticValue out;
  out.weights.reserve(data.studies.size());
  out.signs.reserve(data.studies.size());
  for (const auto& s : data.studies) {
    const double w = sign_weight(s.theta_hat, s.sigma_hat, mu0);
    const int b = sign_around(s.theta_hat, mu0);
    out.weights.push_back(w);
    out.signs.push_back(b);
    out.value += b > 0 ? w : (b < 0 ? -w : 0.0);
  }
  return out;
}

StatisticValue statistic_unweighted(const Dataset& data, double mu0) {
  StatisticValue out;
  out.weights.assign(data.studies.size(), 1.0);
  out.signs.reserve(data.studies.size());
  for (const auto& s : data.studies) {
    const int b = sign_around(s.theta_hat, mu0);
    out.signs.push_back(b);
    out.value += b;
  }
  return out;
}

}  // namespace pmeta
