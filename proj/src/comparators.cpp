#include "pmeta/comparators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pmeta/stats.hpp"

namespace pmeta {

namespace {

void check_mean_inputs(const Dataset& data, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("alpha must lie strictly in (0,1)");
  }
  if (data.size() < 2) {
    throw std::invalid_argument("mean methods need at least 2 studies");
  }
}

}  // namespace

MeanInterval dersimonian_laird(const Dataset& data, double alpha) {
  check_mean_inputs(data, alpha);
  const long K = data.size();
  double sw = 0.0;
  double swt = 0.0;
  double sw2 = 0.0;
  for (const auto& s : data.studies) {
    if (!(s.sigma_hat > 0.0)) {
      throw std::invalid_argument("dersimonian_laird: every study needs sigma_hat > 0");
    }
    const double w = 1.0 / (s.sigma_hat * s.sigma_hat);
    sw += w;
    swt += w * s.theta_hat;
    sw2 += w * w;
  }
  const double mean_fixed = swt / sw;
  double q = 0.0;
  for (const auto& s : data.studies) {
    const double w = 1.0 / (s.sigma_hat * s.sigma_hat);
    const double d = s.theta_hat - mean_fixed;
    q += w * d * d;
  }
  const double c = sw - sw2 / sw;
  const double tau2 = std::max(0.0, (q - static_cast<double>(K - 1)) / c);

  double swr = 0.0;
  double swrt = 0.0;
  for (const auto& s : data.studies) {
    const double w = 1.0 / (s.sigma_hat * s.sigma_hat + tau2);
    swr += w;
    swrt += w * s.theta_hat;
  }
  MeanInterval out;
  out.method = Method::dl;
  out.level = 1.0 - alpha;
  out.tau2 = tau2;
  out.mean = swrt / swr;
  const double z = stats::normal_quantile(1.0 - alpha / 2.0);
  const double se = std::sqrt(1.0 / swr);
  out.lower = out.mean - z * se;
  out.upper = out.mean + z * se;
  return out;
}

MeanInterval sidik_jonkman(const Dataset& data, double alpha) {
  check_mean_inputs(data, alpha);
  const long K = data.size();
  double mean_plain = 0.0;
  for (const auto& s : data.studies) mean_plain += s.theta_hat;
  mean_plain /= static_cast<double>(K);
  double tau02 = 0.0;
  for (const auto& s : data.studies) {
    const double d = s.theta_hat - mean_plain;
    tau02 += d * d;
  }
  tau02 /= static_cast<double>(K);
  tau02 = std::max(tau02, 1e-10);

  double su = 0.0;
  double sut = 0.0;
  for (const auto& s : data.studies) {
    const double u = 1.0 / (s.sigma_hat * s.sigma_hat / tau02 + 1.0);
    su += u;
    sut += u * s.theta_hat;
  }
  const double mean_v = sut / su;
  double tau2 = 0.0;
  for (const auto& s : data.studies) {
    const double u = 1.0 / (s.sigma_hat * s.sigma_hat / tau02 + 1.0);
    const double d = s.theta_hat - mean_v;
    tau2 += u * d * d;
  }
  tau2 /= static_cast<double>(K - 1);

  MeanInterval out;
  out.method = Method::sj;
  out.level = 1.0 - alpha;
  out.tau2 = tau2;
  out.mean = mean_v;
  const double t = stats::t_quantile(1.0 - alpha / 2.0, static_cast<double>(K - 1));
  const double se = std::sqrt(tau2 / su);
  out.lower = out.mean - t * se;
  out.upper = out.mean + t * se;
  return out;
}

}  // namespace pmeta
