#include "rfc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "rfc/kernels.hpp"
#include "rfc/parallel.hpp"
#include "rfc/rng.hpp"

namespace rfc {

ScalingFit fit_log_power(std::span<const std::pair<double, double>> points) {
  if (points.size() < 3)
    throw std::invalid_argument("fit_log_power: need at least 3 points");
  std::set<double> distinct;
  for (const auto& [R, v] : points) {
    if (R < 3.0) throw std::invalid_argument("fit_log_power: R < 3");
    if (!(v > 0.0))
      throw std::invalid_argument("fit_log_power: nonpositive value");
    distinct.insert(R);
  }
  if (distinct.size() != points.size())
    throw std::invalid_argument("fit_log_power: duplicate R values");

  const double n = static_cast<double>(points.size());
  double su = 0, sy = 0, suu = 0, suy = 0;
  for (const auto& [R, v] : points) {
    const double u = std::log(std::log(R)), y = std::log(v);
    su += u;
    sy += y;
    suu += u * u;
    suy += u * y;
  }
  const double b = (n * suy - su * sy) / (n * suu - su * su);
  const double intercept = (sy - b * su) / n;

  ScalingFit fit;
  fit.exponent = b;
  fit.prefactor = std::exp(intercept);
  for (const auto& [R, v] : points) {
    const double pred = intercept + b * std::log(std::log(R));
    fit.residual = std::max(fit.residual, std::abs(std::log(v) - pred));
  }
  return fit;
}

EnvelopeCheck subgaussian_envelope_check(std::span<const double> samples,
                                         double sigma2,
                                         std::span<const double> t_grid) {
  if (samples.size() < 100)
    throw std::invalid_argument(
        "subgaussian_envelope_check: need at least 100 samples");
  const double n = static_cast<double>(samples.size());
  const double mean = kernels::sum(samples) / n;

  EnvelopeCheck res;
  res.ok = true;
  bool first = true;
  for (const double t : t_grid) {
    int count = 0;
    for (const double v : samples)
      if (std::abs(v - mean) >= t) ++count;
    const double tail = count / n;
    const double envelope = 2.0 * std::exp(-t * t / (2.0 * sigma2));
    const double se = std::sqrt(tail * (1.0 - tail) / n);
    const double bound = envelope + 3.0 * se;
    const double violation = tail - bound;
    res.table.emplace_back(t, tail, bound);
    if (first || violation > res.max_violation) {
      res.max_violation = violation;
      first = false;
    }
    if (violation > 0.0) res.ok = false;
  }
  return res;
}

SupFieldScaling sup_field_scaling(NoiseKind kind, std::span<const int> R_list,
                                  int n_samples, std::uint64_t master_seed) {
  if (n_samples < 1)
    throw std::invalid_argument("sup_field_scaling: n_samples < 1");
  SupFieldScaling res;
  std::vector<std::pair<double, double>> fit_points;
  for (const int R : R_list) {
    if (R < 2) throw std::invalid_argument("sup_field_scaling: R < 2");
    const std::uint64_t key = derive_key(master_seed, R);
    std::vector<double> sups(n_samples);
    parallel_for(n_samples, [&](int i) {
      const std::uint64_t seed = derive_key(key, i);
      const NoiseField noise = kind == NoiseKind::DiscretizedWN
                                   ? sample_discretized_wn(R, R, seed)
                                   : sample_regularized_wn(R, R, seed);
      sups[i] = kernels::max_abs(noise.values);
    });
    const double mean = kernels::sum(sups) / n_samples;
    const double ratio = mean / std::sqrt(std::log(double(R)));
    res.table.emplace_back(R, mean, ratio);
    res.max_ratio = std::max(res.max_ratio, ratio);
    if (R >= 3 && mean > 0.0) fit_points.emplace_back(double(R), mean);
  }
  if (fit_points.size() >= 3) {
    res.fit = fit_log_power(fit_points);
    res.fit_valid = true;
  }
  return res;
}

}  // namespace rfc
