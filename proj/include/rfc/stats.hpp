#pragma once

#include <cstdint>
#include <span>
#include <tuple>
#include <utility>
#include <vector>

#include "rfc/noise.hpp"

namespace rfc {

// Model: value = a * (log R)^b, fitted by least squares in
// (log log R, log value) coordinates.
struct ScalingFit {
  double exponent = 0.0;   // b
  double prefactor = 0.0;  // a > 0
  double residual = 0.0;   // max absolute log-residual
};

// Requires >= 3 points, R >= 3 (so log log R > 0), values > 0, distinct R.
ScalingFit fit_log_power(std::span<const std::pair<double, double>> points);

struct EnvelopeCheck {
  double max_violation = 0.0;  // worst (empirical tail - envelope - 3 SE)
  bool ok = false;
  std::vector<std::tuple<double, double, double>> table;  // (t, tail, bound)
};

// Two-sided empirical tail about the sample mean versus
// 2*exp(-t^2/(2*sigma2)) + 3 binomial standard errors. Needs >= 100 samples.
EnvelopeCheck subgaussian_envelope_check(std::span<const double> samples,
                                         double sigma2,
                                         std::span<const double> t_grid);

struct SupFieldScaling {
  // (R, mean of sup_{Q_R}|xi|, mean / sqrt(log R))
  std::vector<std::tuple<int, double, double>> table;
  double max_ratio = 0.0;
  bool fit_valid = false;  // needs >= 3 grid points with R >= 3
  ScalingFit fit;
};

SupFieldScaling sup_field_scaling(NoiseKind kind, std::span<const int> R_list,
                                  int n_samples, std::uint64_t master_seed);

}  // namespace rfc
