#pragma once

#include <cstdint>
#include <tuple>
#include <utility>
#include <vector>

#include "rfc/noise.hpp"
#include "rfc/stencil.hpp"

namespace rfc {

// The weak-norm functional
//   S_R(x) = sup over nonempty cell unions M inside B_R(x) of
//            |int_M xi| / per(M),
// computed exactly by Dinkelbach ratio iteration (two signed runs).

struct WeakNormResult {
  double value = 0.0;           // the optimal ratio
  std::vector<Cell> optimizer;  // a set attaining it (nonempty)
  double perimeter = 0.0;       // cut length of the optimizer
  int iterations = 0;           // Dinkelbach subproblem solves, both signs
  int sign = +1;                // which signed problem attained the max
};

// Warm-start state threaded through nested balls: for fixed noise and center,
// the signed optima are nondecreasing in R, so the value and optimizer at a
// smaller radius are a valid starting point at a larger one.
struct WeakNormWarmStart {
  double lambda_plus = 0.0;
  double lambda_minus = 0.0;
  std::vector<Cell> opt_plus;
  std::vector<Cell> opt_minus;
};

WeakNormResult s_r(const NoiseField& noise, double R, Cell center,
                   const Stencil& stencil);

// As s_r, but seeds each signed run from `warm` and writes the converged
// signed state back for the next (larger) radius.
WeakNormResult s_r_warm(const NoiseField& noise, double R, Cell center,
                        const Stencil& stencil, WeakNormWarmStart& warm);

struct PinnedScales {
  double value = 0.0;  // sup over dyadic R of (log R)^{-3/4} S_R
  std::vector<std::pair<int, double>> per_scale;  // (R, S_R), diagnostics
};

// Dyadic R in {2, 4, ..., <= R_max}; R_max >= 2 required.
PinnedScales pinned_sup_scales(const NoiseField& noise, Cell center,
                               int R_max,
                               const Stencil& stencil = Stencil::make(
                                   StencilKind::Lattice4));

struct PinnedSpace {
  double value = 0.0;  // sup over |x| <= W of (log|x|_+)^{-1/2} pinned_scales
  Cell argmax{0, 0};   // base point offset attaining the sup
  std::vector<std::tuple<int, int, double>> table;  // (x, y, weighted value)
};

// Base points are integer offsets x from the field origin with Euclidean
// |x| <= W; |x|_+ = max(|x|, 2).
PinnedSpace pinned_sup_space(const NoiseField& noise, int R_max, int W,
                             const Stencil& stencil = Stencil::make(
                                 StencilKind::Lattice4));

struct SrSummary {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double normalized_mean = 0.0;  // mean / (log R)^{3/4}
  std::vector<std::pair<double, double>> quantiles;  // (p, value)
};

struct SrSamples {
  std::vector<double> values;  // indexed by sample, order-independent
  SrSummary summary;
};

// Independent fields per sample (seed = derive_key(master_seed, i));
// parallelized across samples, deterministic regardless of worker count.
SrSamples montecarlo_sr(double R, int n_samples, NoiseKind kind,
                        std::uint64_t master_seed,
                        const Stencil& stencil = Stencil::make(
                            StencilKind::Lattice4));

}  // namespace rfc
