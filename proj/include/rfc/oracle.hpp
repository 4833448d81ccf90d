#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rfc/maxflow.hpp"
#include "rfc/noise.hpp"
#include "rfc/stencil.hpp"

namespace rfc::oracle {

// Exhaustive ground truths for everything small enough to enumerate. These
// stay deliberately independent of the solver path they certify: energies and
// ratios are evaluated directly, configuration by configuration.

struct EnumeratedGroundState {
  double min_energy = 0.0;
  std::vector<std::vector<std::int8_t>> argmin;  // ties enumerated
};

// All 2^n configurations of a box with at most 25 cells.
EnumeratedGroundState enumerate_ground_state(const NoiseField& noise,
                                             double epsilon,
                                             const BoundaryCondition& bc,
                                             const Stencil& stencil,
                                             EnergyMode mode);

struct EnumeratedRatio {
  double value = 0.0;                   // max |int_M xi| / per(M)
  std::vector<std::vector<Cell>> argmax;
};

// Maximizes |int_M xi| / per(M) over all nonempty subsets of `cells`
// (at most 16; connectivity not required).
EnumeratedRatio enumerate_sr(const NoiseField& noise,
                             std::span<const Cell> cells,
                             const Stencil& stencil);

// Exhaustive minimum of the stencil cut length over interior configurations
// with the exterior of `region` frozen to `values` (at most 25 cells).
double enumerate_constrained_perimeter(std::span<const std::int8_t> values,
                                       int width, int height,
                                       std::span<const Cell> region,
                                       const BoundaryCondition& bc,
                                       const Stencil& stencil);

}  // namespace rfc::oracle
