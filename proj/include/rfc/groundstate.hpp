#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "rfc/maxflow.hpp"
#include "rfc/noise.hpp"
#include "rfc/stencil.hpp"

namespace rfc {

// A +/-1 configuration on a box, with provenance.
struct SpinField {
  std::vector<std::int8_t> values;  // row-major
  int width = 0;
  int height = 0;
  BoundaryCondition::Kind bc = BoundaryCondition::Kind::Plus;
  std::uint64_t noise_seed = 0;
  NoiseKind noise_kind = NoiseKind::DiscretizedWN;
  double epsilon = 0.0;
  StencilKind stencil = StencilKind::Lattice4;
  EnergyMode mode = EnergyMode::RFIM;
  double energy = 0.0;

  std::int8_t at(int x, int y) const {
    return values[static_cast<std::size_t>(y) * width + x];
  }
  // "Origin" = central cell of the box.
  Cell origin() const { return {width / 2, height / 2}; }
};

// Global minimizer of the boxed energy; deterministic via the canonical
// (source-side-minimal) cut.
SpinField ground_state(const NoiseField& noise, double epsilon,
                       const BoundaryCondition& bc, const Stencil& stencil,
                       EnergyMode mode);

struct OrderParameter {
  double m_hat = 0.0;
  double std_err = 0.0;
  int n_samples = 0;
};

// m(L): fraction of samples whose origin spin differs between all-plus and
// all-minus boundary conditions, with common random numbers (the same noise
// realization for both solves). Asserts the monotone coupling
// sigma^{L,+} >= sigma^{L,-} on every pair.
OrderParameter order_parameter(double epsilon, int L, int n_samples,
                               std::uint64_t master_seed,
                               NoiseKind kind = NoiseKind::DiscretizedWN,
                               StencilKind stencil = StencilKind::Lattice4,
                               EnergyMode mode = EnergyMode::RFIM);

struct CorrelationLength {
  bool reached = false;
  int L_star = 0;
  std::vector<std::tuple<int, double, double>> table;  // (L, m_hat, std_err)
};

// Smallest L in the grid with m_hat(L) + 2*std_err < p0, against the grid
// only (no interpolation).
CorrelationLength correlation_length(double epsilon, double p0,
                                     std::span<const int> L_grid,
                                     int n_samples, std::uint64_t master_seed,
                                     NoiseKind kind = NoiseKind::DiscretizedWN,
                                     StencilKind stencil = StencilKind::Lattice4,
                                     EnergyMode mode = EnergyMode::RFIM);

struct MinimalityViolation {
  Cell center;
  double radius;
  double improvement;
};

struct AuditResult {
  std::vector<MinimalityViolation> violations;
  int skipped = 0;
  int checked = 0;
};

// Re-optimizes n_balls random interior balls with the exterior frozen and
// reports strict energy improvements > 1e-9. Ground states must come back
// clean.
AuditResult local_minimality_audit(const SpinField& spin,
                                   const NoiseField& noise, double epsilon,
                                   int n_balls, std::uint64_t seed);

// Cells whose centers lie within Euclidean distance r of the center of
// `center` (the discrete ball convention used throughout).
std::vector<Cell> ball_cells(Cell center, double r);
std::vector<Cell> ball_cells_clipped(Cell center, double r, int width,
                                     int height);

}  // namespace rfc
