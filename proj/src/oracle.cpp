#include "rfc/oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace rfc::oracle {

EnumeratedGroundState enumerate_ground_state(const NoiseField& noise,
                                             double epsilon,
                                             const BoundaryCondition& bc,
                                             const Stencil& stencil,
                                             EnergyMode mode) {
  const int n = noise.width * noise.height;
  if (n > 25)
    throw std::invalid_argument("enumerate_ground_state: more than 25 cells");

  EnumeratedGroundState res;
  std::vector<std::int8_t> cfg(n);
  for (std::uint32_t bits = 0; bits < (1u << n); ++bits) {
    for (int i = 0; i < n; ++i) cfg[i] = (bits >> i) & 1 ? +1 : -1;
    const double e = spin_energy(cfg, noise.width, noise.height, &noise,
                                 epsilon, bc, stencil, mode);
    if (res.argmin.empty() || e < res.min_energy - 1e-12) {
      res.min_energy = e;
      res.argmin.clear();
      res.argmin.push_back(cfg);
    } else if (e <= res.min_energy + 1e-12) {
      res.argmin.push_back(cfg);
    }
  }
  return res;
}

EnumeratedRatio enumerate_sr(const NoiseField& noise,
                             std::span<const Cell> cells,
                             const Stencil& stencil) {
  const int n = static_cast<int>(cells.size());
  if (n > 16) throw std::invalid_argument("enumerate_sr: more than 16 cells");
  if (n == 0) throw std::invalid_argument("enumerate_sr: empty ball");

  // Precompute per-cell incident weight and intra-set pair weights.
  std::vector<double> value(n), cell_per(n);
  for (int i = 0; i < n; ++i) {
    value[i] = noise.at(cells[i].x, cells[i].y);
    cell_per[i] = Stencil::make(stencil.kind()).cell_perimeter();
  }
  struct Pair {
    int i, j;
    double w;
  };
  std::vector<Pair> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (const StencilDir& d : stencil.dirs()) {
        const int dx = cells[j].x - cells[i].x, dy = cells[j].y - cells[i].y;
        if ((dx == d.dx && dy == d.dy) || (dx == -d.dx && dy == -d.dy))
          pairs.push_back({i, j, d.weight});
      }

  EnumeratedRatio res;
  for (std::uint32_t bits = 1; bits < (1u << n); ++bits) {
    double integral = 0.0, per = 0.0;
    for (int i = 0; i < n; ++i)
      if ((bits >> i) & 1) {
        integral += value[i];
        per += cell_per[i];
      }
    for (const Pair& p : pairs)
      if (((bits >> p.i) & 1) && ((bits >> p.j) & 1)) per -= 2.0 * p.w;
    const double ratio = std::abs(integral) / per;
    if (res.argmax.empty() || ratio > res.value + 1e-12) {
      res.value = ratio;
      res.argmax.clear();
    } else if (ratio < res.value - 1e-12) {
      continue;
    }
    std::vector<Cell> set;
    for (int i = 0; i < n; ++i)
      if ((bits >> i) & 1) set.push_back(cells[i]);
    res.argmax.push_back(std::move(set));
  }
  return res;
}

double enumerate_constrained_perimeter(std::span<const std::int8_t> values,
                                       int width, int height,
                                       std::span<const Cell> region,
                                       const BoundaryCondition& bc,
                                       const Stencil& stencil) {
  const int n = static_cast<int>(region.size());
  if (n > 25)
    throw std::invalid_argument(
        "enumerate_constrained_perimeter: more than 25 cells");

  std::vector<std::int8_t> cfg(values.begin(), values.end());
  double best = 0.0;
  bool first = true;
  for (std::uint32_t bits = 0; bits < (1u << n); ++bits) {
    for (int i = 0; i < n; ++i)
      cfg[static_cast<std::size_t>(region[i].y) * width + region[i].x] =
          (bits >> i) & 1 ? +1 : -1;
    const double per =
        local_energy(cfg, width, height, region, nullptr, 0.0, bc, stencil,
                     PairWeighting::PerimeterOnly);
    if (first || per < best) {
      best = per;
      first = false;
    }
  }
  return best;
}

}  // namespace rfc::oracle
