#include "rfc/groundstate.hpp"

#include <cmath>
#include <stdexcept>

#include "rfc/rng.hpp"

namespace rfc {

std::vector<Cell> ball_cells(Cell center, double r) {
  std::vector<Cell> cells;
  const int ir = static_cast<int>(std::ceil(r));
  for (int dy = -ir; dy <= ir; ++dy)
    for (int dx = -ir; dx <= ir; ++dx)
      if (std::hypot(dx, dy) <= r)
        cells.push_back({center.x + dx, center.y + dy});
  return cells;
}

std::vector<Cell> ball_cells_clipped(Cell center, double r, int width,
                                     int height) {
  std::vector<Cell> cells;
  for (const Cell& c : ball_cells(center, r))
    if (c.x >= 0 && c.x < width && c.y >= 0 && c.y < height)
      cells.push_back(c);
  return cells;
}

SpinField ground_state(const NoiseField& noise, double epsilon,
                       const BoundaryCondition& bc, const Stencil& stencil,
                       EnergyMode mode) {
  if (epsilon < 0.0) throw std::invalid_argument("ground_state: epsilon < 0");
  const CutGraph g = build_energy_graph(noise, epsilon, bc, stencil, mode);
  const MinCutResult cut = solve_min_cut(g);

  SpinField spin;
  spin.width = noise.width;
  spin.height = noise.height;
  spin.bc = bc.kind;
  spin.noise_seed = noise.seed;
  spin.noise_kind = noise.kind;
  spin.epsilon = epsilon;
  spin.stencil = stencil.kind();
  spin.mode = mode;
  spin.values.resize(static_cast<std::size_t>(spin.width) * spin.height);
  for (std::size_t i = 0; i < spin.values.size(); ++i)
    spin.values[i] = cut.source_side[i] ? +1 : -1;
  spin.energy = cut.value + g.offset;

  // Faithfulness: the decoded configuration's energy must match the cut.
  const double direct = spin_energy(spin.values, spin.width, spin.height,
                                    &noise, epsilon, bc, stencil, mode);
  if (std::abs(direct - spin.energy) >
      1e-6 * std::max(1.0, std::abs(direct)))
    throw std::logic_error("ground_state: energy bookkeeping mismatch");
  return spin;
}

namespace {

NoiseField sample_noise(NoiseKind kind, int w, int h, std::uint64_t seed) {
  return kind == NoiseKind::DiscretizedWN ? sample_discretized_wn(w, h, seed)
                                          : sample_regularized_wn(w, h, seed);
}

}  // namespace

OrderParameter order_parameter(double epsilon, int L, int n_samples,
                               std::uint64_t master_seed, NoiseKind kind,
                               StencilKind stencil_kind, EnergyMode mode) {
  if (n_samples < 1)
    throw std::invalid_argument("order_parameter: n_samples < 1");
  const Stencil stencil = Stencil::make(stencil_kind);
  int differ = 0;
  for (int i = 0; i < n_samples; ++i) {
    const std::uint64_t seed = derive_key(master_seed, i);
    const NoiseField noise = sample_noise(kind, L, L, seed);
    const SpinField plus =
        ground_state(noise, epsilon, BoundaryCondition::plus(), stencil, mode);
    const SpinField minus = ground_state(noise, epsilon,
                                         BoundaryCondition::minus(), stencil,
                                         mode);
    for (std::size_t k = 0; k < plus.values.size(); ++k)
      if (plus.values[k] < minus.values[k])
        throw std::logic_error(
            "order_parameter: monotone coupling violated (sigma+ < sigma-)");
    const Cell o = plus.origin();
    if (plus.at(o.x, o.y) != minus.at(o.x, o.y)) ++differ;
  }
  OrderParameter res;
  res.n_samples = n_samples;
  res.m_hat = static_cast<double>(differ) / n_samples;
  res.std_err = std::sqrt(res.m_hat * (1.0 - res.m_hat) / n_samples);
  return res;
}

CorrelationLength correlation_length(double epsilon, double p0,
                                     std::span<const int> L_grid,
                                     int n_samples, std::uint64_t master_seed,
                                     NoiseKind kind, StencilKind stencil,
                                     EnergyMode mode) {
  if (L_grid.empty())
    throw std::invalid_argument("correlation_length: empty grid");
  for (std::size_t i = 1; i < L_grid.size(); ++i)
    if (L_grid[i] <= L_grid[i - 1])
      throw std::invalid_argument("correlation_length: grid not increasing");

  CorrelationLength res;
  for (const int L : L_grid) {
    const OrderParameter mp = order_parameter(
        epsilon, L, n_samples, derive_key(master_seed, L), kind, stencil,
        mode);
    res.table.emplace_back(L, mp.m_hat, mp.std_err);
    if (!res.reached && mp.m_hat + 2.0 * mp.std_err < p0) {
      res.reached = true;
      res.L_star = L;
    }
  }
  return res;
}

AuditResult local_minimality_audit(const SpinField& spin,
                                   const NoiseField& noise, double epsilon,
                                   int n_balls, std::uint64_t seed) {
  AuditResult res;
  const Stencil stencil = Stencil::make(spin.stencil);
  const PairWeighting weighting = spin.mode == EnergyMode::RFIM
                                      ? PairWeighting::RFIM
                                      : PairWeighting::ContinuumBV;
  BoundaryCondition bc;
  bc.kind = spin.bc;
  const std::uint64_t key = derive_key(seed, 0xA0D17);
  const double rmax = std::max(1.0, std::min(spin.width, spin.height) / 3.0);
  for (int k = 0; k < n_balls; ++k) {
    const int cx = static_cast<int>(rng_uniform(key, 3 * k) * spin.width);
    const int cy =
        static_cast<int>(rng_uniform(key, 3 * k + 1) * spin.height);
    const double r = 1.0 + rng_uniform(key, 3 * k + 2) * (rmax - 1.0);
    const std::vector<Cell> ball = ball_cells({cx, cy}, r);
    bool in_box = true;
    for (const Cell& c : ball)
      if (c.x < 0 || c.x >= spin.width || c.y < 0 || c.y >= spin.height)
        in_box = false;
    if (!in_box) {
      ++res.skipped;
      continue;
    }
    ++res.checked;
    const double current =
        local_energy(spin.values, spin.width, spin.height, ball, &noise,
                     epsilon, bc, stencil, weighting);
    const ConstrainedResult best = constrained_minimize(
        spin.values, spin.width, spin.height, ball, &noise, epsilon, bc,
        stencil, weighting);
    if (current - best.energy > 1e-9)
      res.violations.push_back({{cx, cy}, r, current - best.energy});
  }
  return res;
}

}  // namespace rfc
