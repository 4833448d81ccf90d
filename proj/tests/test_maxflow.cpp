#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "rfc/groundstate.hpp"
#include "rfc/maxflow.hpp"
#include "rfc/noise.hpp"
#include "rfc/oracle.hpp"
#include "rfc/rng.hpp"

using namespace rfc;

namespace {

NoiseField zero_field(int w, int h) {
  NoiseField f;
  f.width = w;
  f.height = h;
  f.values.assign(static_cast<std::size_t>(w) * h, 0.0);
  f.origin_x = w / 2;
  f.origin_y = h / 2;
  return f;
}

}  // namespace

TEST_CASE("min cut: two-node and bottleneck examples") {
  {
    CutGraph g;
    g.node_count = 2;
    g.source = 0;
    g.sink = 1;
    g.arcs = {{0, 1, 3.0}};
    const MinCutResult r = solve_min_cut(g);
    CHECK(r.value == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(r.source_side == std::vector<std::uint8_t>{1, 0});
  }
  {
    CutGraph g;  // s -> a (5), a -> t (2): bottleneck 2, a on the source side
    g.node_count = 3;
    g.source = 0;
    g.sink = 2;
    g.arcs = {{0, 1, 5.0}, {1, 2, 2.0}};
    const MinCutResult r = solve_min_cut(g);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(r.source_side == std::vector<std::uint8_t>{1, 1, 0});
  }
}

TEST_CASE("min cut: canonical cut is source-side minimal and deterministic") {
  // s -> a (1), a -> t (1): tie between cutting either arc; the canonical
  // (residual-reachability) cut puts a on the sink side.
  CutGraph g;
  g.node_count = 3;
  g.source = 0;
  g.sink = 2;
  g.arcs = {{0, 1, 1.0}, {1, 2, 1.0}};
  for (int rep = 0; rep < 3; ++rep) {
    const MinCutResult r = solve_min_cut(g);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(r.source_side == std::vector<std::uint8_t>{1, 0, 0});
  }
}

TEST_CASE("min cut: value equals exhaustive partition minimum (random)") {
  // Random small graphs against a brute-force scan of all partitions.
  for (int trial = 0; trial < 50; ++trial) {
    const std::uint64_t key = derive_key(0xC0FFEE, trial);
    const int n = 5;  // nodes 0..4; source 0, sink 4
    CutGraph g;
    g.node_count = n;
    g.source = 0;
    g.sink = n - 1;
    int draw = 0;
    for (int u = 0; u < n; ++u)
      for (int v = 0; v < n; ++v) {
        if (u == v) continue;
        if (rng_uniform(key, draw++) < 0.6)
          g.arcs.push_back({u, v, 5.0 * rng_uniform(key, draw)});
        ++draw;
      }
    const MinCutResult r = solve_min_cut(g);

    double best = 1e300;
    for (int mask = 0; mask < (1 << n); ++mask) {
      if (!(mask & 1) || (mask & (1 << (n - 1)))) continue;  // s in, t out
      double cut = 0.0;
      for (const Arc& a : g.arcs)
        if ((mask >> a.from & 1) && !(mask >> a.to & 1)) cut += a.cap;
      best = std::min(best, cut);
    }
    CHECK(r.value == doctest::Approx(best).epsilon(1e-9));
  }
}

TEST_CASE("min cut: malformed graphs are rejected") {
  CutGraph g;
  g.node_count = 2;
  g.source = 0;
  g.sink = 0;
  CHECK_THROWS_AS(solve_min_cut(g), std::invalid_argument);
  g.sink = 1;
  g.arcs = {{0, 5, 1.0}};
  CHECK_THROWS_AS(solve_min_cut(g), std::invalid_argument);
  g.arcs = {{0, 1, -1.0}};
  CHECK_THROWS_AS(solve_min_cut(g), std::invalid_argument);
}

TEST_CASE("energy graph: zero field, Plus bc -> all plus, energy 0") {
  const NoiseField f = zero_field(4, 4);
  for (auto mode : {EnergyMode::RFIM, EnergyMode::ContinuumBV}) {
    const SpinField s = ground_state(f, 1.0, BoundaryCondition::plus(),
                                     Stencil::make(StencilKind::Lattice4),
                                     mode);
    for (auto v : s.values) CHECK(v == +1);
    CHECK(s.energy == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("energy graph: 1x1 box, eps*xi = -10, RFIM, Plus bc") {
  // sigma = +1 costs the field term +10; sigma = -1 costs 4 boundary
  // disagreements x 4 = 16 minus the field gain 10: energy 6. The solver must
  // pick -1.
  NoiseField f = zero_field(1, 1);
  f.values[0] = -10.0;
  const SpinField s = ground_state(f, 1.0, BoundaryCondition::plus(),
                                   Stencil::make(StencilKind::Lattice4),
                                   EnergyMode::RFIM);
  CHECK(s.at(0, 0) == -1);
  CHECK(s.energy == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("energy graph: solver equals enumeration oracle on small boxes") {
  int checked = 0;
  for (int trial = 0; trial < 25; ++trial)
    for (double eps : {0.1, 1.0})
      for (auto mode : {EnergyMode::RFIM, EnergyMode::ContinuumBV}) {
        const NoiseField f =
            sample_discretized_wn(4, 4, derive_key(0xE0, trial));
        const BoundaryCondition bc =
            trial % 2 ? BoundaryCondition::minus() : BoundaryCondition::plus();
        const Stencil st = Stencil::make(
            trial % 3 == 0 ? StencilKind::Crofton8 : StencilKind::Lattice4);
        const SpinField s = ground_state(f, eps, bc, st, mode);
        const auto o = oracle::enumerate_ground_state(f, eps, bc, st, mode);
        CHECK(std::abs(s.energy - o.min_energy) < 1e-9);
        // The decoded configuration's direct energy must match too.
        CHECK(std::abs(spin_energy(s.values, 4, 4, &f, eps, bc, st, mode) -
                       o.min_energy) < 1e-9);
        ++checked;
      }
  CHECK(checked == 100);
}

TEST_CASE("energy graph: free boundary and spins boundary") {
  const NoiseField f = sample_discretized_wn(3, 3, 51);
  const Stencil st = Stencil::make(StencilKind::Lattice4);
  // Free bc: no ghost cells; still matches enumeration.
  {
    const SpinField s = ground_state(f, 0.7, BoundaryCondition::free(), st,
                                     EnergyMode::RFIM);
    const auto o = oracle::enumerate_ground_state(
        f, 0.7, BoundaryCondition::free(), st, EnergyMode::RFIM);
    CHECK(std::abs(s.energy - o.min_energy) < 1e-9);
  }
  // Spins bc (Dobrushin-type): top half plus, bottom half minus.
  {
    const BoundaryCondition bc =
        BoundaryCondition::spins([](Cell c) { return c.y >= 2 ? +1 : -1; });
    const SpinField s = ground_state(f, 0.7, bc, st, EnergyMode::RFIM);
    const auto o =
        oracle::enumerate_ground_state(f, 0.7, bc, st, EnergyMode::RFIM);
    CHECK(std::abs(s.energy - o.min_energy) < 1e-9);
  }
}

TEST_CASE("energy graph: sign symmetry (xi, tau) -> (-xi, -tau)") {
  for (int trial = 0; trial < 10; ++trial) {
    NoiseField f = sample_discretized_wn(5, 5, derive_key(0x51, trial));
    NoiseField g = f;
    for (auto& v : g.values) v = -v;
    const Stencil st = Stencil::make(StencilKind::Lattice4);
    const SpinField sp = ground_state(f, 0.8, BoundaryCondition::plus(), st,
                                      EnergyMode::RFIM);
    const SpinField sm = ground_state(g, 0.8, BoundaryCondition::minus(), st,
                                      EnergyMode::RFIM);
    CHECK(sp.energy == doctest::Approx(sm.energy).epsilon(1e-12));
  }
}

TEST_CASE("energy graph: large-eps dominance decodes per-cell field signs") {
  const NoiseField f = sample_discretized_wn(6, 6, 77);
  const Stencil st = Stencil::make(StencilKind::Lattice4);
  const double eps = 1e6;
  const SpinField s =
      ground_state(f, eps, BoundaryCondition::plus(), st, EnergyMode::RFIM);
  for (int y = 0; y < 6; ++y)
    for (int x = 0; x < 6; ++x)
      if (2.0 * eps * std::abs(f.at(x, y)) > 32.0)  // > total incident cost
        CHECK(s.at(x, y) == (f.at(x, y) > 0 ? +1 : -1));
}

TEST_CASE("constrained minimize: frozen exterior matches oracle") {
  for (int trial = 0; trial < 20; ++trial) {
    const NoiseField f = sample_discretized_wn(5, 5, derive_key(0xAB, trial));
    const Stencil st = Stencil::make(
        trial % 2 ? StencilKind::Crofton8 : StencilKind::Lattice4);
    const BoundaryCondition bc = BoundaryCondition::plus();
    // Start from a random configuration, re-optimize a 3x3 interior region.
    std::vector<std::int8_t> vals(25);
    const std::uint64_t key = derive_key(0xCD, trial);
    for (int i = 0; i < 25; ++i)
      vals[i] = rng_uniform(key, i) < 0.5 ? -1 : +1;
    std::vector<Cell> region;
    for (int y = 1; y <= 3; ++y)
      for (int x = 1; x <= 3; ++x) region.push_back({x, y});

    for (auto weighting :
         {PairWeighting::RFIM, PairWeighting::ContinuumBV,
          PairWeighting::PerimeterOnly}) {
      const ConstrainedResult r = constrained_minimize(
          vals, 5, 5, region, &f, 0.6, bc, st, weighting);
      // Exhaustive minimum over the 2^9 interior configurations.
      double best = 1e300;
      std::vector<std::int8_t> work = vals;
      for (int mask = 0; mask < (1 << 9); ++mask) {
        for (int i = 0; i < 9; ++i)
          work[region[i].y * 5 + region[i].x] = (mask >> i & 1) ? +1 : -1;
        best = std::min(best, local_energy(work, 5, 5, region, &f, 0.6, bc,
                                           st, weighting));
      }
      CHECK(r.energy == doctest::Approx(best).epsilon(1e-9));
      // Returned configuration attains the returned energy.
      work = vals;
      for (int i = 0; i < 9; ++i)
        work[region[i].y * 5 + region[i].x] = r.region_values[i];
      CHECK(local_energy(work, 5, 5, region, &f, 0.6, bc, st, weighting) ==
            doctest::Approx(r.energy).epsilon(1e-9));
    }
  }
}

TEST_CASE("constrained minimize: all-plus exterior gives perimeter 0") {
  const NoiseField f = zero_field(5, 5);
  std::vector<std::int8_t> vals(25, +1);
  std::vector<Cell> region = {{1, 1}, {2, 1}, {1, 2}, {2, 2}};
  const ConstrainedResult r = constrained_minimize(
      vals, 5, 5, region, nullptr, 0.0, BoundaryCondition::free(),
      Stencil::make(StencilKind::Lattice4), PairWeighting::PerimeterOnly);
  CHECK(r.energy == doctest::Approx(0.0).epsilon(1e-15));
  for (auto v : r.region_values) CHECK(v == +1);
}

TEST_CASE("monotone coupling: plus ground state dominates minus") {
  for (int trial = 0; trial < 30; ++trial) {
    const NoiseField f = sample_discretized_wn(8, 8, derive_key(0xFC, trial));
    const Stencil st = Stencil::make(StencilKind::Lattice4);
    const SpinField sp = ground_state(f, 0.5, BoundaryCondition::plus(), st,
                                      EnergyMode::RFIM);
    const SpinField sm = ground_state(f, 0.5, BoundaryCondition::minus(), st,
                                      EnergyMode::RFIM);
    for (std::size_t i = 0; i < sp.values.size(); ++i)
      CHECK(sp.values[i] >= sm.values[i]);
  }
}

TEST_CASE("local minimality audit: clean on ground states, catches flips") {
  const NoiseField f = sample_discretized_wn(12, 12, 4242);
  const SpinField s =
      ground_state(f, 0.5, BoundaryCondition::plus(),
                   Stencil::make(StencilKind::Lattice4), EnergyMode::RFIM);
  const AuditResult clean = local_minimality_audit(s, f, 0.5, 20, 9);
  CHECK(clean.violations.empty());
  CHECK(clean.checked > 0);
  CHECK(local_minimality_audit(s, f, 0.5, 0, 9).violations.empty());

  // Flip the strongest-field interior cell away from its ground-state value;
  // some audited ball must now improve on it.
  SpinField bad = s;
  int bx = 6, by = 6;
  double bestf = -1.0;
  for (int y = 3; y < 9; ++y)
    for (int x = 3; x < 9; ++x)
      if (std::abs(f.at(x, y)) > bestf) {
        bestf = std::abs(f.at(x, y));
        bx = x;
        by = y;
      }
  bad.values[by * 12 + bx] = -bad.values[by * 12 + bx];
  const AuditResult dirty = local_minimality_audit(bad, f, 0.5, 400, 9);
  CHECK(!dirty.violations.empty());
}
