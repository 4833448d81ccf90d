#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "rfc/noise.hpp"
#include "rfc/stencil.hpp"

namespace rfc {

// ---------------------------------------------------------------------------
// s-t networks

struct Arc {
  int from, to;
  double cap;
};

struct CutGraph {
  int node_count = 0;
  int source = -1;
  int sink = -1;
  std::vector<Arc> arcs;
  // Cell behind each grid node; nodes [0, node_cell.size()) are grid nodes
  // (box cells first, then ghost boundary cells), the rest are terminals.
  std::vector<Cell> node_cell;
  // Energy of the decoded configuration = cut value + offset (the affine
  // shift from moving field terms to nonnegative terminal capacities).
  double offset = 0.0;
  // Capacity used for hard-constraint arcs: strictly larger than the sum of
  // all finite capacities, so no hard arc is ever cut.
  double sentinel_cap = 0.0;
};

struct MinCutResult {
  double value = 0.0;
  // Canonical minimum cut: nodes reachable from the source in the residual
  // network (the source-side-minimal minimum cut). Indexed by node.
  std::vector<std::uint8_t> source_side;
};

// Exact max-flow / min-cut; deterministic for fixed input. Verifies strong
// duality (cut capacity == flow value) on every solve.
MinCutResult solve_min_cut(const CutGraph& graph);

// Debug dump, one arc per line: "from to capacity".
void dump_graph(const CutGraph& graph, const std::string& path);

// ---------------------------------------------------------------------------
// Reusable solver core (Boykov-Kolmogorov style, tuned for grid graphs).
//
// Topology is set once; capacities can be refilled between solves, which the
// ratio-optimization inner loop relies on. Not thread-safe; use one instance
// per thread.

class BKSolver {
 public:
  void init(int num_nodes, int num_edges_hint = 0);
  // Returns the edge id used with set_edge_cap.
  int add_edge(int u, int v);
  void finish_topology();

  // Must be called after finish_topology and before solve; resets flow state.
  void begin_caps();
  void set_edge_cap(int edge, double cap_uv, double cap_vu);
  void add_terminal_cap(int node, double source_cap, double sink_cap);

  // Monotone capacity updates between solves that keep the accumulated flow
  // feasible, so the next solve() only augments incrementally. bump_sink_cap
  // adds sink capacity at a node; a node-cost increase of d is equivalent to
  // that up to a constant absorbed by the caller's offset bookkeeping.
  void bump_edge_cap(int edge, double d_uv, double d_vu);
  void bump_sink_cap(int node, double d);

  // Maximizes flow given the current residual state. May be called again
  // after monotone capacity bumps; search trees are rebuilt but the flow
  // found so far is kept.
  double solve();

  // Valid after solve(): canonical (source-side-minimal) cut membership.
  void source_side(std::vector<std::uint8_t>& out) const;

 private:
  int grow();
  void augment(int connecting_arc);
  void adopt();
  bool has_root_path(int node);
  void make_active(int node);
  int next_active();

  int n_ = 0;
  std::vector<int> first_;   // CSR offsets into arc_ids_
  std::vector<int> arc_of_;  // arcs in CSR order (by tail node)
  std::vector<int> head_;    // per arc
  std::vector<int> degree_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<double> rescap_;  // per arc; sister of arc a is a^1
  std::vector<double> tr_cap_;  // >0: residual from source, <0: to sink
  std::vector<std::int8_t> tree_;
  std::vector<int> parent_;  // arc from this node toward its parent; -2 = root
  std::vector<int> ts_, dist_;
  std::vector<std::uint8_t> in_active_;
  std::vector<int> active_, orphans_;
  std::size_t active_head_ = 0;
  double flow_ = 0.0;
  int time_ = 0;
  bool topology_done_ = false;
};

// ---------------------------------------------------------------------------
// Energy encodings

enum class EnergyMode : std::uint8_t { RFIM, ContinuumBV };

struct BoundaryCondition {
  enum class Kind : std::uint8_t { Plus, Minus, Free, Spins };
  Kind kind = Kind::Plus;
  std::function<int(Cell)> tau;  // Spins only: ghost cell -> +1/-1

  static BoundaryCondition plus() { return {Kind::Plus, nullptr}; }
  static BoundaryCondition minus() { return {Kind::Minus, nullptr}; }
  static BoundaryCondition free() { return {Kind::Free, nullptr}; }
  static BoundaryCondition spins(std::function<int(Cell)> t) {
    return {Kind::Spins, std::move(t)};
  }

  bool fixed() const { return kind != Kind::Free; }
  int ghost_value(Cell c) const;
  std::string name() const;
};

// Disagreement cost per stencil neighbor pair:
//   RFIM:        4 * weight   (|sigma_x - sigma_y|^2 with sigma in {-1,+1})
//   ContinuumBV: 2 * weight   (perimeter term int|grad m| = 2 x jump length)
double pair_cost(EnergyMode mode, double stencil_weight);

// Encodes the boxed energy
//   E(sigma) = sum_{x~y in box} c_xy 1{sigma_x != sigma_y}
//            + sum_{x in box, y ghost} c_xy 1{sigma_x != tau_y}
//            - epsilon sum_{x in box} xi_x sigma_x
// as an s-t cut problem; minimum cuts are exactly the energy minimizers and
// the energy of the decoded configuration is cut value + offset. Fixed
// boundary conditions pin ghost cells through sentinel-capacity arcs.
// Source side decodes to sigma = +1.
CutGraph build_energy_graph(const NoiseField& noise, double epsilon,
                            const BoundaryCondition& bc,
                            const Stencil& stencil, EnergyMode mode);

// Direct energy evaluation of a +/-1 configuration (row-major values),
// used by the enumeration oracle and the faithfulness tests.
double spin_energy(std::span<const std::int8_t> values, int width, int height,
                   const NoiseField* noise, double epsilon,
                   const BoundaryCondition& bc, const Stencil& stencil,
                   EnergyMode mode);

// Pair weighting for constrained local solves.
enum class PairWeighting : std::uint8_t { RFIM, ContinuumBV, PerimeterOnly };

// Energy restricted to `region`: pairs with at least one endpoint in the
// region (the other endpoint may be a frozen box cell or a ghost) plus field
// terms over the region. PerimeterOnly drops the field term and weights each
// cut pair by the bare stencil weight (= cut length).
double local_energy(std::span<const std::int8_t> values, int width, int height,
                    std::span<const Cell> region, const NoiseField* noise,
                    double epsilon, const BoundaryCondition& bc,
                    const Stencil& stencil, PairWeighting weighting);

struct ConstrainedResult {
  std::vector<std::int8_t> region_values;  // aligned with the region list
  double energy = 0.0;                     // optimal local_energy
};

// Minimizes local_energy over configurations that agree with `values`
// outside `region` (a constrained min-cut with frozen exterior).
ConstrainedResult constrained_minimize(std::span<const std::int8_t> values,
                                       int width, int height,
                                       std::span<const Cell> region,
                                       const NoiseField* noise, double epsilon,
                                       const BoundaryCondition& bc,
                                       const Stencil& stencil,
                                       PairWeighting weighting);

}  // namespace rfc
