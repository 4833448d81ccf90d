#include "rfc/maxflow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

namespace rfc {

// ---------------------------------------------------------------------------
// BKSolver

namespace {
constexpr int kRoot = -2;
constexpr int kNoParent = -1;
constexpr std::int8_t kFree = 0, kSource = 1, kSink = 2;
}  // namespace

void BKSolver::init(int num_nodes, int num_edges_hint) {
  n_ = num_nodes;
  edges_.clear();
  if (num_edges_hint > 0) edges_.reserve(num_edges_hint);
  topology_done_ = false;
}

int BKSolver::add_edge(int u, int v) {
  edges_.emplace_back(u, v);
  return static_cast<int>(edges_.size()) - 1;
}

void BKSolver::finish_topology() {
  const int m = static_cast<int>(edges_.size());
  degree_.assign(n_, 0);
  for (auto [u, v] : edges_) {
    ++degree_[u];
    ++degree_[v];
  }
  first_.assign(n_ + 1, 0);
  for (int i = 0; i < n_; ++i) first_[i + 1] = first_[i] + degree_[i];
  arc_of_.assign(2 * m, 0);
  head_.assign(2 * m, 0);
  std::vector<int> pos(first_.begin(), first_.end() - 1);
  for (int e = 0; e < m; ++e) {
    auto [u, v] = edges_[e];
    head_[2 * e] = v;
    head_[2 * e + 1] = u;
    arc_of_[pos[u]++] = 2 * e;
    arc_of_[pos[v]++] = 2 * e + 1;
  }
  rescap_.assign(2 * m, 0.0);
  tr_cap_.assign(n_, 0.0);
  tree_.assign(n_, kFree);
  parent_.assign(n_, kNoParent);
  ts_.assign(n_, 0);
  dist_.assign(n_, 0);
  in_active_.assign(n_, 0);
  topology_done_ = true;
}

void BKSolver::begin_caps() {
  std::fill(rescap_.begin(), rescap_.end(), 0.0);
  std::fill(tr_cap_.begin(), tr_cap_.end(), 0.0);
  flow_ = 0.0;
}

void BKSolver::set_edge_cap(int edge, double cap_uv, double cap_vu) {
  rescap_[2 * edge] = cap_uv;
  rescap_[2 * edge + 1] = cap_vu;
}

void BKSolver::add_terminal_cap(int node, double source_cap, double sink_cap) {
  // Saturate the common part of the two terminal arcs immediately.
  flow_ += std::min(source_cap, sink_cap);
  tr_cap_[node] += source_cap - sink_cap;
}

void BKSolver::bump_edge_cap(int edge, double d_uv, double d_vu) {
  rescap_[2 * edge] += d_uv;
  rescap_[2 * edge + 1] += d_vu;
}

void BKSolver::bump_sink_cap(int node, double d) { tr_cap_[node] -= d; }

void BKSolver::make_active(int node) {
  if (!in_active_[node]) {
    in_active_[node] = 1;
    active_.push_back(node);
  }
}

int BKSolver::next_active() {
  while (active_head_ < active_.size()) {
    const int v = active_[active_head_++];
    if (in_active_[v]) {
      in_active_[v] = 0;
      return v;
    }
  }
  return -1;
}

int BKSolver::grow() {
  int p;
  while ((p = next_active()) != -1) {
    if (tree_[p] == kFree) continue;
    const std::int8_t t = tree_[p];
    for (int k = first_[p]; k < first_[p + 1]; ++k) {
      const int a = arc_of_[k];
      const double res = (t == kSource) ? rescap_[a] : rescap_[a ^ 1];
      if (res <= 0.0) continue;
      const int q = head_[a];
      if (tree_[q] == kFree) {
        tree_[q] = t;
        parent_[q] = a ^ 1;  // arc q -> p
        ts_[q] = ts_[p];
        dist_[q] = dist_[p] + 1;
        make_active(q);
      } else if (tree_[q] != t) {
        // Re-activate p so remaining arcs are scanned after augmentation.
        make_active(p);
        return (t == kSource) ? a : (a ^ 1);
      }
    }
  }
  return -1;
}

void BKSolver::augment(int a) {
  const int u = head_[a ^ 1];  // source-tree endpoint
  const int v = head_[a];      // sink-tree endpoint

  double d = rescap_[a];
  int x = u;
  while (parent_[x] != kRoot) {
    const int pa = parent_[x];
    d = std::min(d, rescap_[pa ^ 1]);
    x = head_[pa];
  }
  d = std::min(d, tr_cap_[x]);
  const int s_root = x;
  x = v;
  while (parent_[x] != kRoot) {
    const int pa = parent_[x];
    d = std::min(d, rescap_[pa]);
    x = head_[pa];
  }
  d = std::min(d, -tr_cap_[x]);
  const int t_root = x;

  flow_ += d;
  rescap_[a] -= d;
  rescap_[a ^ 1] += d;

  x = u;
  while (parent_[x] != kRoot) {
    const int pa = parent_[x];
    rescap_[pa ^ 1] -= d;
    rescap_[pa] += d;
    const int next = head_[pa];
    if (rescap_[pa ^ 1] <= 0.0) {
      parent_[x] = kNoParent;
      orphans_.push_back(x);
    }
    x = next;
  }
  tr_cap_[s_root] -= d;
  if (tr_cap_[s_root] <= 0.0) {
    parent_[s_root] = kNoParent;
    orphans_.push_back(s_root);
  }

  x = v;
  while (parent_[x] != kRoot) {
    const int pa = parent_[x];
    rescap_[pa] -= d;
    rescap_[pa ^ 1] += d;
    const int next = head_[pa];
    if (rescap_[pa] <= 0.0) {
      parent_[x] = kNoParent;
      orphans_.push_back(x);
    }
    x = next;
  }
  tr_cap_[t_root] += d;
  if (tr_cap_[t_root] >= 0.0) {
    parent_[t_root] = kNoParent;
    orphans_.push_back(t_root);
  }
}

bool BKSolver::has_root_path(int node) {
  // Walk toward the root; timestamp marks amortize repeated walks within one
  // adoption round.
  static thread_local std::vector<int> chain;
  chain.clear();
  int x = node;
  while (ts_[x] != time_) {
    const int pa = parent_[x];
    if (pa == kNoParent) return false;
    if (pa == kRoot) {
      ts_[x] = time_;
      dist_[x] = 1;
      break;
    }
    chain.push_back(x);
    x = head_[pa];
  }
  int d = dist_[x];
  for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
    ts_[*it] = time_;
    dist_[*it] = ++d;
  }
  return true;
}

void BKSolver::adopt() {
  for (std::size_t oi = 0; oi < orphans_.size(); ++oi) {
    const int o = orphans_[oi];
    const std::int8_t t = tree_[o];
    if (t == kFree) continue;

    int best_arc = kNoParent;
    int best_dist = 0;
    for (int k = first_[o]; k < first_[o + 1]; ++k) {
      const int a = arc_of_[k];
      const double res = (t == kSource) ? rescap_[a ^ 1] : rescap_[a];
      if (res <= 0.0) continue;
      const int q = head_[a];
      if (tree_[q] != t || parent_[q] == kNoParent) continue;
      if (!has_root_path(q)) continue;
      if (best_arc == kNoParent || dist_[q] < best_dist) {
        best_arc = a;
        best_dist = dist_[q];
      }
    }

    if (best_arc != kNoParent) {
      parent_[o] = best_arc;
      ts_[o] = time_;
      dist_[o] = best_dist + 1;
      continue;
    }

    // No admissible parent: o leaves the tree.
    for (int k = first_[o]; k < first_[o + 1]; ++k) {
      const int a = arc_of_[k];
      const int q = head_[a];
      if (tree_[q] != t) continue;
      const double res = (t == kSource) ? rescap_[a ^ 1] : rescap_[a];
      if (res > 0.0) make_active(q);
      if (parent_[q] != kNoParent && parent_[q] != kRoot &&
          head_[parent_[q]] == o) {
        parent_[q] = kNoParent;
        orphans_.push_back(q);
      }
    }
    tree_[o] = kFree;
  }
  orphans_.clear();
}

double BKSolver::solve() {
  if (!topology_done_)
    throw std::logic_error("BKSolver: topology not finalized");
  std::fill(tree_.begin(), tree_.end(), kFree);
  std::fill(parent_.begin(), parent_.end(), kNoParent);
  std::fill(ts_.begin(), ts_.end(), 0);
  std::fill(in_active_.begin(), in_active_.end(), 0);
  active_.clear();
  orphans_.clear();
  active_head_ = 0;
  time_ = 0;

  for (int v = 0; v < n_; ++v) {
    if (tr_cap_[v] > 0.0) {
      tree_[v] = kSource;
      parent_[v] = kRoot;
      dist_[v] = 1;
      make_active(v);
    } else if (tr_cap_[v] < 0.0) {
      tree_[v] = kSink;
      parent_[v] = kRoot;
      dist_[v] = 1;
      make_active(v);
    }
  }

  while (true) {
    const int a = grow();
    if (a == -1) break;
    ++time_;
    augment(a);
    adopt();
  }
  return flow_;
}

void BKSolver::source_side(std::vector<std::uint8_t>& out) const {
  // Canonical minimal cut: residual reachability from the source, independent
  // of the particular max flow the search produced.
  out.assign(n_, 0);
  std::vector<int> stack;
  for (int v = 0; v < n_; ++v) {
    if (tr_cap_[v] > 0.0) {
      out[v] = 1;
      stack.push_back(v);
    }
  }
  while (!stack.empty()) {
    const int p = stack.back();
    stack.pop_back();
    for (int k = first_[p]; k < first_[p + 1]; ++k) {
      const int a = arc_of_[k];
      if (rescap_[a] <= 0.0) continue;
      const int q = head_[a];
      if (!out[q]) {
        out[q] = 1;
        stack.push_back(q);
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Generic CutGraph interface

MinCutResult solve_min_cut(const CutGraph& graph) {
  const int n = graph.node_count;
  if (n < 2 || graph.source < 0 || graph.source >= n || graph.sink < 0 ||
      graph.sink >= n || graph.source == graph.sink)
    throw std::invalid_argument("solve_min_cut: malformed terminals");
  for (const Arc& a : graph.arcs) {
    if (a.from < 0 || a.from >= n || a.to < 0 || a.to >= n)
      throw std::invalid_argument("solve_min_cut: arc endpoint out of range");
    if (!(a.cap >= 0.0) || !std::isfinite(a.cap))
      throw std::invalid_argument("solve_min_cut: bad capacity");
  }

  // Map non-terminal nodes onto the solver; terminal arcs become node caps.
  std::vector<int> id(n, -1);
  int m = 0;
  for (int v = 0; v < n; ++v)
    if (v != graph.source && v != graph.sink) id[v] = m++;

  BKSolver solver;
  solver.init(m, static_cast<int>(graph.arcs.size()));
  std::vector<std::pair<int, double>> edge_caps;
  // Terminal capacities must be aggregated per node: the solver stores only
  // the net terminal residual, with the source/sink overlap pre-saturated in
  // a single add_terminal_cap call.
  std::vector<double> src_cap(m, 0.0), snk_cap(m, 0.0);
  double direct = 0.0;  // source -> sink arcs sit in every cut
  for (const Arc& a : graph.arcs) {
    if (a.from == graph.source) {
      if (a.to == graph.sink)
        direct += a.cap;
      else
        src_cap[id[a.to]] += a.cap;
    } else if (a.to == graph.sink) {
      snk_cap[id[a.from]] += a.cap;
    } else if (a.to == graph.source || a.from == graph.sink ||
               a.from == a.to) {
      // Arcs into the source, out of the sink, or self loops never carry
      // flow in some maximum flow; skipping them leaves the canonical cut
      // unchanged.
    } else {
      const int e = solver.add_edge(id[a.from], id[a.to]);
      edge_caps.push_back({e, a.cap});
    }
  }
  solver.finish_topology();
  solver.begin_caps();
  for (auto [e, c] : edge_caps) solver.set_edge_cap(e, c, 0.0);
  for (int v = 0; v < m; ++v)
    if (src_cap[v] > 0.0 || snk_cap[v] > 0.0)
      solver.add_terminal_cap(v, src_cap[v], snk_cap[v]);
  // Duplicate edges between the same pair are separate parallel arcs; the
  // solver handles them as such.
  const double flow = solver.solve() + direct;

  std::vector<std::uint8_t> side;
  solver.source_side(side);
  MinCutResult res;
  res.value = flow;
  res.source_side.assign(n, 0);
  res.source_side[graph.source] = 1;
  for (int v = 0; v < n; ++v)
    if (id[v] >= 0 && side[id[v]]) res.source_side[v] = 1;

  // Strong duality check on every solve.
  double cut = 0.0;
  for (const Arc& a : graph.arcs)
    if (res.source_side[a.from] && !res.source_side[a.to]) cut += a.cap;
  const double tol = 1e-6 * std::max(1.0, std::abs(flow));
  if (std::abs(cut - flow) > tol)
    throw std::logic_error("solve_min_cut: duality check failed");
  return res;
}

void dump_graph(const CutGraph& graph, const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) throw std::runtime_error("dump_graph: cannot open " + path);
  std::fprintf(fp, "# nodes %d source %d sink %d\n", graph.node_count,
               graph.source, graph.sink);
  for (const Arc& a : graph.arcs)
    std::fprintf(fp, "%d %d %.17g\n", a.from, a.to, a.cap);
  std::fclose(fp);
}

// ---------------------------------------------------------------------------
// Energy encodings

int BoundaryCondition::ghost_value(Cell c) const {
  switch (kind) {
    case Kind::Plus: return +1;
    case Kind::Minus: return -1;
    case Kind::Spins: return tau(c) >= 0 ? +1 : -1;
    case Kind::Free: return 0;
  }
  return 0;
}

std::string BoundaryCondition::name() const {
  switch (kind) {
    case Kind::Plus: return "plus";
    case Kind::Minus: return "minus";
    case Kind::Free: return "free";
    case Kind::Spins: return "spins";
  }
  return "?";
}

double pair_cost(EnergyMode mode, double w) {
  return (mode == EnergyMode::RFIM) ? 4.0 * w : 2.0 * w;
}

namespace {

double weighting_cost(PairWeighting weighting, double w) {
  switch (weighting) {
    case PairWeighting::RFIM: return 4.0 * w;
    case PairWeighting::ContinuumBV: return 2.0 * w;
    case PairWeighting::PerimeterOnly: return w;
  }
  return w;
}

}  // namespace

CutGraph build_energy_graph(const NoiseField& noise, double epsilon,
                            const BoundaryCondition& bc,
                            const Stencil& stencil, EnergyMode mode) {
  if (epsilon < 0.0)
    throw std::invalid_argument("build_energy_graph: epsilon < 0");
  const int w = noise.width, h = noise.height;
  const auto cell_node = [w](int x, int y) { return y * w + x; };
  const auto inside = [w, h](int x, int y) {
    return x >= 0 && x < w && y >= 0 && y < h;
  };

  CutGraph g;
  g.node_cell.reserve(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) g.node_cell.push_back({x, y});

  // Ghost layer: outside cells reachable through a stencil edge.
  std::map<Cell, int> ghost_id;
  if (bc.fixed()) {
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        for (const StencilDir& d : stencil.dirs())
          for (int s : {+1, -1}) {
            const int nx = x + s * d.dx, ny = y + s * d.dy;
            if (!inside(nx, ny)) {
              const Cell gc{nx, ny};
              if (!ghost_id.count(gc)) {
                ghost_id[gc] = w * h + static_cast<int>(ghost_id.size());
                g.node_cell.push_back(gc);
              }
            }
          }
  }
  const int n_grid = static_cast<int>(g.node_cell.size());
  g.node_count = n_grid + 2;
  g.source = n_grid;
  g.sink = n_grid + 1;

  double finite_sum = 0.0;
  const auto add_pair = [&](int u, int v, double c) {
    g.arcs.push_back({u, v, c});
    g.arcs.push_back({v, u, c});
    finite_sum += 2.0 * c;
  };

  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const int u = cell_node(x, y);
      for (const StencilDir& d : stencil.dirs()) {
        const double c = pair_cost(mode, d.weight);
        for (int s : {+1, -1}) {
          const int nx = x + s * d.dx, ny = y + s * d.dy;
          if (inside(nx, ny)) {
            if (s == +1) add_pair(u, cell_node(nx, ny), c);
          } else if (bc.fixed()) {
            add_pair(u, ghost_id.at({nx, ny}), c);
          }
        }
      }
      // Field term -eps*xi*sigma, shifted to a nonnegative terminal arc.
      const double diff = -2.0 * epsilon * noise.at(x, y);
      if (diff > 0.0)
        g.arcs.push_back({u, g.sink, diff});
      else if (diff < 0.0)
        g.arcs.push_back({g.source, u, -diff});
      finite_sum += std::abs(diff);
      g.offset += -epsilon * std::abs(noise.at(x, y));
    }

  g.sentinel_cap = finite_sum + 1.0;
  for (const auto& [gc, node] : ghost_id) {
    if (bc.ghost_value(gc) > 0)
      g.arcs.push_back({g.source, node, g.sentinel_cap});
    else
      g.arcs.push_back({node, g.sink, g.sentinel_cap});
  }
  return g;
}

double spin_energy(std::span<const std::int8_t> values, int width, int height,
                   const NoiseField* noise, double epsilon,
                   const BoundaryCondition& bc, const Stencil& stencil,
                   EnergyMode mode) {
  const auto inside = [&](int x, int y) {
    return x >= 0 && x < width && y >= 0 && y < height;
  };
  const auto at = [&](int x, int y) {
    return values[static_cast<std::size_t>(y) * width + x];
  };
  double e = 0.0;
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const int sx = at(x, y);
      for (const StencilDir& d : stencil.dirs()) {
        const double c = pair_cost(mode, d.weight);
        for (int s : {+1, -1}) {
          const int nx = x + s * d.dx, ny = y + s * d.dy;
          if (inside(nx, ny)) {
            if (s == +1 && at(nx, ny) != sx) e += c;
          } else if (bc.fixed() && bc.ghost_value({nx, ny}) != sx) {
            e += c;
          }
        }
      }
      if (noise && epsilon != 0.0)
        e -= epsilon * noise->at(x, y) * static_cast<double>(sx);
    }
  return e;
}

double local_energy(std::span<const std::int8_t> values, int width, int height,
                    std::span<const Cell> region, const NoiseField* noise,
                    double epsilon, const BoundaryCondition& bc,
                    const Stencil& stencil, PairWeighting weighting) {
  std::vector<std::uint8_t> in_region(
      static_cast<std::size_t>(width) * height, 0);
  for (const Cell& c : region)
    in_region[static_cast<std::size_t>(c.y) * width + c.x] = 1;
  const auto inside = [&](int x, int y) {
    return x >= 0 && x < width && y >= 0 && y < height;
  };
  const auto at = [&](int x, int y) {
    return values[static_cast<std::size_t>(y) * width + x];
  };
  double e = 0.0;
  for (const Cell& c : region) {
    const int sx = at(c.x, c.y);
    for (const StencilDir& d : stencil.dirs()) {
      const double pc = weighting_cost(weighting, d.weight);
      for (int s : {+1, -1}) {
        const int nx = c.x + s * d.dx, ny = c.y + s * d.dy;
        if (inside(nx, ny)) {
          const bool other_in =
              in_region[static_cast<std::size_t>(ny) * width + nx];
          if (other_in && s != +1) continue;  // count in-region pairs once
          if (at(nx, ny) != sx) e += pc;
        } else if (bc.fixed() && bc.ghost_value({nx, ny}) != sx) {
          e += pc;
        }
      }
    }
    if (weighting != PairWeighting::PerimeterOnly && noise && epsilon != 0.0)
      e -= epsilon * noise->at(c.x, c.y) * static_cast<double>(sx);
  }
  return e;
}

ConstrainedResult constrained_minimize(std::span<const std::int8_t> values,
                                       int width, int height,
                                       std::span<const Cell> region,
                                       const NoiseField* noise, double epsilon,
                                       const BoundaryCondition& bc,
                                       const Stencil& stencil,
                                       PairWeighting weighting) {
  const int nr = static_cast<int>(region.size());
  std::vector<int> region_idx(static_cast<std::size_t>(width) * height, -1);
  for (int i = 0; i < nr; ++i)
    region_idx[static_cast<std::size_t>(region[i].y) * width + region[i].x] =
        i;
  const auto inside = [&](int x, int y) {
    return x >= 0 && x < width && y >= 0 && y < height;
  };
  const auto at = [&](int x, int y) {
    return values[static_cast<std::size_t>(y) * width + x];
  };

  // src: cost charged when the cell takes sigma=-1; snk: when sigma=+1.
  double offset = 0.0;
  const auto terminal_costs = [&](int i, double& src, double& snk,
                                  double* off) {
    const Cell c = region[i];
    src = snk = 0.0;
    for (const StencilDir& d : stencil.dirs()) {
      const double pc = weighting_cost(weighting, d.weight);
      for (int s : {+1, -1}) {
        const int nx = c.x + s * d.dx, ny = c.y + s * d.dy;
        int frozen = 0;
        if (inside(nx, ny)) {
          if (region_idx[static_cast<std::size_t>(ny) * width + nx] >= 0)
            continue;
          frozen = at(nx, ny);
        } else {
          if (!bc.fixed()) continue;
          frozen = bc.ghost_value({nx, ny});
        }
        if (frozen > 0)
          src += pc;
        else
          snk += pc;
      }
    }
    if (weighting != PairWeighting::PerimeterOnly && noise &&
        epsilon != 0.0) {
      const double xi = noise->at(c.x, c.y);
      const double diff = -2.0 * epsilon * xi;  // cost(+1) - cost(-1)
      if (diff > 0.0)
        snk += diff;
      else
        src += -diff;
      if (off) *off += -epsilon * std::abs(xi);
    }
  };

  BKSolver solver;
  solver.init(nr, nr * static_cast<int>(stencil.dirs().size()));
  std::vector<std::pair<int, double>> edge_caps;
  for (int i = 0; i < nr; ++i) {
    const Cell c = region[i];
    for (const StencilDir& d : stencil.dirs()) {
      const double pc = weighting_cost(weighting, d.weight);
      const int nx = c.x + d.dx, ny = c.y + d.dy;
      if (!inside(nx, ny)) continue;
      const int j = region_idx[static_cast<std::size_t>(ny) * width + nx];
      if (j >= 0) edge_caps.push_back({solver.add_edge(i, j), pc});
    }
  }
  solver.finish_topology();
  solver.begin_caps();
  for (auto [e, cap] : edge_caps) solver.set_edge_cap(e, cap, cap);
  for (int i = 0; i < nr; ++i) {
    double src, snk;
    terminal_costs(i, src, snk, &offset);
    solver.add_terminal_cap(i, src, snk);
  }

  const double flow = solver.solve();
  std::vector<std::uint8_t> side;
  solver.source_side(side);

  ConstrainedResult res;
  res.region_values.resize(nr);
  for (int i = 0; i < nr; ++i)
    res.region_values[i] = side[i] ? +1 : -1;
  res.energy = flow + offset;
  return res;
}

}  // namespace rfc
