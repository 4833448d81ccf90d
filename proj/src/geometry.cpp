#include "rfc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "rfc/maxflow.hpp"
#include "rfc/rng.hpp"

namespace rfc {

namespace {

constexpr double kPi = std::numbers::pi;

double hyp(double x, double y) { return std::sqrt(x * x + y * y); }

// Interior unit disagreement edges, optionally restricted to cells in
// [x0, x1) x [y0, y1).
std::vector<JumpEdge> collect_edges(const SpinField& spin, int x0, int y0,
                                    int x1, int y1) {
  x0 = std::max(x0, 0);
  y0 = std::max(y0, 0);
  x1 = std::min(x1, spin.width);
  y1 = std::min(y1, spin.height);
  std::vector<JumpEdge> edges;
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x) {
      const int s = spin.at(x, y);
      if (x + 1 < spin.width && spin.at(x + 1, y) != s) {
        JumpEdge e;
        e.a = {double(x + 1), double(y)};
        e.b = {double(x + 1), double(y + 1)};
        e.nx = spin.at(x + 1, y) > 0 ? +1.0 : -1.0;
        e.ny = 0.0;
        edges.push_back(e);
      }
      if (y + 1 < spin.height && spin.at(x, y + 1) != s) {
        JumpEdge e;
        e.a = {double(x), double(y + 1)};
        e.b = {double(x + 1), double(y + 1)};
        e.nx = 0.0;
        e.ny = spin.at(x, y + 1) > 0 ? +1.0 : -1.0;
        edges.push_back(e);
      }
    }
  return edges;
}

std::vector<JumpEdge> collect_all_edges(const SpinField& spin) {
  return collect_edges(spin, 0, 0, spin.width, spin.height);
}

Point cell_center(Cell c) { return {c.x + 0.5, c.y + 0.5}; }

double point_segment_dist(Point p, Point a, Point b) {
  const double vx = b.x - a.x, vy = b.y - a.y;
  const double len2 = vx * vx + vy * vy;
  double t = 0.0;
  if (len2 > 0.0)
    t = std::clamp(((p.x - a.x) * vx + (p.y - a.y) * vy) / len2, 0.0, 1.0);
  return hyp(p.x - (a.x + t * vx), p.y - (a.y + t * vy));
}

}  // namespace

BoundaryCurve extract_jump_set(const SpinField& spin) {
  BoundaryCurve curve;
  curve.edges = collect_all_edges(spin);
  const int vw = spin.width + 1;

  const auto vid = [&](Point p) {
    return static_cast<int>(p.y) * vw + static_cast<int>(p.x);
  };
  std::vector<std::vector<int>> incident(
      static_cast<std::size_t>(vw) * (spin.height + 1));
  for (std::size_t e = 0; e < curve.edges.size(); ++e) {
    incident[vid(curve.edges[e].a)].push_back(static_cast<int>(e));
    incident[vid(curve.edges[e].b)].push_back(static_cast<int>(e));
  }

  std::vector<std::uint8_t> used(curve.edges.size(), 0);
  std::vector<int> edge_component(curve.edges.size(), -1);

  // Saddle rule: arriving at v along direction d, turn toward the wedge cell
  // between the incoming and left-outgoing edges iff that cell is +1. This is
  // symmetric under path reversal, so components pair up consistently.
  const auto pick_next = [&](int v, double dx, double dy) -> int {
    std::vector<int> options;
    for (const int e : incident[v])
      if (!used[e]) options.push_back(e);
    if (options.empty()) return -1;
    if (options.size() == 1 || (dx == 0.0 && dy == 0.0)) return options[0];
    const double lx = -dy, ly = dx;
    const double px = (v % vw) + 0.25 * (lx - dx);
    const double py = (v / vw) + 0.25 * (ly - dy);
    const int cx = static_cast<int>(std::floor(px));
    const int cy = static_cast<int>(std::floor(py));
    const bool left_plus = cx >= 0 && cx < spin.width && cy >= 0 &&
                           cy < spin.height && spin.at(cx, cy) > 0;
    const double tx = left_plus ? lx : -lx, ty = left_plus ? ly : -ly;
    for (const int e : options) {
      const JumpEdge& edge = curve.edges[e];
      const int other = vid(edge.a) == v ? vid(edge.b) : vid(edge.a);
      const double ox = (other % vw) - (v % vw);
      const double oy = (other / vw) - (v / vw);
      if (ox == tx && oy == ty) return e;
    }
    return options[0];
  };

  const auto trace_from = [&](int start) {
    BoundaryComponent comp;
    int v = start;
    double dx = 0.0, dy = 0.0;
    comp.vertices.push_back({double(v % vw), double(v / vw)});
    for (;;) {
      const int e = pick_next(v, dx, dy);
      if (e < 0) break;
      used[e] = 1;
      edge_component[e] = static_cast<int>(curve.components.size());
      const JumpEdge& edge = curve.edges[e];
      const int next = vid(edge.a) == v ? vid(edge.b) : vid(edge.a);
      dx = double(next % vw) - double(v % vw);
      dy = double(next / vw) - double(v / vw);
      v = next;
      comp.vertices.push_back({double(v % vw), double(v / vw)});
      comp.length_lattice4 += 1.0;
    }
    comp.closed = v == start && comp.length_lattice4 > 0.0;
    if (comp.length_lattice4 > 0.0) curve.components.push_back(std::move(comp));
  };

  // Open paths first (odd-degree vertices live on the box boundary), then
  // the remaining loops.
  for (std::size_t v = 0; v < incident.size(); ++v) {
    int free_deg = 0;
    for (const int e : incident[v])
      if (!used[e]) ++free_deg;
    if (free_deg % 2 == 1) trace_from(static_cast<int>(v));
  }
  for (std::size_t v = 0; v < incident.size(); ++v)
    while (std::any_of(incident[v].begin(), incident[v].end(),
                       [&](int e) { return !used[e]; }))
      trace_from(static_cast<int>(v));

  for (const BoundaryComponent& c : curve.components)
    curve.total_lattice4 += c.length_lattice4;

  // Stencil metric: axis pairs belong to their own unit edge's component;
  // longer-range cut pairs are attributed to the nearest disagreement edge.
  const Stencil stencil = Stencil::make(spin.stencil);
  for (int y = 0; y < spin.height; ++y)
    for (int x = 0; x < spin.width; ++x)
      for (const StencilDir& d : stencil.dirs()) {
        const int nx = x + d.dx, ny = y + d.dy;
        if (nx < 0 || nx >= spin.width || ny < 0 || ny >= spin.height)
          continue;
        if (spin.at(x, y) == spin.at(nx, ny)) continue;
        curve.total_stencil += d.weight;
        const Point mid{x + 0.5 + d.dx * 0.5, y + 0.5 + d.dy * 0.5};
        int best_edge = -1;
        double best_dist = std::numeric_limits<double>::infinity();
        for (std::size_t e = 0; e < curve.edges.size(); ++e) {
          const Point em = curve.edges[e].mid();
          const double dist = hyp(em.x - mid.x, em.y - mid.y);
          if (dist < best_dist) {
            best_dist = dist;
            best_edge = static_cast<int>(e);
          }
        }
        if (best_edge >= 0 && edge_component[best_edge] >= 0)
          curve.components[edge_component[best_edge]].length_stencil +=
              d.weight;
      }
  return curve;
}

void export_curve_csv(const BoundaryCurve& curve, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("export_curve_csv: cannot open " + path);
  out << "component,x,y\n";
  for (std::size_t i = 0; i < curve.components.size(); ++i)
    for (const Point& p : curve.components[i].vertices)
      out << i << ',' << p.x << ',' << p.y << '\n';
}

AveragedNormal averaged_normal(const SpinField& spin, Point x, double radius) {
  const int pad = static_cast<int>(std::ceil(radius)) + 1;
  const std::vector<JumpEdge> edges = collect_edges(
      spin, static_cast<int>(std::floor(x.x)) - pad,
      static_cast<int>(std::floor(x.y)) - pad,
      static_cast<int>(std::ceil(x.x)) + pad,
      static_cast<int>(std::ceil(x.y)) + pad);
  double sx = 0.0, sy = 0.0;
  bool any = false;
  for (const JumpEdge& e : edges) {
    const Point m = e.mid();
    if (hyp(m.x - x.x, m.y - x.y) > radius) continue;
    any = true;
    sx += 2.0 * e.nx;
    sy += 2.0 * e.ny;
  }
  if (!any)
    throw std::invalid_argument("averaged_normal: x is not near the jump set");
  AveragedNormal res;
  const double norm = hyp(sx, sy);
  if (norm < 1e-9) return res;  // NonUnique (bubbles cancel)
  res.unique = true;
  res.nx = sx / norm;
  res.ny = sy / norm;
  return res;
}

double l1_excess(const SpinField& spin, const LineConfig& line, Cell center,
                 double R) {
  double sum = 0.0;
  for (const Cell& c : ball_cells(center, R)) {
    if (c.x < 0 || c.x >= spin.width || c.y < 0 || c.y >= spin.height)
      throw std::invalid_argument("l1_excess: ball outside the box");
    sum += std::abs(spin.at(c.x, c.y) - line.value(cell_center(c)));
  }
  return sum / (R * R);
}

double strong_excess(const SpinField& spin, double nu_x, double nu_y,
                     Cell center, double r) {
  const Point p0 = cell_center(center);
  const int pad = static_cast<int>(std::ceil(r)) + 1;
  double sum = 0.0;
  for (const JumpEdge& e :
       collect_edges(spin, center.x - pad, center.y - pad, center.x + pad,
                     center.y + pad)) {
    const Point m = e.mid();
    if (hyp(m.x - p0.x, m.y - p0.y) > r) continue;
    const double dx = e.nx - nu_x, dy = e.ny - nu_y;
    sum += (dx * dx + dy * dy) * 2.0;
  }
  return sum / r;
}

BestLine best_line_fit(const SpinField& spin, Cell center, double R,
                       int n_theta, int n_d) {
  if (n_theta < 1 || n_d < 1)
    throw std::invalid_argument("best_line_fit: empty grid");
  const Point p0 = cell_center(center);

  BestLine best;
  bool first = true;
  int sign_ref = 0;
  for (const Cell& c : ball_cells(center, R)) {
    if (c.x < 0 || c.x >= spin.width || c.y < 0 || c.y >= spin.height)
      continue;
    const int s = spin.at(c.x, c.y);
    if (sign_ref == 0) sign_ref = s;
    if (s != sign_ref) sign_ref = 2;  // marks a genuine interface
  }
  best.no_interface = sign_ref != 2;

  for (int i = 0; i < n_theta; ++i) {
    const double theta = kPi * i / n_theta;
    const double ux = std::cos(theta), uy = std::sin(theta);
    for (int j = 0; j < n_d; ++j) {
      const double d = -R + 2.0 * R * j / n_d;
      for (const int s : {+1, -1}) {
        LineConfig cand;
        cand.anchor = {p0.x + d * ux, p0.y + d * uy};
        cand.nx = s * ux;
        cand.ny = s * uy;
        const double ex = l1_excess(spin, cand, center, R);
        if (first || ex < best.excess.l1) {
          best.line = cand;
          best.excess.l1 = ex;
          first = false;
        }
      }
    }
  }
  best.excess.center = center;
  best.excess.radius = R;
  best.excess.strong = strong_excess(spin, best.line.nx, best.line.ny, center,
                                     R);
  return best;
}

std::vector<Cell> circle_cells(Cell center, double r) {
  const Point p0 = cell_center(center);
  const double step = 0.1 / std::max(r, 1.0);
  std::vector<Cell> cells;
  for (double theta = 0.0; theta < 2.0 * kPi; theta += step) {
    const Cell c{
        static_cast<int>(std::floor(p0.x + r * std::cos(theta))),
        static_cast<int>(std::floor(p0.y + r * std::sin(theta)))};
    if (cells.empty() || !(cells.back() == c)) cells.push_back(c);
  }
  while (cells.size() > 1 && cells.front() == cells.back()) cells.pop_back();
  return cells;
}

FewJumps few_jumps_radius(const SpinField& spin, const LineConfig& line,
                          Cell center, double R) {
  const double budget = 32.0 * R * l1_excess(spin, line, center, R);
  FewJumps res;
  for (int r = static_cast<int>(std::floor(R / 16.0)) + 1; r < 15.0 * R / 16.0;
       ++r) {
    const std::vector<Cell> ring = circle_cells(center, r);
    bool inside = true;
    for (const Cell& c : ring)
      if (c.x < 0 || c.x >= spin.width || c.y < 0 || c.y >= spin.height)
        inside = false;
    if (!inside || ring.empty()) continue;

    int crossings = 0;
    double l1 = 0.0;
    const double arc = 2.0 * kPi * r / ring.size();
    for (std::size_t k = 0; k < ring.size(); ++k) {
      const Cell c = ring[k];
      const Cell n = ring[(k + 1) % ring.size()];
      if (spin.at(c.x, c.y) != spin.at(n.x, n.y)) ++crossings;
      l1 += std::abs(spin.at(c.x, c.y) - line.value(cell_center(c))) * arc;
    }
    if ((crossings == 0 || crossings == 2) && l1 <= budget) {
      res.found = true;
      res.r = r;
      res.crossings = crossings;
      res.boundary_l1 = l1;
      return res;
    }
  }
  return res;
}

CampanatoStep campanato_step(const SpinField& spin, Cell center, double R,
                             const LineConfig& line) {
  const FewJumps fj = few_jumps_radius(spin, line, center, R);
  if (!fj.found || fj.crossings != 2)
    throw std::invalid_argument(
        "campanato_step: few_jumps_radius did not yield 2 crossings");

  const std::vector<Cell> ring = circle_cells(center, fj.r);
  std::vector<Point> crossings;
  for (std::size_t k = 0; k < ring.size(); ++k) {
    const Cell c = ring[k];
    const Cell n = ring[(k + 1) % ring.size()];
    if (spin.at(c.x, c.y) != spin.at(n.x, n.y)) {
      const Point pc = cell_center(c), pn = cell_center(n);
      crossings.push_back({(pc.x + pn.x) / 2, (pc.y + pn.y) / 2});
    }
  }

  CampanatoStep step;
  step.r = fj.r;
  const Point p = crossings[0], q = crossings[1];
  const double len = hyp(q.x - p.x, q.y - p.y);
  if (len < 1e-9) {
    step.new_line = line;
    step.new_line.anchor = p;
  } else {
    const double tx = (q.x - p.x) / len, ty = (q.y - p.y) / len;
    double nx = -ty, ny = tx;
    if (nx * line.nx + ny * line.ny < 0.0) {
      nx = -nx;
      ny = -ny;
    }
    step.new_line = {p, nx, ny};
  }
  step.tilt = hyp(step.new_line.nx - line.nx, step.new_line.ny - line.ny);
  step.excess_out = l1_excess(spin, step.new_line, center, step.r);
  return step;
}

double eta_audit(const SpinField& spin, Cell center, double R, int n_balls,
                 std::uint64_t seed) {
  const Stencil stencil = Stencil::make(spin.stencil);
  BoundaryCondition bc;
  bc.kind = spin.bc;
  const std::uint64_t key = derive_key(seed, 0xE7A);
  const Point p0 = cell_center(center);

  double eta = 0.0;
  for (int k = 0; k < n_balls; ++k) {
    const double rho =
        1.0 + rng_uniform(key, 4 * k) * (std::max(1.0, R / 3.0) - 1.0);
    const double angle = 2.0 * kPi * rng_uniform(key, 4 * k + 1);
    const double rad =
        rng_uniform(key, 4 * k + 2) * std::max(0.0, R - rho);
    const Cell c{
        static_cast<int>(std::floor(p0.x + rad * std::cos(angle))),
        static_cast<int>(std::floor(p0.y + rad * std::sin(angle)))};
    const std::vector<Cell> ball = ball_cells(c, rho);
    bool in_box = true;
    for (const Cell& b : ball)
      if (b.x < 0 || b.x >= spin.width || b.y < 0 || b.y >= spin.height)
        in_box = false;
    if (!in_box) continue;

    const double per =
        local_energy(spin.values, spin.width, spin.height, ball, nullptr, 0.0,
                     bc, stencil, PairWeighting::PerimeterOnly);
    const double per_min =
        constrained_minimize(spin.values, spin.width, spin.height, ball,
                             nullptr, 0.0, bc, stencil,
                             PairWeighting::PerimeterOnly)
            .energy;
    double ratio;
    if (per_min < 1e-12)
      ratio = per < 1e-12 ? 1.0 : std::numeric_limits<double>::infinity();
    else
      ratio = per / per_min;
    eta = std::max(eta, ratio - 1.0);
  }
  return std::max(eta, 0.0);
}

DensityCheck density_check(const SpinField& spin, Cell x, double r,
                           double eta_hat) {
  DensityCheck res;
  const Point p0 = cell_center(x);

  const int pad = 2;
  for (const JumpEdge& e :
       collect_edges(spin, x.x - pad, x.y - pad, x.x + pad, x.y + pad)) {
    const Point m = e.mid();
    if (hyp(m.x - p0.x, m.y - p0.y) <= 1.0) res.on_jump_set = true;
  }

  for (const Cell& c : ball_cells_clipped(x, r, spin.width, spin.height)) {
    res.ball_area += 1.0;
    if (spin.at(c.x, c.y) > 0)
      res.vol_plus += 1.0;
    else
      res.vol_minus += 1.0;
  }
  const int epad = static_cast<int>(std::ceil(r)) + 1;
  for (const JumpEdge& e :
       collect_edges(spin, x.x - epad, x.y - epad, x.x + epad, x.y + epad)) {
    const Point m = e.mid();
    if (hyp(m.x - p0.x, m.y - p0.y) <= r) res.perimeter += 2.0;
  }

  const double frac = 1.0 / ((2.0 + eta_hat) * (2.0 + eta_hat));
  const double lo = frac * res.ball_area;
  const double hi = (1.0 - frac) * res.ball_area;
  res.vol_lo = res.vol_plus >= lo && res.vol_minus >= lo;
  res.vol_hi = res.vol_plus <= hi && res.vol_minus <= hi;
  res.per_lo = res.perimeter >= 0.5 * r / (2.0 + eta_hat);
  res.per_hi = res.perimeter <= 2.0 * (1.0 + eta_hat) * 2.0 * kPi * r;
  return res;
}

HeightBound height_bound_check(Point A, Point B, double eta,
                               std::span<const Point> polyline) {
  if (polyline.size() < 2)
    throw std::invalid_argument("height_bound_check: polyline too short");
  if (hyp(polyline.front().x - A.x, polyline.front().y - A.y) > 1e-9 ||
      hyp(polyline.back().x - B.x, polyline.back().y - B.y) > 1e-9)
    throw std::invalid_argument("height_bound_check: endpoints mismatch");
  const double ab = hyp(B.x - A.x, B.y - A.y);
  double length = 0.0;
  for (std::size_t i = 1; i < polyline.size(); ++i)
    length += hyp(polyline[i].x - polyline[i - 1].x,
                  polyline[i].y - polyline[i - 1].y);
  if (length > (1.0 + eta) * ab + 1e-9)
    throw std::invalid_argument("height_bound_check: polyline too long");

  HeightBound res;
  for (const Point& p : polyline)
    res.h = std::max(res.h, point_segment_dist(p, A, B));
  res.bound = std::sqrt(eta * eta + 2.0 * eta) * ab;
  res.ok = res.h <= res.bound + 1e-9;
  return res;
}

namespace {

// Chord of a line with the closed unit ball at the origin: signed offset and,
// when |offset| <= 1, the two boundary endpoints.
bool chord_endpoints(const LineConfig& line, double& offset, Point& e1,
                     Point& e2) {
  offset = -(line.anchor.x * line.nx + line.anchor.y * line.ny);
  if (std::abs(offset) > 1.0) return false;
  const double half = std::sqrt(std::max(0.0, 1.0 - offset * offset));
  const Point foot{-offset * line.nx, -offset * line.ny};
  const double tx = -line.ny, ty = line.nx;
  e1 = {foot.x + half * tx, foot.y + half * ty};
  e2 = {foot.x - half * tx, foot.y - half * ty};
  return true;
}

}  // namespace

TiltCheck normal_tilt_check(const LineConfig& lineA, const LineConfig& lineB) {
  TiltCheck res;
  double offA, offB;
  Point a1, a2, b1, b2;
  if (!chord_endpoints(lineA, offA, a1, a2) || std::abs(offA) > 0.25 ||
      !chord_endpoints(lineB, offB, b1, b2)) {
    res.skipped = true;
    return res;
  }
  // Boundary-trace distance: best matching of chord endpoints, so identical
  // lines give d = 0.
  const double m1 = std::max(hyp(a1.x - b1.x, a1.y - b1.y),
                             hyp(a2.x - b2.x, a2.y - b2.y));
  const double m2 = std::max(hyp(a1.x - b2.x, a1.y - b2.y),
                             hyp(a2.x - b1.x, a2.y - b1.y));
  res.d = std::min(m1, m2);
  if (res.d > 0.25) {
    res.skipped = true;
    return res;
  }
  double nx = lineB.nx, ny = lineB.ny;
  if (nx * lineA.nx + ny * lineA.ny < 0.0) {
    nx = -nx;
    ny = -ny;
  }
  res.tilt = hyp(lineA.nx - nx, lineA.ny - ny);
  res.ok = res.tilt <= 8.0 * res.d + 1e-9;
  return res;
}

ModulusTable modulus_table(const SpinField& spin,
                           std::span<const std::pair<Point, Point>> pairs,
                           double epsilon) {
  ModulusTable table;
  const Point o = cell_center(spin.origin());
  for (const auto& [x, y] : pairs) {
    AveragedNormal nx, ny;
    try {
      nx = averaged_normal(spin, x, 1.0);
      ny = averaged_normal(spin, y, 1.0);
    } catch (const std::invalid_argument&) {
      ++table.excluded_nonunique;
      continue;
    }
    if (!nx.unique || !ny.unique) {
      ++table.excluded_nonunique;
      continue;
    }
    ModulusRow row;
    row.x = x;
    row.y = y;
    row.dist = hyp(x.x - y.x, x.y - y.y);
    row.normal_diff = hyp(nx.nx - ny.nx, nx.ny - ny.ny);
    const double xa = std::max(hyp(x.x - o.x, x.y - o.y), 2.0);
    const double ya = std::max(hyp(y.x - o.x, y.y - o.y), 2.0);
    const double da = std::max(row.dist, 2.0);
    row.rhs_shape = std::sqrt(epsilon * std::sqrt(std::log(xa + ya)) *
                              std::pow(std::log(da), 2.75));
    table.rows.push_back(row);
  }
  return table;
}

std::vector<Bubble> bubble_detect(const SpinField& spin, Cell center, double R,
                                  const NoiseField* noise, double epsilon) {
  const BoundaryCurve curve = extract_jump_set(spin);
  const Point p0 = cell_center(center);
  std::vector<Bubble> bubbles;

  for (const BoundaryComponent& comp : curve.components) {
    if (!comp.closed) continue;
    bool inside = true;
    double min_x = 1e30, max_x = -1e30, min_y = 1e30, max_y = -1e30;
    for (const Point& v : comp.vertices) {
      if (hyp(v.x - p0.x, v.y - p0.y) > R) inside = false;
      min_x = std::min(min_x, v.x);
      max_x = std::max(max_x, v.x);
      min_y = std::min(min_y, v.y);
      max_y = std::max(max_y, v.y);
    }
    if (!inside) continue;

    Bubble b;
    b.component = comp;
    b.perimeter = comp.length_lattice4;

    // Interior cells by even-odd ray casting against the (axis-aligned)
    // polygon edges.
    for (int cy = static_cast<int>(min_y); cy < static_cast<int>(max_y); ++cy)
      for (int cx = static_cast<int>(min_x); cx < static_cast<int>(max_x);
           ++cx) {
        const double px = cx + 0.5, py = cy + 0.5;
        int hits = 0;
        for (std::size_t i = 1; i < comp.vertices.size(); ++i) {
          const Point& u = comp.vertices[i - 1];
          const Point& v = comp.vertices[i];
          if (u.x != v.x) continue;  // vertical segments only
          const double ylo = std::min(u.y, v.y), yhi = std::max(u.y, v.y);
          if (py > ylo && py < yhi && u.x > px) ++hits;
        }
        if (hits % 2 == 1) b.interior.push_back({cx, cy});
      }
    b.area = static_cast<double>(b.interior.size());
    if (noise) {
      for (const Cell& c : b.interior)
        if (c.x >= 0 && c.x < noise->width && c.y >= 0 && c.y < noise->height)
          b.field_integral += noise->at(c.x, c.y);
      b.energy_ok =
          b.perimeter <= 2.0 * epsilon * std::abs(b.field_integral) + 1e-9;
    }
    bubbles.push_back(std::move(b));
  }
  return bubbles;
}

}  // namespace rfc
