#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rfc/groundstate.hpp"
#include "rfc/noise.hpp"

namespace rfc {

// Real point in the plane; cell (x, y) occupies [x, x+1] x [y, y+1], so cell
// centers sit at half-integers and jump-set vertices at integers.
struct Point {
  double x = 0.0, y = 0.0;
};

// ---------------------------------------------------------------------------
// Jump set

// A unit disagreement edge between adjacent box cells, stored as the shared
// lattice segment from `a` to `b` (integer corners) with the unit normal
// pointing from the -1 cell to the +1 cell.
struct JumpEdge {
  Point a, b;
  double nx = 0.0, ny = 0.0;
  Point mid() const { return {(a.x + b.x) / 2, (a.y + b.y) / 2}; }
};

struct BoundaryComponent {
  std::vector<Point> vertices;  // ordered corners; closed: first == last
  bool closed = false;
  double length_lattice4 = 0.0;  // unit-edge count
  double length_stencil = 0.0;   // cut length in the field's stencil metric
};

struct BoundaryCurve {
  std::vector<BoundaryComponent> components;
  std::vector<JumpEdge> edges;  // the full disagreement-edge set
  double total_lattice4 = 0.0;
  double total_stencil = 0.0;
};

// Traces all interior disagreement edges into maximal open paths and closed
// loops. At a saddle corner the path turns toward the +1 wedge, which keeps
// components non-crossing. Conservation: the components partition `edges`.
BoundaryCurve extract_jump_set(const SpinField& spin);

// CSV export: component id, x, y per vertex row.
void export_curve_csv(const BoundaryCurve& curve, const std::string& path);

// ---------------------------------------------------------------------------
// Averaged normals and excess

struct AveragedNormal {
  bool unique = false;  // false = NonUnique (|int grad m| < 1e-9)
  double nx = 0.0, ny = 0.0;
};

// int_{B_radius(x)} grad m = sum over disagreement edges with midpoint in the
// ball of 2 * (unit normal from the -1 to the +1 side). Throws if no
// disagreement edge midpoint lies within `radius` of x.
AveragedNormal averaged_normal(const SpinField& spin, Point x,
                               double radius = 1.0);

// Oriented line: m = +1 exactly where (p - anchor) . nu > 0, so nu points
// into the +1 phase, matching the averaged-normal orientation.
struct LineConfig {
  Point anchor;
  double nx = 0.0, ny = 1.0;  // |nu| = 1
  int value(Point p) const {
    return (p.x - anchor.x) * nx + (p.y - anchor.y) * ny > 0.0 ? +1 : -1;
  }
};

struct Excess {
  double l1 = 0.0;      // (1/R^2) int_{B_R} |m - m_line|
  double strong = 0.0;  // (1/r) int |nu - nu_bar|^2 |grad m|
  Cell center{0, 0};
  double radius = 0.0;
};

// (1/R^2) * sum over ball cells of |m(cell) - m_line(cell center)|.
double l1_excess(const SpinField& spin, const LineConfig& line, Cell center,
                 double R);

// (1/r) * sum over disagreement edges with midpoint in the ball of
// |nu_edge - nu_bar|^2 * 2.
double strong_excess(const SpinField& spin, double nu_x, double nu_y,
                     Cell center, double r);

struct BestLine {
  LineConfig line;
  Excess excess;
  bool no_interface = false;  // spin constant on the ball
};

// Exhaustive n_theta x n_d x 2 grid search minimizing l1_excess;
// deterministic tie-break by (angle index, offset index, orientation).
BestLine best_line_fit(const SpinField& spin, Cell center, double R,
                       int n_theta, int n_d);

// ---------------------------------------------------------------------------
// One-step improvement machinery

// Cells cut by the Euclidean circle of radius r about the center cell's
// center, as a cyclic sequence ordered by angle.
std::vector<Cell> circle_cells(Cell center, double r);

struct FewJumps {
  bool found = false;
  double r = 0.0;
  int crossings = 0;
  double boundary_l1 = 0.0;
};

// First unit-grid radius r in (R/16, 15R/16) where the spin changes sign 0 or
// 2 times along the discrete circle and the boundary integral of
// |m - m_line| is at most 32 * (1/R) int_{B_R} |m - m_line|.
FewJumps few_jumps_radius(const SpinField& spin, const LineConfig& line,
                          Cell center, double R);

struct CampanatoStep {
  double r = 0.0;
  LineConfig new_line;
  double tilt = 0.0;        // |nu - nu'| with nu . nu' > 0
  double excess_out = 0.0;  // l1 excess of new_line on B_r
};

// Requires few_jumps_radius to succeed with exactly 2 crossings; builds the
// line through the two crossing points.
CampanatoStep campanato_step(const SpinField& spin, Cell center, double R,
                             const LineConfig& line);

// ---------------------------------------------------------------------------
// Minimality, density, and lemma checks

// max over sampled balls inside B_R(center) of per(m)/per(m*) - 1 where m*
// re-minimizes the bare cut length with the exterior frozen; 0/0 counts as
// ratio 1.
double eta_audit(const SpinField& spin, Cell center, double R, int n_balls,
                 std::uint64_t seed);

struct DensityCheck {
  bool on_jump_set = false;
  bool vol_lo = false, vol_hi = false, per_lo = false, per_hi = false;
  double vol_plus = 0.0, vol_minus = 0.0, ball_area = 0.0;
  double perimeter = 0.0;  // int |grad m| over the ball
};

DensityCheck density_check(const SpinField& spin, Cell x, double r,
                           double eta_hat);

struct HeightBound {
  double h = 0.0;      // one-sided Hausdorff distance to segment [A, B]
  double bound = 0.0;  // sqrt(eta^2 + 2 eta) |A - B|
  bool ok = false;
};

// Polyline must start at A, end at B, with length <= (1 + eta)|A - B|.
HeightBound height_bound_check(Point A, Point B, double eta,
                               std::span<const Point> polyline);

struct TiltCheck {
  bool skipped = false;  // hypothesis violation, not a failure
  double d = 0.0;        // boundary-trace distance of the two chords
  double tilt = 0.0;     // |nu - nu'| with nu . nu' > 0
  bool ok = false;       // tilt <= 8 d
};

// Both lines against the closed unit ball at the origin; lineA must come
// within 1/4 of the center and d must be <= 1/4, else Skipped.
TiltCheck normal_tilt_check(const LineConfig& lineA, const LineConfig& lineB);

struct ModulusRow {
  Point x, y;
  double dist = 0.0;         // |x - y|
  double normal_diff = 0.0;  // |nu1(x) - nu1(y)|
  double rhs_shape = 0.0;    // (eps sqrt(log(|x|+ + |y|+)) (log|x-y|+)^{11/4})^{1/2}
};

struct ModulusTable {
  std::vector<ModulusRow> rows;
  int excluded_nonunique = 0;
};

// Positions are measured from the field origin; |x|+ = max(|x|, 2).
ModulusTable modulus_table(const SpinField& spin,
                           std::span<const std::pair<Point, Point>> pairs,
                           double epsilon);

struct Bubble {
  BoundaryComponent component;
  std::vector<Cell> interior;
  double area = 0.0;
  double perimeter = 0.0;       // lattice cut length (unit-edge count)
  double field_integral = 0.0;  // int_B xi (0 without a noise field)
  bool energy_ok = true;        // perimeter <= 2 eps |int_B xi|
};

// Closed jump-set components entirely inside B_R(center). With a noise field
// attached, each bubble carries the ground-state necessary condition
// per(B) <= 2 eps |int_B xi|; callers assert it for solver output.
std::vector<Bubble> bubble_detect(const SpinField& spin, Cell center, double R,
                                  const NoiseField* noise = nullptr,
                                  double epsilon = 0.0);

}  // namespace rfc
