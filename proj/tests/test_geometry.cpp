#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include "doctest.h"
#include "rfc/geometry.hpp"
#include "rfc/groundstate.hpp"
#include "rfc/noise.hpp"
#include "rfc/rng.hpp"

using namespace rfc;

namespace {

SpinField make_spin(int w, int h, const std::function<int(int, int)>& f) {
  SpinField s;
  s.width = w;
  s.height = h;
  s.values.resize(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      s.values[static_cast<std::size_t>(y) * w + x] =
          static_cast<std::int8_t>(f(x, y));
  return s;
}

// +1 exactly on cells with cx >= k (interface along the lattice line x = k).
SpinField vertical_interface(int w, int h, int k) {
  return make_spin(w, h, [k](int x, int) { return x >= k ? +1 : -1; });
}

constexpr double kPi = std::numbers::pi;

}  // namespace

// ---------------------------------------------------------------------------
// Jump set

TEST_CASE("jump set: constant field has no jump set") {
  const SpinField s = make_spin(8, 8, [](int, int) { return +1; });
  const BoundaryCurve c = extract_jump_set(s);
  CHECK(c.edges.empty());
  CHECK(c.components.empty());
  CHECK(c.total_lattice4 == 0.0);
  CHECK(c.total_stencil == 0.0);
}

TEST_CASE("jump set: vertical interface is one open path of length h") {
  const int w = 10, h = 7, k = 4;
  const SpinField s = vertical_interface(w, h, k);
  const BoundaryCurve c = extract_jump_set(s);
  CHECK(static_cast<int>(c.edges.size()) == h);
  REQUIRE(c.components.size() == 1);
  const BoundaryComponent& comp = c.components[0];
  CHECK(!comp.closed);
  CHECK(comp.length_lattice4 == doctest::Approx(h).epsilon(1e-15));
  CHECK(c.total_lattice4 == doctest::Approx(h).epsilon(1e-15));
  // All disagreement edges sit on x = k with the normal pointing into the +1
  // phase (+x direction).
  for (const JumpEdge& e : c.edges) {
    CHECK(e.a.x == doctest::Approx(k));
    CHECK(e.b.x == doctest::Approx(k));
    CHECK(e.nx == doctest::Approx(1.0));
    CHECK(e.ny == doctest::Approx(0.0));
  }
  // The path runs through integer corners one unit apart.
  REQUIRE(comp.vertices.size() == static_cast<std::size_t>(h) + 1);
  for (std::size_t i = 1; i < comp.vertices.size(); ++i) {
    const double dx = comp.vertices[i].x - comp.vertices[i - 1].x;
    const double dy = comp.vertices[i].y - comp.vertices[i - 1].y;
    CHECK(std::abs(dx) + std::abs(dy) == doctest::Approx(1.0));
  }
}

TEST_CASE("jump set: single minority cell is a closed unit square") {
  SpinField s = make_spin(9, 9, [](int, int) { return +1; });
  s.values[4 * 9 + 4] = -1;
  const BoundaryCurve c = extract_jump_set(s);
  CHECK(c.edges.size() == 4);
  REQUIRE(c.components.size() == 1);
  CHECK(c.components[0].closed);
  CHECK(c.components[0].vertices.front().x ==
        doctest::Approx(c.components[0].vertices.back().x));
  CHECK(c.components[0].vertices.front().y ==
        doctest::Approx(c.components[0].vertices.back().y));
  CHECK(c.components[0].length_lattice4 == doctest::Approx(4.0));
}

TEST_CASE("jump set: components partition the edge set (conservation)") {
  // A genuinely rough interface from an actual ground state.
  const NoiseField f = sample_discretized_wn(24, 24, 2024);
  BoundaryCondition bc;
  bc.kind = BoundaryCondition::Kind::Plus;
  const SpinField s = ground_state(f, 1.0, bc, Stencil::make(StencilKind::Lattice4),
                                   EnergyMode::RFIM);
  const BoundaryCurve c = extract_jump_set(s);
  double sum4 = 0.0, sumst = 0.0;
  for (const BoundaryComponent& comp : c.components) {
    sum4 += comp.length_lattice4;
    sumst += comp.length_stencil;
    // Vertices chain along unit lattice steps; closed loops return to start.
    for (std::size_t i = 1; i < comp.vertices.size(); ++i) {
      const double dx = comp.vertices[i].x - comp.vertices[i - 1].x;
      const double dy = comp.vertices[i].y - comp.vertices[i - 1].y;
      CHECK(std::abs(dx) + std::abs(dy) == doctest::Approx(1.0));
    }
  }
  CHECK(sum4 == doctest::Approx(c.total_lattice4).epsilon(1e-12));
  CHECK(sumst == doctest::Approx(c.total_stencil).epsilon(1e-12));
  CHECK(c.total_lattice4 ==
        doctest::Approx(static_cast<double>(c.edges.size())).epsilon(1e-12));
}

TEST_CASE("jump set: CSV export writes one row per vertex") {
  SpinField s = make_spin(9, 9, [](int, int) { return +1; });
  s.values[4 * 9 + 4] = -1;
  const BoundaryCurve c = extract_jump_set(s);
  const char* path = "test_geometry_curve.csv";
  export_curve_csv(c, path);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string line;
  std::getline(in, line);
  CHECK(line == "component,x,y");
  int rows = 0;
  while (std::getline(in, line))
    if (!line.empty()) {
      CHECK(line.substr(0, 2) == "0,");
      ++rows;
    }
  CHECK(rows == static_cast<int>(c.components[0].vertices.size()));
  std::remove(path);
}

// ---------------------------------------------------------------------------
// Averaged normals

TEST_CASE("averaged_normal: flat interface, bubble, corner, and far point") {
  const SpinField flat = vertical_interface(20, 20, 10);
  const AveragedNormal n = averaged_normal(flat, {10.0, 10.0}, 1.0);
  CHECK(n.unique);
  CHECK(n.nx == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(n.ny == doctest::Approx(0.0).epsilon(1e-12));

  // A unit bubble: the four edge normals cancel exactly.
  SpinField bub = make_spin(11, 11, [](int, int) { return +1; });
  bub.values[5 * 11 + 5] = -1;
  const AveragedNormal nb = averaged_normal(bub, {5.5, 5.5}, 1.0);
  CHECK(!nb.unique);

  // A quarter-plane corner: one vertical and one horizontal edge in the unit
  // ball, so the averaged normal points along the diagonal.
  const SpinField corner = make_spin(
      20, 20, [](int x, int y) { return (x < 10 && y < 10) ? -1 : +1; });
  const AveragedNormal nc = averaged_normal(corner, {10.0, 10.0}, 1.0);
  CHECK(nc.unique);
  CHECK(nc.nx == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  CHECK(nc.ny == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));

  CHECK_THROWS_AS(averaged_normal(flat, {2.0, 2.0}, 1.0),
                  std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Excess

TEST_CASE("l1_excess: zero on an exactly rasterized line") {
  const int w = 41, h = 41;
  LineConfig line;
  line.anchor = {20.5, 20.5};
  line.nx = 1.0;
  line.ny = 0.0;
  const SpinField s = make_spin(
      w, h, [&](int x, int y) { return line.value({x + 0.5, y + 0.5}); });
  CHECK(l1_excess(s, line, {20, 20}, 12.0) == 0.0);
}

TEST_CASE("l1_excess: constant +1 against a centered line is about pi") {
  const SpinField s = make_spin(41, 41, [](int, int) { return +1; });
  LineConfig line;
  line.anchor = {20.5, 20.5};
  line.nx = 1.0;
  line.ny = 0.0;
  // Half the ball disagrees by |(+1) - (-1)| = 2, so the normalized excess is
  // about 2 * (pi R^2 / 2) / R^2 = pi, up to boundary discretization.
  CHECK(l1_excess(s, line, {20, 20}, 12.0) ==
        doctest::Approx(kPi).epsilon(0.1));
  CHECK_THROWS_AS(l1_excess(s, line, {20, 20}, 25.0), std::invalid_argument);
}

TEST_CASE("strong_excess: exact interface and the algebra of tilted normals") {
  const SpinField s = vertical_interface(30, 30, 15);
  const Cell c{15, 15};
  CHECK(strong_excess(s, 1.0, 0.0, c, 6.0) == 0.0);
  const double perp = strong_excess(s, 0.0, 1.0, c, 6.0);
  const double opp = strong_excess(s, -1.0, 0.0, c, 6.0);
  CHECK(perp > 0.0);
  // |(1,0)-(-1,0)|^2 = 4 is exactly twice |(1,0)-(0,1)|^2 = 2 on every edge.
  CHECK(opp == doctest::Approx(2.0 * perp).epsilon(1e-12));
}

TEST_CASE("best_line_fit: recovers a rasterized line exactly") {
  const SpinField s = vertical_interface(41, 41, 21);
  const Cell c{20, 20};
  const BestLine best = best_line_fit(s, c, 10.0, 16, 20);
  CHECK(!best.no_interface);
  // The grid contains theta = 0, d = 0 which rasterizes to the same spin.
  CHECK(best.excess.l1 == 0.0);
  CHECK(std::abs(best.line.nx) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(best.excess.strong == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(best.excess.radius == 10.0);

  // Doubling the grid never increases the attained excess (nested grids).
  const double e1 = best_line_fit(s, c, 10.0, 4, 5).excess.l1;
  const double e2 = best_line_fit(s, c, 10.0, 8, 10).excess.l1;
  const double e3 = best_line_fit(s, c, 10.0, 16, 20).excess.l1;
  CHECK(e2 <= e1 + 1e-15);
  CHECK(e3 <= e2 + 1e-15);
}

TEST_CASE("best_line_fit: constant spin reports no_interface") {
  const SpinField s = make_spin(21, 21, [](int, int) { return -1; });
  const BestLine best = best_line_fit(s, {10, 10}, 6.0, 8, 8);
  CHECK(best.no_interface);
  CHECK_THROWS_AS(best_line_fit(s, {10, 10}, 6.0, 0, 8),
                  std::invalid_argument);
}

// ---------------------------------------------------------------------------
// One-step improvement machinery

TEST_CASE("circle_cells: annulus membership and distinctness") {
  const Cell c{20, 20};
  for (double r : {1.0, 3.0, 7.5}) {
    const std::vector<Cell> ring = circle_cells(c, r);
    REQUIRE(ring.size() >= 4);
    for (std::size_t i = 0; i < ring.size(); ++i) {
      CHECK(!(ring[i] == ring[(i + 1) % ring.size()]));
      const double dx = ring[i].x + 0.5 - 20.5, dy = ring[i].y + 0.5 - 20.5;
      const double d = std::hypot(dx, dy);
      CHECK(d >= r - 1.0);
      CHECK(d <= r + 1.0);
    }
  }
}

TEST_CASE("few_jumps_radius: exact line gives 2 crossings at zero budget") {
  const SpinField s = vertical_interface(41, 41, 21);
  LineConfig line;
  line.anchor = {21.0, 20.5};
  line.nx = 1.0;
  line.ny = 0.0;
  const FewJumps fj = few_jumps_radius(s, line, {20, 20}, 16.0);
  REQUIRE(fj.found);
  CHECK(fj.crossings == 2);
  CHECK(fj.boundary_l1 == 0.0);
  CHECK(fj.r > 16.0 / 16.0);
  CHECK(fj.r < 15.0);
}

TEST_CASE("few_jumps_radius: constant spin gives 0 crossings") {
  const SpinField s = make_spin(41, 41, [](int, int) { return +1; });
  LineConfig line;
  line.anchor = {-100.0, 0.0};
  line.nx = 1.0;
  line.ny = 0.0;  // m_line is +1 on the whole box
  const FewJumps fj = few_jumps_radius(s, line, {20, 20}, 16.0);
  REQUIRE(fj.found);
  CHECK(fj.crossings == 0);
  CHECK(fj.boundary_l1 == 0.0);
}

TEST_CASE("few_jumps_radius: checkerboard admits no good radius") {
  const SpinField s =
      make_spin(41, 41, [](int x, int y) { return (x + y) % 2 ? +1 : -1; });
  LineConfig line;
  line.anchor = {20.5, 20.5};
  line.nx = 1.0;
  line.ny = 0.0;
  CHECK(!few_jumps_radius(s, line, {20, 20}, 16.0).found);
}

TEST_CASE("campanato_step: exact line is reproduced with small tilt") {
  const SpinField s = vertical_interface(41, 41, 21);
  LineConfig line;
  line.anchor = {21.0, 20.5};
  line.nx = 1.0;
  line.ny = 0.0;
  const CampanatoStep step = campanato_step(s, {20, 20}, 16.0, line);
  CHECK(step.r >= 2.0);
  CHECK(step.tilt <= 0.25);
  CHECK(step.new_line.nx > 0.9);
  CHECK(step.new_line.nx * step.new_line.nx +
            step.new_line.ny * step.new_line.ny ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(step.excess_out <= 1.0);

  // Precondition: a constant spin yields 0 crossings, not 2.
  const SpinField flat = make_spin(41, 41, [](int, int) { return +1; });
  LineConfig far;
  far.anchor = {-100.0, 0.0};
  far.nx = 1.0;
  far.ny = 0.0;
  CHECK_THROWS_AS(campanato_step(flat, {20, 20}, 16.0, far),
                  std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Minimality and lemma checks

TEST_CASE("eta_audit: flat minimal interfaces audit to exactly 0") {
  SpinField s = vertical_interface(33, 33, 16);
  s.bc = BoundaryCondition::Kind::Free;
  CHECK(eta_audit(s, {16, 16}, 10.0, 100, 42) == 0.0);

  // Constant spin: every ball is trivially minimal (0/0 counts as ratio 1).
  SpinField flat = make_spin(33, 33, [](int, int) { return +1; });
  flat.bc = BoundaryCondition::Kind::Free;
  CHECK(eta_audit(flat, {16, 16}, 10.0, 100, 42) == 0.0);
}

TEST_CASE("eta_audit: an isolated island is infinitely non-minimal") {
  // A lone -1 cell has perimeter 4 while the frozen-exterior minimum is the
  // constant +1 with perimeter 0, so the audited ratio diverges.
  SpinField s = make_spin(33, 33, [](int, int) { return +1; });
  s.values[16 * 33 + 16] = -1;
  s.bc = BoundaryCondition::Kind::Free;
  const double eta = eta_audit(s, {16, 16}, 10.0, 200, 7);
  CHECK(std::isinf(eta));
}

TEST_CASE("density_check: flat interface satisfies two-sided bounds") {
  const SpinField s = vertical_interface(41, 41, 20);
  const DensityCheck d = density_check(s, {20, 20}, 8.0, 0.0);
  CHECK(d.on_jump_set);
  CHECK(d.ball_area > 0.0);
  CHECK(d.vol_plus + d.vol_minus == doctest::Approx(d.ball_area));
  // Half-and-half split passes both volume bounds at eta_hat = 0 (fraction
  // 1/4 on each side).
  CHECK(d.vol_lo);
  CHECK(d.vol_hi);
  CHECK(d.perimeter > 0.0);
  CHECK(d.per_lo);
  CHECK(d.per_hi);
}

TEST_CASE("density_check: deep interior point fails the lower volume bound") {
  const SpinField s = vertical_interface(41, 41, 20);
  const DensityCheck d = density_check(s, {34, 20}, 4.0, 0.0);
  CHECK(!d.on_jump_set);
  CHECK(d.vol_minus == 0.0);
  CHECK(!d.vol_lo);
  CHECK(d.perimeter == 0.0);
  CHECK(!d.per_lo);
}

TEST_CASE("height_bound_check: closed-form isoceles fixture") {
  // A = (0,0), B = (2,0), apex (1, sqrt(5)/2): length 3 = (1 + 1/2)|AB|, so
  // eta = 1/2; the height is sqrt(5)/2 and the bound sqrt(eta^2 + 2 eta)|AB|
  // = sqrt(5).
  const Point A{0.0, 0.0}, B{2.0, 0.0};
  const std::vector<Point> poly = {A, {1.0, 0.5 * std::sqrt(5.0)}, B};
  const HeightBound hb = height_bound_check(A, B, 0.5, poly);
  CHECK(hb.h == doctest::Approx(0.5 * std::sqrt(5.0)).epsilon(1e-12));
  CHECK(hb.bound == doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));
  CHECK(hb.ok);

  // The straight segment has height 0 at any eta.
  const std::vector<Point> seg = {A, B};
  const HeightBound hb0 = height_bound_check(A, B, 0.1, seg);
  CHECK(hb0.h == 0.0);
  CHECK(hb0.ok);
}

TEST_CASE("height_bound_check: precondition violations throw") {
  const Point A{0.0, 0.0}, B{2.0, 0.0};
  const std::vector<Point> one = {A};
  CHECK_THROWS_AS(height_bound_check(A, B, 0.5, one), std::invalid_argument);
  const std::vector<Point> wrong = {A, {3.0, 0.0}};
  CHECK_THROWS_AS(height_bound_check(A, B, 0.5, wrong), std::invalid_argument);
  // Length 3 polyline needs eta >= 1/2.
  const std::vector<Point> poly = {A, {1.0, 0.5 * std::sqrt(5.0)}, B};
  CHECK_THROWS_AS(height_bound_check(A, B, 0.1, poly), std::invalid_argument);
}

TEST_CASE("normal_tilt_check: identical, rotated, and skipped lines") {
  LineConfig a;
  a.anchor = {0.0, 0.0};
  a.nx = 1.0;
  a.ny = 0.0;
  const TiltCheck same = normal_tilt_check(a, a);
  CHECK(!same.skipped);
  CHECK(same.d == 0.0);
  CHECK(same.tilt == 0.0);
  CHECK(same.ok);

  // Small rotation about the origin: both chord endpoints move by
  // 2 sin(theta/2), which also equals |nu - nu'|, so tilt = d <= 8 d.
  const double theta = 0.1;
  LineConfig b;
  b.anchor = {0.0, 0.0};
  b.nx = std::cos(theta);
  b.ny = std::sin(theta);
  const TiltCheck rot = normal_tilt_check(a, b);
  CHECK(!rot.skipped);
  CHECK(rot.d == doctest::Approx(2.0 * std::sin(theta / 2)).epsilon(1e-12));
  CHECK(rot.tilt == doctest::Approx(rot.d).epsilon(1e-12));
  CHECK(rot.ok);

  // lineA misses the ball center by more than 1/4: hypothesis violated.
  LineConfig off = a;
  off.anchor = {0.5, 0.0};
  CHECK(normal_tilt_check(off, a).skipped);

  // Large rotation: chord distance above 1/4, also skipped.
  LineConfig big;
  big.anchor = {0.0, 0.0};
  big.nx = std::cos(0.6);
  big.ny = std::sin(0.6);
  CHECK(normal_tilt_check(a, big).skipped);
}

TEST_CASE("modulus_table: aligned interface, exclusions, and epsilon scaling") {
  const SpinField s = vertical_interface(41, 41, 20);
  const std::vector<std::pair<Point, Point>> pairs = {
      {{20.0, 10.0}, {20.0, 10.0}},  // x == y
      {{20.0, 10.0}, {20.0, 30.0}},  // both on the straight interface
      {{20.0, 12.0}, {5.0, 5.0}},    // second point far from the jump set
  };
  const ModulusTable t = modulus_table(s, pairs, 0.1);
  CHECK(t.excluded_nonunique == 1);
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0].dist == 0.0);
  CHECK(t.rows[0].normal_diff == 0.0);
  CHECK(t.rows[1].dist == doctest::Approx(20.0));
  // Both averaged normals are exactly (1, 0) on a straight interface.
  CHECK(t.rows[1].normal_diff == 0.0);
  CHECK(t.rows[1].rhs_shape > 0.0);

  // rhs ~ sqrt(epsilon): quadrupling epsilon doubles every row.
  const ModulusTable t4 = modulus_table(s, pairs, 0.4);
  REQUIRE(t4.rows.size() == t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i)
    CHECK(t4.rows[i].rhs_shape ==
          doctest::Approx(2.0 * t.rows[i].rhs_shape).epsilon(1e-12));
}

TEST_CASE("modulus_table: a bubble center counts as NonUnique") {
  SpinField s = make_spin(21, 21, [](int, int) { return +1; });
  s.values[10 * 21 + 10] = -1;
  const std::vector<std::pair<Point, Point>> pairs = {
      {{10.5, 10.5}, {10.5, 10.5}}};
  const ModulusTable t = modulus_table(s, pairs, 1.0);
  CHECK(t.rows.empty());
  CHECK(t.excluded_nonunique == 1);
}

// ---------------------------------------------------------------------------
// Bubbles

TEST_CASE("bubble_detect: constant and open-interface fields have none") {
  const SpinField flat = make_spin(21, 21, [](int, int) { return +1; });
  CHECK(bubble_detect(flat, {10, 10}, 8.0).empty());
  const SpinField line = vertical_interface(21, 21, 10);
  CHECK(bubble_detect(line, {10, 10}, 8.0).empty());
}

TEST_CASE("bubble_detect: unit and 2x2 bubbles with field integrals") {
  NoiseField f;
  f.width = 11;
  f.height = 11;
  f.values.assign(121, 0.0);
  f.values[5 * 11 + 5] = 3.0;

  SpinField s = make_spin(11, 11, [](int, int) { return +1; });
  s.values[5 * 11 + 5] = -1;
  const auto one = bubble_detect(s, {5, 5}, 4.0, &f, 1.0);
  REQUIRE(one.size() == 1);
  CHECK(one[0].area == 1.0);
  CHECK(one[0].perimeter == doctest::Approx(4.0));
  REQUIRE(one[0].interior.size() == 1);
  CHECK(one[0].interior[0] == Cell{5, 5});
  CHECK(one[0].field_integral == doctest::Approx(3.0));
  CHECK(one[0].energy_ok);  // 4 <= 2 * 1 * 3

  // The same bubble fails the necessary condition at small epsilon.
  const auto weak = bubble_detect(s, {5, 5}, 4.0, &f, 0.1);
  REQUIRE(weak.size() == 1);
  CHECK(!weak[0].energy_ok);  // 4 > 2 * 0.1 * 3

  // Vertices outside B_R exclude the component entirely.
  CHECK(bubble_detect(s, {5, 5}, 0.5).empty());

  SpinField s4 = make_spin(13, 13, [](int, int) { return +1; });
  for (int y = 5; y <= 6; ++y)
    for (int x = 5; x <= 6; ++x) s4.values[y * 13 + x] = -1;
  const auto four = bubble_detect(s4, {6, 6}, 5.0);
  REQUIRE(four.size() == 1);
  CHECK(four[0].area == 4.0);
  CHECK(four[0].perimeter == doctest::Approx(8.0));
  CHECK(four[0].interior.size() == 4);
  CHECK(four[0].field_integral == 0.0);
}

TEST_CASE("bubble_detect: ground-state bubbles satisfy the energy bound") {
  // At large epsilon the ground state is noise-dominated and full of bubbles;
  // each must obey per(B) <= 2 eps |int_B xi|.
  const NoiseField f = sample_discretized_wn(33, 33, 424242);
  BoundaryCondition bc;
  bc.kind = BoundaryCondition::Kind::Plus;
  const SpinField s = ground_state(f, 1e6, bc,
                                   Stencil::make(StencilKind::Lattice4),
                                   EnergyMode::RFIM);
  const auto bubbles = bubble_detect(s, {16, 16}, 12.0, &f, 1e6);
  int found = 0;
  for (const Bubble& b : bubbles) {
    CHECK(b.energy_ok);
    ++found;
  }
  CHECK(found > 0);
}
