#include <cmath>
#include <numbers>

#include "doctest.h"
#include "rfc/stencil.hpp"

using namespace rfc;

namespace {

// Weighted crossing density of a half-plane with unit normal nu: each
// neighbor-pair family with offset d crosses the boundary |d . nu| times per
// unit length, so the stencil cut length per unit Euclidean boundary length is
//   F(nu) = sum over families of w_f * |d_f . nu|.
// Isotropy would mean F == 1; the residual max/min over angles quantifies the
// stencil anisotropy.
double crossing_density(const Stencil& st, double theta) {
  const double nx = std::cos(theta), ny = std::sin(theta);
  double f = 0.0;
  for (const StencilDir& d : st.dirs())
    f += d.weight * std::abs(d.dx * nx + d.dy * ny);
  return f;
}

}  // namespace

TEST_CASE("stencil: calibrated weights (closed forms)") {
  const double s2 = std::sqrt(2.0), s5 = std::sqrt(5.0);

  const Stencil l4 = Stencil::make(StencilKind::Lattice4);
  REQUIRE(l4.dirs().size() == 2);
  CHECK(l4.dirs()[0].weight == 1.0);
  CHECK(l4.cell_perimeter() == 4.0);

  const Stencil c8 = Stencil::make(StencilKind::Crofton8);
  REQUIRE(c8.dirs().size() == 4);
  CHECK(c8.dirs()[0].weight == doctest::Approx(s2 - 1.0).epsilon(1e-15));
  CHECK(c8.dirs()[2].weight == doctest::Approx(1.0 - s2 / 2.0).epsilon(1e-15));

  const Stencil c16 = Stencil::make(StencilKind::Crofton16);
  REQUIRE(c16.dirs().size() == 8);
  CHECK(c16.dirs()[0].weight == doctest::Approx(s5 - 2.0).epsilon(1e-15));
  CHECK(c16.dirs()[2].weight ==
        doctest::Approx(s5 - 1.5 * s2).epsilon(1e-15));
  CHECK(c16.dirs()[4].weight ==
        doctest::Approx((1.0 + s2 - s5) / 2.0).epsilon(1e-15));
  for (const StencilDir& d : c16.dirs()) CHECK(d.weight > 0.0);
}

TEST_CASE("stencil: exact length along stencil directions") {
  // F(nu) = 1 exactly when nu is an axis (all stencils) and along the
  // calibrated diagonal/knight directions of the Crofton stencils.
  for (auto kind :
       {StencilKind::Lattice4, StencilKind::Crofton8, StencilKind::Crofton16}) {
    const Stencil st = Stencil::make(kind);
    CHECK(crossing_density(st, 0.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(crossing_density(st, std::numbers::pi / 2) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
  const Stencil c8 = Stencil::make(StencilKind::Crofton8);
  CHECK(crossing_density(c8, std::numbers::pi / 4) ==
        doctest::Approx(1.0).epsilon(1e-12));
  const Stencil c16 = Stencil::make(StencilKind::Crofton16);
  CHECK(crossing_density(c16, std::numbers::pi / 4) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(crossing_density(c16, std::atan2(1.0, 2.0)) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("stencil: anisotropy envelope over a fine angle grid") {
  const int n = 3600;
  double worst[3] = {0.0, 0.0, 0.0};
  const StencilKind kinds[3] = {StencilKind::Lattice4, StencilKind::Crofton8,
                                StencilKind::Crofton16};
  for (int k = 0; k < 3; ++k) {
    const Stencil st = Stencil::make(kinds[k]);
    for (int i = 0; i < n; ++i) {
      const double f =
          crossing_density(st, 2.0 * std::numbers::pi * i / n);
      worst[k] = std::max(worst[k], std::abs(f - 1.0));
      CHECK(f >= 1.0 - 1e-12);  // Cauchy-Crofton never undercounts length
    }
  }
  CHECK(worst[0] == doctest::Approx(std::sqrt(2.0) - 1.0).epsilon(1e-3));
  CHECK(worst[1] < 0.09);   // Crofton8 residual anisotropy ~8.2%
  CHECK(worst[2] < 0.03);   // Crofton16 residual anisotropy ~2.7%
}

TEST_CASE("stencil: cell perimeter equals total incident weight") {
  for (auto kind :
       {StencilKind::Lattice4, StencilKind::Crofton8, StencilKind::Crofton16}) {
    const Stencil st = Stencil::make(kind);
    double p = 0.0;
    for (const StencilDir& d : st.dirs()) p += 2.0 * d.weight;
    CHECK(st.cell_perimeter() == doctest::Approx(p).epsilon(1e-15));
  }
  // A single cell cut by Crofton8: 2 axis edges per axis family and 2
  // diagonal per diagonal family -> 2*(2w_a + 2w_d) = 4(sqrt(2)-1) +
  // 4(1-sqrt(2)/2) = 2sqrt(2), the known Crofton8 unit-cell perimeter.
  CHECK(Stencil::make(StencilKind::Crofton8).cell_perimeter() ==
        doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));
}
