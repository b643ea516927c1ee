#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "hourglass/flat_geometry.hpp"

using namespace hourglass;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("torus saddle connections up to 2.3") {
  FlatSurface t = standard_surface(StandardFamily::SquareTorus);
  auto scs = enumerate_saddle_connections(t, 2.3);
  CHECK(scs.size() == 16);
  for (const auto& sc : scs) {
    CHECK(sc.start == 0);
    CHECK(sc.end == 0);
    CHECK(sc.length >= 1.0 - 1e-9);
    CHECK(sc.holonomy.norm() == doctest::Approx(sc.length));
  }
}

TEST_CASE("torus systole is one") {
  FlatSurface t = standard_surface(StandardFamily::SquareTorus);
  SystoleResult s = systole(t);
  CHECK(s.length == doctest::Approx(1.0));
}

TEST_CASE("flow shrinks the torus systole") {
  FlatSurface t = standard_surface(StandardFamily::SquareTorus);
  FlatSurface f = apply_flow(t, 0.5);
  SystoleResult s = systole(f);
  CHECK(s.length == doctest::Approx(std::exp(-0.5)));
}

TEST_CASE("genus2 systole is the slit loop") {
  FlatSurface g = genus2_example(1.0, 0.01, 2.0);
  SystoleResult s = systole(g);
  CHECK(s.length == doctest::Approx(2 * kPi * 0.01));
}

TEST_CASE("torus cylinders") {
  FlatSurface t = standard_surface(StandardFamily::SquareTorus);
  auto cyls = find_cylinders(t, 0.5);
  REQUIRE(cyls.size() >= 2);
  int full = 0;
  for (const auto& c : cyls) {
    if (std::fabs(c.modulus - 1.0) < 1e-6) {
      ++full;
      CHECK(c.core_length == doctest::Approx(1.0));
      CHECK(c.width == doctest::Approx(1.0));
    }
  }
  CHECK(full == 2);  // horizontal and vertical
}

TEST_CASE("genus2 tall cylinder") {
  double s = 0.01, L = 2.0;
  FlatSurface g = genus2_example(1.0, s, L);
  auto cyls = find_cylinders(g, 5.0);
  REQUIRE(cyls.size() == 1);
  CHECK(cyls[0].core_length == doctest::Approx(2 * kPi * s));
  CHECK(cyls[0].width == doctest::Approx(2 * L));
  CHECK(cyls[0].modulus == doctest::Approx(2 * L / (2 * kPi * s)));
}

TEST_CASE("puncture disk radius") {
  SUBCASE("torus marked point") {
    FlatSurface t = standard_surface(StandardFamily::SquareTorus);
    Triangulation tri = delaunay(t);
    CHECK(puncture_disk_radius(tri, 0) == doctest::Approx(0.5));
  }
  SUBCASE("genus2 cone point") {
    double s = 0.01;
    FlatSurface g = genus2_example(1.0, s, 2.0);
    Triangulation tri = delaunay(g);
    int cone = -1;
    for (int i = 0; i < static_cast<int>(g.singularities.size()); ++i)
      if (g.singularities[i].is_cone_point()) cone = i;
    REQUIRE(cone >= 0);
    CHECK(puncture_disk_radius(tri, cone) == doctest::Approx(kPi * s));
  }
}

TEST_CASE("distance field on the torus") {
  FlatSurface t = standard_surface(StandardFamily::SquareTorus);
  Triangulation tri = delaunay(t);
  DistanceField r = distance_field(tri);
  // Center: the half-loop term wins over the vertex distance sqrt(1/2).
  CHECK(r(SurfacePoint{0, {0.5, 0.5}}) == doctest::Approx(0.5));
  double d = std::hypot(0.25, 0.33);
  CHECK(r(SurfacePoint{0, {0.25, 0.33}}) == doctest::Approx(d));
  CHECK(r(SurfacePoint{0, {0.0, 0.0}}) == doctest::Approx(0.0));
}

TEST_CASE("expanding annulus at the torus marked point") {
  FlatSurface t = standard_surface(StandardFamily::SquareTorus);
  Triangulation tri = delaunay(t);
  ExpandingAnnulus a = expanding_annulus(tri, 0);
  CHECK(a.mu.infinite);
  CHECK(a.width == doctest::Approx(0.5));
  CHECK(a.inner_length == doctest::Approx(0.0));
  CHECK(a.outer_length == doctest::Approx(kPi));
}

TEST_CASE("expanding annulus at the genus2 cone point") {
  double s = 0.01;
  FlatSurface g = genus2_example(1.0, s, 2.0);
  Triangulation tri = delaunay(g);
  int cone = -1;
  for (int i = 0; i < static_cast<int>(g.singularities.size()); ++i)
    if (g.singularities[i].is_cone_point()) cone = i;
  REQUIRE(cone >= 0);
  ExpandingAnnulus a = expanding_annulus(tri, cone);
  CHECK_FALSE(a.mu.infinite);
  CHECK(a.mu.value > 2.0);
  CHECK(a.width > 0.2);
}

TEST_CASE("expanding annulus along a cylinder core") {
  double s = 0.05, L = 1.0;
  FlatSurface g = genus2_example(1.0, s, L);
  Triangulation tri = delaunay(g);
  auto cyls = find_cylinders(tri, 4.0);
  REQUIRE(cyls.size() == 1);
  GeodesicLoop core;
  core.is_cylinder_core = true;
  core.length = cyls[0].core_length;
  core.core_triangle = cyls[0].seed_triangle;
  core.core_chart_pos = cyls[0].seed_chart_pos;
  core.core_chart_dir = cyls[0].seed_chart_dir;
  ExpandingAnnulus left = expanding_annulus(tri, core, +1);
  ExpandingAnnulus right = expanding_annulus(tri, core, -1);
  CHECK_FALSE(left.mu.infinite);
  CHECK(left.mu.value == doctest::Approx(0.0));
  CHECK(left.inner_length == doctest::Approx(core.length));
  CHECK(left.outer_length == doctest::Approx(core.length));
  CHECK(left.width + right.width == doctest::Approx(2 * L).epsilon(1e-5));
}

TEST_CASE("degenerate loop cores are rejected") {
  FlatSurface t = standard_surface(StandardFamily::SquareTorus);
  Triangulation tri = delaunay(t);
  GeodesicLoop bogus;
  bogus.length = 1.0;
  CHECK_THROWS_AS(expanding_annulus(tri, bogus, +1), SurfaceError);
}
