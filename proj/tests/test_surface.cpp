#include <cmath>
#include <numbers>

#include "doctest.h"
#include "hourglass/surface.hpp"

using namespace hourglass;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("square torus basics") {
  FlatSurface t = standard_surface(StandardFamily::SquareTorus);
  CHECK(t.area == doctest::Approx(1.0));
  CHECK(t.genus == 1);
  CHECK(t.is_square);
  CHECK(t.num_marked == 1);
  REQUIRE(t.singularities.size() == 1);
  CHECK(t.singularities[0].cone_angle == doctest::Approx(2 * kPi));
  CHECK(t.singularities[0].marked);
  CHECK(t.singular_set().size() == 1);
  CHECK(t.gauss_bonnet_defect() == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("rect torus area and shape") {
  FlatSurface t = standard_surface(StandardFamily::RectTorus, 2.0, 0.5);
  CHECK(t.area == doctest::Approx(1.0));
  CHECK(t.genus == 1);
  CHECK(t.is_square);
}

TEST_CASE("regular octagon is a genus two translation surface") {
  FlatSurface o = standard_surface(StandardFamily::RegularOctagon);
  CHECK(o.genus == 2);
  CHECK(o.is_square);
  REQUIRE(o.singularities.size() == 1);
  CHECK(o.singularities[0].cone_angle == doctest::Approx(6 * kPi));
  CHECK(o.singularities[0].order == 4);
  CHECK(o.gauss_bonnet_defect() == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("pillowcase has four simple poles") {
  FlatSurface p = standard_surface(StandardFamily::Pillowcase);
  CHECK(p.genus == 0);
  CHECK_FALSE(p.is_square);
  int poles = 0;
  for (const auto& s : p.singularities)
    if (s.is_simple_pole()) {
      ++poles;
      CHECK(s.cone_angle == doctest::Approx(kPi));
    }
  CHECK(poles == 4);
  CHECK(p.gauss_bonnet_defect() == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("genus2 example invariants") {
  double S = 1.0, s = 0.01, L = 2.0;
  FlatSurface g = genus2_example(S, s, L);
  CHECK(g.area == doctest::Approx(S * S + 4 * kPi * L * s));
  CHECK(g.genus == 2);
  CHECK(g.is_square);
  int cones = 0;
  for (const auto& sing : g.singularities)
    if (sing.is_cone_point()) {
      ++cones;
      CHECK(sing.cone_angle == doctest::Approx(6 * kPi));
    }
  CHECK(cones == 1);
  // The four outer torus corners form a flat unmarked class.
  CHECK(g.singular_set().size() == 1);
  CHECK(g.gauss_bonnet_defect() == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("genus2 example rejects bad parameters") {
  CHECK_THROWS_AS(genus2_example(1.0, 0.3, 2.0), SurfaceError);
  CHECK_THROWS_AS(genus2_example(1.0, -0.1, 2.0), SurfaceError);
}

TEST_CASE("flow preserves area and combinatorics") {
  FlatSurface g = genus2_example(1.0, 0.02, 1.0);
  FlatSurface f = apply_flow(g, 0.7);
  CHECK(f.area == doctest::Approx(g.area));
  CHECK(f.genus == g.genus);
  CHECK(f.singularities.size() == g.singularities.size());
}

TEST_CASE("orienting double cover of the pillowcase is a torus") {
  FlatSurface p = standard_surface(StandardFamily::Pillowcase);
  FlatSurface c = orienting_double_cover(p);
  CHECK(c.genus == 1);
  CHECK(c.is_square);
  CHECK(c.area == doctest::Approx(2 * p.area));
  CHECK_FALSE(c.involution_polygon.empty());
}

TEST_CASE("double cover refuses translation surfaces") {
  FlatSurface t = standard_surface(StandardFamily::SquareTorus);
  CHECK_THROWS_AS(orienting_double_cover(t), SurfaceError);
}

TEST_CASE("gluing validation") {
  SurfaceSpec spec;
  Polygon sq;
  sq.vertices = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  spec.polygons = {sq};
  SUBCASE("length mismatch") {
    Polygon wide = sq;
    wide.vertices[1] = {2, 0};
    wide.vertices[2] = {2, 1};
    spec.polygons = {wide};
    spec.gluings = {{{0, 0}, {0, 2}, GluingKind::Translation},
                    {{0, 1}, {0, 3}, GluingKind::Translation}};
    // Horizontal edges have length 2, vertical length 1; fine. Break one:
    spec.polygons[0].vertices[2] = {2, 1.5};
    CHECK_THROWS_AS(build_surface(spec), SurfaceError);
  }
  SUBCASE("unmatched edge") {
    spec.gluings = {{{0, 0}, {0, 2}, GluingKind::Translation}};
    CHECK_THROWS_AS(build_surface(spec), SurfaceError);
  }
  SUBCASE("translation direction check") {
    // A translation gluing needs opposite edge vectors.
    spec.gluings = {{{0, 0}, {0, 2}, GluingKind::Translation},
                    {{0, 1}, {0, 3}, GluingKind::HalfTurn}};
    CHECK_THROWS_AS(build_surface(spec), SurfaceError);
  }
}
