#include <cmath>

#include "doctest.h"
#include "hourglass/triangulation.hpp"

using namespace hourglass;

TEST_CASE("square torus triangulates into two triangles") {
  FlatSurface t = standard_surface(StandardFamily::SquareTorus);
  Triangulation tri = triangulate(t);
  tri.check_consistent();
  CHECK(tri.live_triangle_count() == 2);
  CHECK(tri.total_area() == doctest::Approx(1.0));
  CHECK(tri.vertices.size() == 1);
  CHECK(tri.vertices[0].singular);
  CHECK(tri.vertices[0].cone_angle == doctest::Approx(2 * 3.14159265358979));
}

TEST_CASE("square torus is already Delaunay") {
  FlatSurface t = standard_surface(StandardFamily::SquareTorus);
  Triangulation tri = triangulate(t);
  CHECK(make_delaunay(tri) == 0);
  tri.check_consistent();
}

TEST_CASE("rect torus becomes Delaunay") {
  FlatSurface t = standard_surface(StandardFamily::RectTorus, 4.0, 0.25);
  Triangulation tri = delaunay(t);
  tri.check_consistent();
  CHECK(tri.total_area() == doctest::Approx(1.0));
  for (int i = 0; i < static_cast<int>(tri.triangles.size()); ++i) {
    if (!tri.triangles[i].alive) continue;
    for (int e = 0; e < 3; ++e) CHECK(tri.is_local_delaunay(i, e, 1e-9));
  }
}

TEST_CASE("octagon triangulation") {
  FlatSurface o = standard_surface(StandardFamily::RegularOctagon);
  Triangulation tri = delaunay(o);
  tri.check_consistent();
  CHECK(tri.total_area() == doctest::Approx(o.area));
  CHECK(tri.charts_translation_only());
  CHECK(tri.vertices.size() == 1);
  CHECK(tri.vertices[0].cone_angle == doctest::Approx(6 * 3.14159265358979));
}

TEST_CASE("pillowcase charts need half turns") {
  FlatSurface p = standard_surface(StandardFamily::Pillowcase);
  Triangulation tri = delaunay(p);
  tri.check_consistent();
  CHECK_FALSE(tri.charts_translation_only());
  CHECK(tri.total_area() == doctest::Approx(p.area));
}

TEST_CASE("genus2 triangulation keeps area and cone data") {
  FlatSurface g = genus2_example(1.0, 0.05, 1.0);
  Triangulation tri = delaunay(g);
  tri.check_consistent();
  CHECK(tri.total_area() == doctest::Approx(g.area));
  int cones = 0;
  for (const auto& v : tri.vertices)
    if (v.singular) {
      ++cones;
      CHECK(v.cone_angle == doctest::Approx(6 * 3.14159265358979));
    }
  CHECK(cones == 1);
}

TEST_CASE("flip preserves area and consistency") {
  FlatSurface t = standard_surface(StandardFamily::SquareTorus);
  Triangulation tri = triangulate(t);
  double before = tri.total_area();
  int t0 = -1, e0 = -1;
  for (int i = 0; i < static_cast<int>(tri.triangles.size()) && t0 < 0; ++i)
    for (int e = 0; e < 3; ++e)
      if (tri.triangles[i].neighbor[e] != i) {
        t0 = i;
        e0 = e;
        break;
      }
  REQUIRE(t0 >= 0);
  tri.flip(t0, e0);
  tri.check_consistent();
  CHECK(tri.total_area() == doctest::Approx(before));
}

TEST_CASE("split edge adds a Steiner vertex") {
  FlatSurface t = standard_surface(StandardFamily::SquareTorus);
  Triangulation tri = triangulate(t);
  auto nv = tri.vertices.size();
  double before = tri.total_area();
  tri.split_edge(0, 0);
  tri.check_consistent();
  CHECK(tri.vertices.size() == nv + 1);
  CHECK(tri.total_area() == doctest::Approx(before));
  CHECK_FALSE(tri.vertices.back().singular);
  CHECK(tri.vertices.back().surface_class == -1);
}

TEST_CASE("canonicalize folds into the polygon atlas") {
  FlatSurface t = standard_surface(StandardFamily::SquareTorus);
  SurfacePoint p = canonicalize(t, 0, {1.3, -0.25});
  CHECK(p.polygon == 0);
  CHECK(p.coords.x == doctest::Approx(0.3));
  CHECK(p.coords.y == doctest::Approx(0.75));
}

TEST_CASE("locate finds the containing triangle") {
  FlatSurface t = standard_surface(StandardFamily::SquareTorus);
  Triangulation tri = delaunay(t);
  auto [idx, q] = locate(tri, SurfacePoint{0, {0.25, 0.125}});
  const auto& T = tri.triangles[idx];
  CHECK(T.alive);
  // q must be inside the triangle (barycentric sign test).
  for (int e = 0; e < 3; ++e) {
    Vec2 a = T.corner[e], b = T.corner[(e + 1) % 3];
    CHECK((b - a).cross(q - a) >= -1e-9);
  }
}
