#pragma once

#include <array>
#include <vector>

#include "hourglass/surface.hpp"

namespace hourglass {

/// Point on the surface, canonically represented in a source polygon chart.
struct SurfacePoint {
  int polygon = -1;
  Vec2 coords;
};

/// Chart isometry z -> sign*z + shift with sign in {+1, -1}.
struct ChartMap {
  double sign = 1.0;
  Vec2 shift;

  Vec2 operator()(const Vec2& p) const { return p * sign + shift; }
  ChartMap inverse() const { return {sign, -(shift * sign)}; }
  /// Composition: this after other.
  ChartMap after(const ChartMap& other) const {
    return {sign * other.sign, other.shift * sign + shift};
  }
};

/// Triangulated flat surface. Every triangle carries its own chart; edge k
/// of a triangle joins corners k and (k+1)%3, and interior edges store the
/// isometry from the neighbor's chart into this triangle's chart.
class Triangulation {
 public:
  struct Triangle {
    std::array<Vec2, 3> corner;
    std::array<int, 3> vertex;         // triangulation vertex ids
    std::array<int, 3> neighbor;       // adjacent triangle per edge
    std::array<int, 3> neighbor_side;  // matching edge in the neighbor
    std::array<ChartMap, 3> from_neighbor;  // neighbor chart -> this chart
    int source_polygon = -1;                // provenance
    ChartMap to_polygon;                    // this chart -> polygon chart
    bool alive = true;

    Vec2 centroid() const {
      return (corner[0] + corner[1] + corner[2]) * (1.0 / 3.0);
    }
    double area() const {
      return 0.5 * (corner[1] - corner[0]).cross(corner[2] - corner[0]);
    }
    double edge_length(int e) const {
      return (corner[(e + 1) % 3] - corner[e]).norm();
    }
  };

  struct Vertex {
    double cone_angle = 2.0 * 3.14159265358979323846;
    bool singular = false;  // cone point or marked point
    int surface_class = -1;  // singularity id in the source surface, -1 Steiner
    SurfacePoint position;
  };

  std::vector<Triangle> triangles;
  std::vector<Vertex> vertices;
  const FlatSurface* surface = nullptr;

  double total_area() const;
  int live_triangle_count() const;
  std::vector<int> singular_vertices() const;

  /// Flips edge e of triangle t (both triangles re-charted into t's chart).
  void flip(int t, int e);
  /// Splits edge e of triangle t at its chart midpoint; returns the new
  /// vertex id. Works on interior edges only (all edges are interior here).
  int split_edge(int t, int e);

  bool is_local_delaunay(int t, int e, double eps = 1e-12) const;
  /// True when every edge transition has sign +1 (translation charts).
  bool charts_translation_only() const;

  void check_consistent() const;  // debug invariant check
};

/// Ear-clips every polygon and links triangles across diagonals and gluings.
Triangulation triangulate(const FlatSurface& surface);

/// Flips until every interior edge is locally Delaunay. Returns the number
/// of flips performed. Throws FlipLimitExceeded past the cap.
int make_delaunay(Triangulation& tri, int flip_cap = 1 << 20);

/// triangulate + make_delaunay in one call.
Triangulation delaunay(const FlatSurface& surface);

/// Folds a chart point into the canonical polygon atlas: repeatedly applies
/// boundary gluings until the point lies inside its polygon.
SurfacePoint canonicalize(const FlatSurface& surface, int polygon, Vec2 p);

/// Map from a polygon boundary edge into the partner polygon's chart.
ChartMap gluing_map(const FlatSurface& surface, const EdgeRef& from,
                    const EdgeRef& to, GluingKind kind);

/// Finds the live triangle containing the given surface point; returns the
/// triangle id and the point in that triangle's chart.
std::pair<int, Vec2> locate(const Triangulation& tri, const SurfacePoint& p);

}  // namespace hourglass
