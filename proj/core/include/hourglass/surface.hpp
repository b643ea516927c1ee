#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hourglass/numeric.hpp"

namespace hourglass {

enum class GluingKind { Translation, HalfTurn };

/// Reference to one boundary edge of a polygon: edge e runs from vertex e to
/// vertex (e+1) mod n in counterclockwise order.
struct EdgeRef {
  int polygon = -1;
  int edge = -1;
  bool operator==(const EdgeRef& o) const {
    return polygon == o.polygon && edge == o.edge;
  }
  bool operator<(const EdgeRef& o) const {
    return polygon != o.polygon ? polygon < o.polygon : edge < o.edge;
  }
};

struct Gluing {
  EdgeRef a;
  EdgeRef b;
  GluingKind kind = GluingKind::Translation;
};

struct Polygon {
  std::vector<Vec2> vertices;  // counterclockwise
  /// Optional exact coordinates, same indexing; present in rational mode.
  std::vector<std::pair<Rational, Rational>> exact;

  int size() const { return static_cast<int>(vertices.size()); }
  Vec2 edge_vector(int e) const {
    int n = size();
    return vertices[(e + 1) % n] - vertices[e];
  }
  double area() const;
  /// Interior angle at vertex v, in radians.
  double interior_angle(int v) const;
  bool is_simple() const;
  bool is_counterclockwise() const;
};

struct CornerRef {
  int polygon = -1;
  int vertex = -1;
  bool operator<(const CornerRef& o) const {
    return polygon != o.polygon ? polygon < o.polygon : vertex < o.vertex;
  }
  bool operator==(const CornerRef& o) const {
    return polygon == o.polygon && vertex == o.vertex;
  }
};

struct Singularity {
  std::vector<CornerRef> vertex_class;
  double cone_angle = 0.0;  // radians
  int order = 0;            // cone_angle == (2 + order) * pi
  bool marked = false;      // marked point (may have cone angle 2*pi)

  bool is_cone_point() const { return order != 0; }
  bool is_simple_pole() const { return order == -1; }
};

struct SurfaceSpec {
  std::vector<Polygon> polygons;
  std::vector<Gluing> gluings;
  std::string name;
  bool normalize_area = false;
  /// Corners to flag as marked points (regular vertices treated as part of
  /// the singular set for geodesic searches).
  std::vector<CornerRef> marked_corners;
  double tolerance = kDefaultTolerance;
};

/// A half-translation surface realized by glued Euclidean polygons.
struct FlatSurface {
  std::vector<Polygon> polygons;
  std::vector<Gluing> gluings;
  std::vector<Singularity> singularities;  // all vertex classes, derived
  double area = 0.0;
  int genus = 0;
  int num_marked = 0;
  bool is_square = false;  // holonomy is translation-only after relabeling
  std::string name;
  double tolerance = kDefaultTolerance;

  /// Index into `singularities` for each corner.
  std::map<CornerRef, int> corner_class;

  /// Vertex classes with cone angle != 2*pi, or marked. This is the singular
  /// set for geodesic searches.
  std::vector<int> singular_set() const;

  /// Gauss-Bonnet defect: sum over classes of (2*pi - angle) - 2*pi*(2-2g).
  double gauss_bonnet_defect() const;

  /// Sheet-swap relabeling for orienting double covers: polygon i maps to
  /// involution_polygon[i]. Empty unless built by orienting_double_cover.
  std::vector<int> involution_polygon;
};

/// Validates a spec and derives singularities, genus, area and holonomy.
FlatSurface build_surface(const SurfaceSpec& spec);

enum class StandardFamily { SquareTorus, RectTorus, RegularOctagon, Pillowcase };

/// Standard example surfaces. Tori carry one marked corner.
FlatSurface standard_surface(StandardFamily family, double a = 1.0,
                             double b = 1.0, bool normalize_area = false);

/// Square-tiled S x S torus with a horizontal slit of length 2*pi*s glued to
/// a flat cylinder of circumference 2*pi*s and width 2*L. One cone point of
/// angle 6*pi; area S^2 + 4*pi*L*s.
FlatSurface genus2_example(double S, double s, double L);

/// Applies diag(e^t, e^-t) to every vertex. Gluings are preserved.
FlatSurface apply_flow(const FlatSurface& surface, double t);

/// Holonomy-trivializing branched double cover. Refuses when the surface is
/// already a translation surface (cover disconnects).
FlatSurface orienting_double_cover(const FlatSurface& surface);

}  // namespace hourglass
