#pragma once

#include <utility>
#include <vector>

#include "hourglass/geodesics.hpp"
#include "hourglass/triangulation.hpp"

namespace hourglass {

/// Geodesic segment between singularities (surface singularity ids), with no
/// singularity in its interior. Both orientations are listed separately.
struct SaddleConnection {
  int start = -1;
  int end = -1;
  Vec2 holonomy;
  double length = 0.0;
};

struct FlatCylinder;

/// Closed q-geodesic witness: either a chain of saddle connections or a
/// cylinder core circle.
struct GeodesicLoop {
  std::vector<SaddleConnection> segments;
  double length = 0.0;
  bool is_cylinder_core = false;
  /// For cylinder cores: a point on the core circle and the core direction
  /// in that triangle's chart.
  int core_triangle = -1;
  Vec2 core_chart_pos;
  Vec2 core_chart_dir;
};

/// Maximal singularity-free cylinder foliated by closed geodesics.
struct FlatCylinder {
  double core_length = 0.0;
  double width = 0.0;
  double modulus = 0.0;
  double direction = 0.0;  // angle mod pi

  // A core-parallel seed ray and its distances to the two boundaries.
  int seed_triangle = -1;
  Vec2 seed_chart_pos;
  Vec2 seed_chart_dir;
  double above = 0.0;  // distance from the seed ray to the left boundary
  double below = 0.0;  // distance from the seed ray to the right boundary
  // Developed crossings of one period of the seed ray: (triangle, chart->plane).
  std::vector<std::pair<int, ChartMap>> crossings;
  Vec2 plane_origin;
  Vec2 plane_dir;
};

/// True when the surface point lies strictly inside the cylinder.
bool cylinder_contains(const Triangulation& tri, const FlatCylinder& cyl,
                       const SurfacePoint& p, double margin = 1e-9);

/// mu = log boundary-length ratio; infinite for puncture cores.
struct MuValue {
  bool infinite = false;
  double value = 0.0;
};

struct ExpandingAnnulus {
  int core_singularity = -1;  // surface singularity id for point cores
  GeodesicLoop core_loop;     // loop core when core_singularity < 0
  int side = 0;
  double inner_length = 0.0;
  double outer_length = 0.0;
  double width = 0.0;
  double inner_radius = 0.0;  // distances from a point core
  double outer_radius = 0.0;
  MuValue mu;
};

/// r(x) = min(distance to the singular set, half the shortest geodesic loop
/// through x): the radius of the largest embedded singularity-free disk.
class DistanceField {
 public:
  explicit DistanceField(const Triangulation& tri) : tri_(&tri) {}
  double operator()(const SurfacePoint& p) const;

 private:
  const Triangulation* tri_;
};

/// All saddle connections of length <= length_bound, both orientations.
std::vector<SaddleConnection> enumerate_saddle_connections(
    const Triangulation& tri, double length_bound, int max_results = 400000);
std::vector<SaddleConnection> enumerate_saddle_connections(
    const FlatSurface& surface, double length_bound, int max_results = 400000);

struct SystoleResult {
  double length = 0.0;
  GeodesicLoop witness;
};

/// Shortest essential closed q-geodesic by iterative-doubling search over
/// saddle-connection loops, doubled segments between reflection cone points,
/// and cylinder cores, with a certified lower-bound cutoff.
SystoleResult systole(const Triangulation& tri);
SystoleResult systole(const FlatSurface& surface);

/// Maximal cylinders of modulus >= min_modulus, detected along saddle
/// connection directions.
std::vector<FlatCylinder> find_cylinders(const Triangulation& tri,
                                         double min_modulus);
std::vector<FlatCylinder> find_cylinders(const FlatSurface& surface,
                                         double min_modulus);
/// Same search with an explicit core-length bound (used by systole).
std::vector<FlatCylinder> detect_cylinders(const Triangulation& tri,
                                           double core_bound,
                                           double min_modulus);

/// Expanding annulus grown from a singularity. Marked points (punctures)
/// return the initial annulus with mu = infinity; cone points return the
/// maximal-mu annulus swept between wavefront topology events.
ExpandingAnnulus expanding_annulus(const Triangulation& tri,
                                   int singularity_id);
/// Expanding annulus on one side of a cylinder-core loop. Terminates at the
/// cylinder boundary singularities (mu = 0). side: +1 left, -1 right.
ExpandingAnnulus expanding_annulus(const Triangulation& tri,
                                   const GeodesicLoop& core, int side);

DistanceField distance_field(const Triangulation& tri);

/// Point reached by walking perpendicular to the cylinder seed ray by the
/// signed offset (positive toward `above`). Walks past the cylinder boundary
/// when |offset| exceeds the side width.
SurfacePoint cylinder_point_at_offset(const Triangulation& tri,
                                      const FlatCylinder& cyl, double offset);

/// Distance from the point to the singular set (no loop term, unlike the
/// distance field).
double distance_to_singularities(const Triangulation& tri,
                                 const SurfacePoint& p);

/// Largest radius W(p) of an embedded singularity-free punctured disk around
/// the given singularity: min over segments to other singularities and half
/// loops back to p.
double puncture_disk_radius(const Triangulation& tri, int singularity_id);

}  // namespace hourglass
