#pragma once

#include <vector>

#include "hourglass/triangulation.hpp"

namespace hourglass {

/// A geodesic segment from a search source to a triangulation vertex,
/// developed into the source frame (source at the origin).
struct RayHit {
  int vertex = -1;
  Vec2 vec;
  double length = 0.0;
};

/// All geodesic segments of length <= radius from the given triangulation
/// vertex to triangulation vertices, found by wedge propagation of the
/// developing map. Vertices act as obstacles: segments meet them only at
/// their endpoints.
std::vector<RayHit> segments_from_vertex(const Triangulation& tri, int vertex,
                                         double radius,
                                         long budget = 4'000'000);

struct PointSearch {
  std::vector<RayHit> hits;    // segments to triangulation vertices
  std::vector<double> loops;   // lengths of geodesic loops based at the point
};

/// Same search from an interior point; also detects geodesic loops based at
/// the point (copies of the source in the developed picture).
PointSearch segments_from_point(const Triangulation& tri, const SurfacePoint& p,
                                double radius, long budget = 4'000'000);

/// Walks a straight line through the triangulation, developing crossed
/// triangles into a fixed plane frame.
class RayWalker {
 public:
  RayWalker(const Triangulation& tri, int triangle, const Vec2& chart_pos,
            const Vec2& chart_dir);

  /// Advances to the next edge crossing. Returns false when stuck
  /// (numerically degenerate corner passage).
  bool step();

  int triangle() const { return tri_; }
  double traveled() const { return t_cur_; }
  double exit_param() const { return t_exit_; }
  const ChartMap& dev() const { return dev_; }  // current chart -> plane
  const Vec2& origin() const { return origin_; }
  const Vec2& direction() const { return dir_; }
  /// Current position in the current triangle's chart.
  Vec2 chart_position() const;
  /// Current position folded into the polygon atlas.
  SurfacePoint surface_position() const;

 private:
  const Triangulation* mesh_;
  int tri_;
  ChartMap dev_;
  Vec2 origin_;  // plane-frame ray origin
  Vec2 dir_;     // plane-frame unit direction
  double t_cur_ = 0.0;
  double t_exit_ = 0.0;
  int entry_edge_ = -1;
  int exit_edge_candidate_ = -1;
  void compute_exit();
};

struct ClosureResult {
  bool closed = false;
  double length = 0.0;
};

/// Follows the straight line from the given point and reports whether it
/// returns to that point (with matching orientation) within max_length.
ClosureResult trace_closure(const Triangulation& tri, int triangle,
                            const Vec2& chart_pos, const Vec2& chart_dir,
                            double max_length);

}  // namespace hourglass
