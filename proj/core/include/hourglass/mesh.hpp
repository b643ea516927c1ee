#pragma once

#include <array>
#include <vector>

#include "hourglass/triangulation.hpp"

namespace hourglass {

struct MeshParams {
  double sing_factor = 0.15;  // edge-length floor h*sing_factor at the cones
  double grade = 0.6;         // sizing growth per unit distance to the cones
  double split_slack = 1.4;  // split edges longer than slack * target
  int max_vertices = 200000;
  int max_passes = 60;
};

/// Unique undirected mesh edge. The canonical orientation va -> vb is the
/// traversal direction of the owner side (t, e); the other side (u, m)
/// traverses it backwards.
struct MeshEdge {
  int t = -1, e = -1;
  int u = -1, m = -1;
  int va = -1, vb = -1;
  double length = 0.0;
  double weight = 0.0;  // cotan weight
};

/// Refined triangulation with the edge structures used by the discrete Hodge
/// machinery. Cochains index `edges` in canonical orientation.
struct Mesh {
  Triangulation tri;
  double h = 0.0;
  std::vector<MeshEdge> edges;
  std::vector<std::array<int, 3>> edge_of;      // edge id per (triangle, side)
  std::vector<std::array<double, 3>> edge_sign; // +1 owner side, -1 reversed
  std::vector<double> vertex_dist;              // graph distance to the cones

  int vertex_count() const { return static_cast<int>(tri.vertices.size()); }
  int edge_count() const { return static_cast<int>(edges.size()); }
  int triangle_count() const { return static_cast<int>(tri.triangles.size()); }
};

/// Builds edge structures for an existing triangulation (no refinement).
Mesh make_mesh(const Triangulation& tri);

/// Graded Delaunay refinement: edge length at most h away from the
/// singularities, decreasing toward them down to h * sing_factor.
Mesh refine_mesh(const FlatSurface& surface, double h,
                 const MeshParams& params = {});

}  // namespace hourglass
