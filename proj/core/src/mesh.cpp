#include "hourglass/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hourglass {

namespace {

double cot_at(const Triangulation::Triangle& t, int k) {
  Vec2 a = t.corner[(k + 1) % 3] - t.corner[k];
  Vec2 b = t.corner[(k + 2) % 3] - t.corner[k];
  double cross = a.cross(b);
  if (std::abs(cross) < 1e-300) throw SurfaceError(ErrorCode::SolverFailure,
                                                   "degenerate mesh triangle");
  return a.dot(b) / cross;
}

/// Graph distance from every vertex to the singular vertices, by edge
/// relaxation until a fixed point.
std::vector<double> vertex_distances(const Triangulation& tri) {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(tri.vertices.size(), inf);
  for (size_t v = 0; v < tri.vertices.size(); ++v)
    if (tri.vertices[v].singular) dist[v] = 0.0;
  for (int sweep = 0; sweep < 4096; ++sweep) {
    bool changed = false;
    for (const auto& t : tri.triangles) {
      if (!t.alive) continue;
      for (int e = 0; e < 3; ++e) {
        int a = t.vertex[e], b = t.vertex[(e + 1) % 3];
        double len = t.edge_length(e);
        if (dist[a] + len < dist[b] - 1e-15) dist[b] = dist[a] + len, changed = true;
        if (dist[b] + len < dist[a] - 1e-15) dist[a] = dist[b] + len, changed = true;
      }
    }
    if (!changed) break;
  }
  return dist;
}

}  // namespace

Mesh make_mesh(const Triangulation& tri) {
  Mesh mesh;
  mesh.tri = tri;
  const auto& ts = mesh.tri.triangles;
  mesh.edge_of.assign(ts.size(), {-1, -1, -1});
  mesh.edge_sign.assign(ts.size(), {0.0, 0.0, 0.0});
  for (int t = 0; t < static_cast<int>(ts.size()); ++t) {
    if (!ts[t].alive) continue;
    for (int e = 0; e < 3; ++e) {
      if (mesh.edge_of[t][e] >= 0) continue;
      int u = ts[t].neighbor[e];
      int m = ts[t].neighbor_side[e];
      MeshEdge edge;
      edge.t = t;
      edge.e = e;
      edge.u = u;
      edge.m = m;
      edge.va = ts[t].vertex[e];
      edge.vb = ts[t].vertex[(e + 1) % 3];
      edge.length = ts[t].edge_length(e);
      edge.weight = 0.5 * (cot_at(ts[t], (e + 2) % 3) + cot_at(ts[u], (m + 2) % 3));
      int id = static_cast<int>(mesh.edges.size());
      mesh.edges.push_back(edge);
      mesh.edge_of[t][e] = id;
      mesh.edge_sign[t][e] = 1.0;
      mesh.edge_of[u][m] = id;
      mesh.edge_sign[u][m] = -1.0;
    }
  }
  mesh.vertex_dist = vertex_distances(mesh.tri);
  return mesh;
}

Mesh refine_mesh(const FlatSurface& surface, double h, const MeshParams& params) {
  if (!(h > 0.0))
    throw SurfaceError(ErrorCode::BadParams, "mesh size h must be positive");

  Triangulation tri = delaunay(surface);
  double floor = h * params.sing_factor;

  for (int pass = 0; pass < params.max_passes; ++pass) {
    make_delaunay(tri);
    std::vector<double> dist = vertex_distances(tri);
    dist.resize(tri.vertices.size() + 16);  // room written below before reuse

    int splits = 0;
    size_t nt = tri.triangles.size();
    for (size_t t = 0; t < nt; ++t) {
      if (!tri.triangles[t].alive) continue;
      for (int e = 0; e < 3; ++e) {
        int u = tri.triangles[t].neighbor[e];
        int m = tri.triangles[t].neighbor_side[e];
        if (u < static_cast<int>(t) || (u == static_cast<int>(t) && m < e))
          continue;
        int va = tri.triangles[t].vertex[e];
        int vb = tri.triangles[t].vertex[(e + 1) % 3];
        double len = tri.triangles[t].edge_length(e);
        double dmin = std::min(dist[va], dist[vb]);
        double target = std::min(h, std::max(floor, params.grade * dmin));
        if (len <= params.split_slack * target) continue;
        int nv = tri.split_edge(static_cast<int>(t), e);
        if (nv >= static_cast<int>(dist.size())) dist.resize(nv + 16);
        dist[nv] = dmin + 0.5 * len;
        ++splits;
        if (static_cast<int>(tri.vertices.size()) > params.max_vertices)
          throw SurfaceError(ErrorCode::BudgetExceeded,
                             "mesh refinement exceeded the vertex budget");
      }
    }
    if (splits == 0) break;
  }
  make_delaunay(tri);

  Mesh mesh = make_mesh(tri);
  mesh.h = h;
  return mesh;
}

}  // namespace hourglass
