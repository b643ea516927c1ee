#include "hourglass/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace hourglass {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double middle_band_halfwidths(const FlatCylinder& cyl, double B, double* lo,
                              double* hi) {
  double ell = cyl.core_length;
  *hi = cyl.above - B * ell;
  *lo = -(cyl.below - B * ell);
  return *hi - *lo;
}

/// True when the chart point of triangle t lies in the cylinder's middle band
/// (further than B*l(core) from both boundaries). Falls back to a closure
/// trace when the seed-ray crossings miss the triangle.
bool in_cylinder_middle(const Triangulation& tri, const FlatCylinder& cyl,
                        double B, int t, const Vec2& q, const SurfacePoint& sp) {
  double lo, hi;
  middle_band_halfwidths(cyl, B, &lo, &hi);
  for (const auto& [ct, M] : cyl.crossings) {
    if (ct != t) continue;
    double perp = cyl.plane_dir.cross(M(q) - cyl.plane_origin);
    return perp > lo && perp < hi;
  }
  // Directions transfer between charts up to sign, which is irrelevant mod pi.
  Vec2 d{std::cos(cyl.direction), std::sin(cyl.direction)};
  ClosureResult c =
      trace_closure(tri, t, q, d, cyl.core_length * (1.0 + 1e-6) + 1e-12);
  if (!c.closed ||
      std::fabs(c.length - cyl.core_length) > 1e-6 * std::max(1.0, c.length))
    return false;
  return distance_to_singularities(tri, sp) > B * cyl.core_length;
}

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

PADecomposition build_pad(const Triangulation& tri, const PADParams& params) {
  if (!(params.mu0 > params.B && params.B > 2.0))
    fail(ErrorCode::BadParams, "PAD parameters must satisfy mu0 > B > 2");
  if (!tri.surface) fail(ErrorCode::BadParams, "triangulation has no surface");
  const FlatSurface& surface = *tri.surface;

  PADecomposition pad;
  pad.params = params;
  pad.surface_area = surface.area;

  for (const auto& cyl : find_cylinders(tri, params.mu0)) {
    if (!(cyl.modulus > params.mu0)) continue;
    if (cyl.width - 2.0 * params.B * cyl.core_length <= 0)
      fail(ErrorCode::DisjointnessViolated,
           "cylinder level circles cross; B is too large for mu0");
    PADAnnulus a;
    a.is_cylinder = true;
    a.cylinder = cyl;
    a.mu = {false, cyl.modulus};
    pad.annuli.push_back(a);
  }
  double thin_bound = std::sqrt(surface.area) / params.mu0;
  for (int p : surface.singular_set()) {
    double W = puncture_disk_radius(tri, p);
    if (W < thin_bound) {
      PADAnnulus a;
      a.shell_singularity = p;
      a.shell_radius = W;
      a.mu = {true, 0.0};
      pad.annuli.push_back(a);
    }
  }

  // Analytic disjointness check between shell circles and cylinder middles.
  for (const auto& s : pad.annuli) {
    if (s.is_cylinder) continue;
    double r_o = s.shell_radius / (params.B + 1.0);
    for (const auto& c : pad.annuli)
      if (c.is_cylinder && r_o > params.B * c.cylinder.core_length)
        fail(ErrorCode::DisjointnessViolated,
             "shell circle reaches a cylinder middle");
  }

  // Annulus pieces (one per annulus, same index).
  for (int i = 0; i < static_cast<int>(pad.annuli.size()); ++i) {
    const PADAnnulus& a = pad.annuli[i];
    PADPiece piece;
    piece.annulus = i;
    if (a.is_cylinder) {
      double ell = a.cylinder.core_length;
      double h = a.cylinder.width - 2.0 * params.B * ell;
      piece.kind = PieceKind::CylinderMiddle;
      piece.area = ell * h;
      piece.diameter = std::hypot(ell / 2, h);
    } else {
      double r_o = a.shell_radius / (params.B + 1.0);
      double angle = surface.singularities[a.shell_singularity].cone_angle;
      piece.kind = PieceKind::AnnulusShell;
      piece.area = 0.5 * angle * r_o * r_o;
      piece.diameter = 2.0 * r_o;
    }
    pad.pieces.push_back(piece);
  }

  // Classify triangles by centroid.
  int nt = static_cast<int>(tri.triangles.size());
  std::vector<int> piece_of(nt, -1);
  for (int t = 0; t < nt; ++t) {
    const auto& T = tri.triangles[t];
    if (!T.alive) continue;
    Vec2 cen = T.centroid();
    SurfacePoint sp = canonicalize(surface, T.source_polygon, T.to_polygon(cen));
    for (int i = 0; i < static_cast<int>(pad.annuli.size()); ++i) {
      const PADAnnulus& a = pad.annuli[i];
      bool inside = false;
      if (a.is_cylinder) {
        inside = in_cylinder_middle(tri, a.cylinder, params.B, t, cen, sp);
      } else {
        double r_o = a.shell_radius / (params.B + 1.0);
        double d = kInf;
        for (const auto& h : segments_from_point(tri, sp, 2.0 * r_o).hits)
          if (tri.vertices[h.vertex].surface_class == a.shell_singularity)
            d = std::min(d, h.length);
        inside = d < r_o;
      }
      if (inside) {
        if (piece_of[t] >= 0)
          fail(ErrorCode::DisjointnessViolated,
               "annulus pieces overlap on a mesh triangle");
        piece_of[t] = i;
        pad.pieces[i].triangles.push_back(t);
      }
    }
  }

  // Thick pieces: connected components of the remaining triangles.
  std::vector<int> comp(nt, -1);
  for (int t = 0; t < nt; ++t) {
    if (!tri.triangles[t].alive || piece_of[t] >= 0 || comp[t] >= 0) continue;
    int id = static_cast<int>(pad.pieces.size());
    PADPiece piece;
    piece.kind = PieceKind::Thick;
    std::vector<int> stack{t};
    comp[t] = id;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      piece.triangles.push_back(u);
      piece.area += tri.triangles[u].area();
      for (int e = 0; e < 3; ++e) {
        int v = tri.triangles[u].neighbor[e];
        if (v < 0 || !tri.triangles[v].alive) continue;
        if (piece_of[v] >= 0 || comp[v] >= 0) continue;
        comp[v] = id;
        stack.push_back(v);
      }
    }
    pad.pieces.push_back(std::move(piece));
  }
  for (int t = 0; t < nt; ++t)
    if (comp[t] >= 0) piece_of[t] = comp[t];

  // Rescale thick areas so all pieces sum to the surface area (thick pieces
  // also own the cylinder bands and shell exteriors cut off by the circles).
  double inside_total = 0.0, outside_total = 0.0;
  for (const auto& piece : pad.pieces)
    (piece.kind == PieceKind::Thick ? outside_total : inside_total) +=
        piece.area;
  if (outside_total > 0) {
    double lambda = (surface.area - inside_total) / outside_total;
    for (auto& piece : pad.pieces)
      if (piece.kind == PieceKind::Thick) piece.area *= lambda;
  }

  // Thick diameters: shortest-path estimate over the centroid graph.
  for (auto& piece : pad.pieces) {
    if (piece.kind != PieceKind::Thick) continue;
    const auto& tris = piece.triangles;
    int n = static_cast<int>(tris.size());
    std::vector<int> local(nt, -1);
    for (int i = 0; i < n; ++i) local[tris[i]] = i;
    double diam = 0.0;
    for (int s = 0; s < n; ++s) {
      std::vector<double> dist(n, kInf);
      std::vector<bool> done(n, false);
      dist[s] = 0.0;
      for (int it = 0; it < n; ++it) {
        int u = -1;
        double bu = kInf;
        for (int i = 0; i < n; ++i)
          if (!done[i] && dist[i] < bu) bu = dist[u = i];
        if (u < 0) break;
        done[u] = true;
        const auto& T = tri.triangles[tris[u]];
        for (int e = 0; e < 3; ++e) {
          int v = T.neighbor[e];
          if (v < 0 || local[v] < 0) continue;
          Vec2 nc = T.from_neighbor[e](tri.triangles[v].centroid());
          double w = (nc - T.centroid()).norm();
          if (dist[u] + w < dist[local[v]]) dist[local[v]] = dist[u] + w;
        }
      }
      for (int i = 0; i < n; ++i)
        if (std::isfinite(dist[i])) diam = std::max(diam, dist[i]);
    }
    piece.diameter = diam;
  }

  // Level circles with graph adjacency.
  for (int i = 0; i < static_cast<int>(pad.annuli.size()); ++i) {
    const PADAnnulus& a = pad.annuli[i];
    if (a.is_cylinder) {
      const FlatCylinder& cyl = a.cylinder;
      double ell = cyl.core_length;
      double eps_out = 1e-3 * std::sqrt(surface.area);
      for (int side = 0; side < 2; ++side) {
        LevelCircle circle;
        circle.annulus = i;
        circle.kind = side == 0 ? CircleKind::Outer : CircleKind::Inner;
        circle.length = ell;
        circle.position = side == 0 ? cyl.above - params.B * ell
                                    : -(cyl.below - params.B * ell);
        circle.node_a = i;
        double probe = side == 0 ? cyl.above + eps_out : -(cyl.below + eps_out);
        SurfacePoint sp = cylinder_point_at_offset(tri, cyl, probe);
        auto [t, q] = locate(tri, sp);
        circle.node_b = piece_of[t];
        pad.circles.push_back(circle);
      }
    } else {
      double r_o = a.shell_radius / (params.B + 1.0);
      LevelCircle inner;
      inner.annulus = i;
      inner.kind = CircleKind::Inner;
      inner.degenerate = true;  // collapses to the core point
      pad.circles.push_back(inner);
      LevelCircle outer;
      outer.annulus = i;
      outer.kind = CircleKind::Outer;
      outer.position = r_o;
      outer.length =
          surface.singularities[a.shell_singularity].cone_angle * r_o;
      outer.node_a = i;
      for (int t = 0; t < nt && outer.node_b < 0; ++t) {
        if (!tri.triangles[t].alive) continue;
        for (int k = 0; k < 3; ++k)
          if (tri.vertices[tri.triangles[t].vertex[k]].surface_class ==
              a.shell_singularity)
            outer.node_b = piece_of[t];
      }
      pad.circles.push_back(outer);
    }
  }
  for (const auto& circle : pad.circles) {
    if (circle.node_a >= 0) pad.pieces[circle.node_a].boundary_length += circle.length;
    if (circle.node_b >= 0) pad.pieces[circle.node_b].boundary_length += circle.length;
  }
  for (auto& piece : pad.pieces)
    piece.size = std::min(std::sqrt(std::max(piece.area, 0.0)),
                          piece.diameter > 0 ? piece.diameter : kInf);
  return pad;
}

PADecomposition build_pad(const FlatSurface& surface, const PADParams& params) {
  Triangulation tri = delaunay(surface);
  return build_pad(tri, params);
}

ThickThinReport verify_thick_thin(const Triangulation& tri,
                                  const PADecomposition& pad) {
  ThickThinReport report;
  DistanceField r = distance_field(tri);
  for (int i = 0; i < static_cast<int>(pad.pieces.size()); ++i) {
    const PADPiece& piece = pad.pieces[i];
    ThickThinEntry e;
    e.piece = i;
    e.kind = piece.kind;
    e.area = piece.area;
    e.diameter = piece.diameter;
    e.size = piece.size;
    e.boundary_length = piece.boundary_length;
    if (piece.kind == PieceKind::AnnulusShell) {
      e.disk_radius = pad.annuli[piece.annulus].shell_radius;
    } else if (!piece.triangles.empty()) {
      // Deepest sample: centroid of the largest triangle of the piece.
      int best = piece.triangles.front();
      for (int t : piece.triangles)
        if (tri.triangles[t].area() > tri.triangles[best].area()) best = t;
      const auto& T = tri.triangles[best];
      e.disk_radius = r(canonicalize(*tri.surface, T.source_polygon,
                                     T.to_polygon(T.centroid())));
    }
    if (e.size > 0) {
      e.diam_over_size = e.diameter / e.size;
      e.area_over_size2 = e.area / (e.size * e.size);
      e.boundary_over_size = e.boundary_length / e.size;
      auto out = [&](double v) {
        return v > 0 && (v < 1.0 / report.band || v > report.band);
      };
      e.flagged = out(e.diam_over_size) || out(e.area_over_size2) ||
                  out(e.boundary_over_size);
    }
    report.entries.push_back(e);
  }
  return report;
}

HourglassResult hourglass_ratio(const PADecomposition& pad) {
  std::vector<int> usable;
  for (int i = 0; i < static_cast<int>(pad.circles.size()); ++i) {
    const auto& c = pad.circles[i];
    if (!c.degenerate && c.node_a >= 0 && c.node_b >= 0) usable.push_back(i);
  }
  int n = static_cast<int>(usable.size());
  if (n > 20)
    fail(ErrorCode::BoundTooLarge, "too many level circles to enumerate");
  int np = static_cast<int>(pad.pieces.size());

  HourglassResult best;
  double best_val = kInf;
  for (int mask = 1; mask < (1 << n); ++mask) {
    UnionFind uf(np);
    for (int j = 0; j < n; ++j) {
      if (mask & (1 << j)) continue;
      const auto& c = pad.circles[usable[j]];
      uf.unite(c.node_a, c.node_b);
    }
    int root0 = uf.find(0);
    int root1 = -1;
    bool more = false;
    for (int p = 1; p < np; ++p) {
      int r = uf.find(p);
      if (r == root0) continue;
      if (root1 < 0)
        root1 = r;
      else if (r != root1)
        more = true;
    }
    if (root1 < 0 || more) continue;  // not a two-piece separation
    double area[2] = {0, 0};
    bool essential[2] = {false, false};
    for (int p = 0; p < np; ++p) {
      int side = uf.find(p) == root0 ? 0 : 1;
      area[side] += pad.pieces[p].area;
      if (pad.pieces[p].kind != PieceKind::AnnulusShell) essential[side] = true;
    }
    if (!essential[0] || !essential[1]) continue;
    double len = 0.0;
    for (int j = 0; j < n; ++j)
      if (mask & (1 << j)) len += pad.circles[usable[j]].length;
    double smaller = std::min(area[0], area[1]);
    if (smaller <= 0) continue;
    double val = len / std::sqrt(smaller);
    if (val < best_val - 1e-15) {
      best_val = val;
      best.witness.clear();
      for (int j = 0; j < n; ++j)
        if (mask & (1 << j)) best.witness.push_back(usable[j]);
      best.witness_length = len;
      best.smaller_side_area = smaller;
    }
  }
  if (std::isfinite(best_val)) {
    best.value = std::min(1.0, best_val);
  } else {
    best.value = 1.0;
  }
  return best;
}

}  // namespace hourglass
