#include "hourglass/triangulation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace hourglass {

namespace {

constexpr double kPi = std::numbers::pi;

double polygon_scale(const Polygon& poly) {
  double s = 0.0;
  for (const auto& v : poly.vertices) s = std::max(s, v.norm());
  return std::max(1.0, s);
}

bool point_in_triangle(const Vec2& p, const Vec2& a, const Vec2& b,
                       const Vec2& c, double eps) {
  double d1 = (b - a).cross(p - a);
  double d2 = (c - b).cross(p - b);
  double d3 = (a - c).cross(p - c);
  return d1 >= -eps && d2 >= -eps && d3 >= -eps;
}

/// Ear clipping tolerant of collinear boundary vertices; returns triangles
/// as triples of original vertex indices, counterclockwise.
std::vector<std::array<int, 3>> ear_clip(const Polygon& poly) {
  int n = poly.size();
  double scale = polygon_scale(poly);
  double eps = 1e-12 * scale * scale;
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i) idx[i] = i;
  std::vector<std::array<int, 3>> out;

  while (static_cast<int>(idx.size()) > 3) {
    int m = static_cast<int>(idx.size());
    int best = -1;
    for (int k = 0; k < m; ++k) {
      int p = idx[(k + m - 1) % m], c = idx[k], q = idx[(k + 1) % m];
      const Vec2 &vp = poly.vertices[p], &vc = poly.vertices[c],
                 &vq = poly.vertices[q];
      if ((vc - vp).cross(vq - vc) <= eps) continue;  // reflex or flat corner
      bool blocked = false;
      for (int j = 0; j < m && !blocked; ++j) {
        int o = idx[j];
        if (o == p || o == c || o == q) continue;
        if (point_in_triangle(poly.vertices[o], vp, vc, vq, eps)) blocked = true;
      }
      if (!blocked) {
        best = k;
        break;
      }
    }
    if (best < 0)
      fail(ErrorCode::NonSimplePolygon, "polygon cannot be ear-clipped");
    int m2 = static_cast<int>(idx.size());
    out.push_back({idx[(best + m2 - 1) % m2], idx[best], idx[(best + 1) % m2]});
    idx.erase(idx.begin() + best);
  }
  out.push_back({idx[0], idx[1], idx[2]});
  return out;
}

std::pair<EdgeRef, GluingKind> partner_of(const FlatSurface& surface,
                                          const EdgeRef& e) {
  for (const auto& g : surface.gluings) {
    if (g.a == e) return {g.b, g.kind};
    if (g.b == e) return {g.a, g.kind};
  }
  fail(ErrorCode::UnmatchedEdge, "edge has no gluing partner");
}

}  // namespace

ChartMap gluing_map(const FlatSurface& surface, const EdgeRef& from,
                    const EdgeRef& to, GluingKind kind) {
  // The gluing carries the start of `from` to the end of `to`.
  const Polygon& pa = surface.polygons[from.polygon];
  const Polygon& pb = surface.polygons[to.polygon];
  Vec2 va = pa.vertices[from.edge];
  Vec2 vb = pb.vertices[(to.edge + 1) % pb.size()];
  if (kind == GluingKind::Translation) return {1.0, vb - va};
  return {-1.0, vb + va};
}

double Triangulation::total_area() const {
  double a = 0.0;
  for (const auto& t : triangles)
    if (t.alive) a += t.area();
  return a;
}

int Triangulation::live_triangle_count() const {
  int n = 0;
  for (const auto& t : triangles)
    if (t.alive) ++n;
  return n;
}

std::vector<int> Triangulation::singular_vertices() const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(vertices.size()); ++i)
    if (vertices[i].singular) out.push_back(i);
  return out;
}

bool Triangulation::charts_translation_only() const {
  for (const auto& t : triangles) {
    if (!t.alive) continue;
    for (int e = 0; e < 3; ++e)
      if (t.from_neighbor[e].sign < 0) return false;
  }
  return true;
}

bool Triangulation::is_local_delaunay(int t, int e, double eps) const {
  const Triangle& T = triangles[t];
  int u = T.neighbor[e];
  if (u == t || u < 0) return true;  // self-adjacent edges cannot flip
  const Triangle& U = triangles[u];
  int m = T.neighbor_side[e];
  Vec2 b = T.corner[e], c = T.corner[(e + 1) % 3], a = T.corner[(e + 2) % 3];
  Vec2 d = T.from_neighbor[e](U.corner[(m + 2) % 3]);
  // incircle(b, c, a; d): positive when d is strictly inside the circumcircle
  // of the counterclockwise triangle (b, c, a).
  Vec2 pb = b - d, pc = c - d, pa = a - d;
  double det = pb.x * (pc.y * pa.squared_norm() - pa.y * pc.squared_norm()) -
               pb.y * (pc.x * pa.squared_norm() - pa.x * pc.squared_norm()) +
               pb.squared_norm() * (pc.x * pa.y - pa.x * pc.y);
  double h = std::max({pb.norm(), pc.norm(), pa.norm(), (b - c).norm()});
  double scale = std::max(h * h * h * h, 1e-300);
  return det <= eps * scale;
}

void Triangulation::flip(int t, int e) {
  Triangle& T = triangles[t];
  int u = T.neighbor[e];
  int m = T.neighbor_side[e];
  if (u < 0 || u == t)
    fail(ErrorCode::BadParams, "cannot flip a self-adjacent edge");
  Triangle& U = triangles[u];
  ChartMap D = T.from_neighbor[e];  // U chart -> T chart

  int e1 = (e + 1) % 3, e2 = (e + 2) % 3;
  int m1 = (m + 1) % 3, m2 = (m + 2) % 3;
  Vec2 b = T.corner[e], c = T.corner[e1], a = T.corner[e2];
  Vec2 d = D(U.corner[m2]);
  int vb = T.vertex[e], vc = T.vertex[e1], va = T.vertex[e2];
  int vd = U.vertex[m2];

  double area1 = 0.5 * (d - b).cross(a - b);
  double area2 = 0.5 * (c - d).cross(a - d);
  if (area1 <= 0.0 || area2 <= 0.0)
    fail(ErrorCode::BadParams, "flip would create an inverted triangle");

  // The four quad boundary edges, keyed by their old (triangle, side).
  struct Outer {
    int owner, side;          // old position
    int nbr, nbr_side;        // old neighbor
    ChartMap from_nbr;        // old neighbor chart -> old owner chart
    bool owner_is_u;
  };
  std::array<Outer, 4> outer = {{
      {t, e2, T.neighbor[e2], T.neighbor_side[e2], T.from_neighbor[e2], false},
      {t, e1, T.neighbor[e1], T.neighbor_side[e1], T.from_neighbor[e1], false},
      {u, m1, U.neighbor[m1], U.neighbor_side[m1], U.from_neighbor[m1], true},
      {u, m2, U.neighbor[m2], U.neighbor_side[m2], U.from_neighbor[m2], true},
  }};
  // Old (tri, side) -> new (tri, side) for the quad boundary.
  std::map<std::pair<int, int>, std::pair<int, int>> relocate = {
      {{t, e2}, {t, 2}},  // a -> b
      {{t, e1}, {u, 1}},  // c -> a
      {{u, m1}, {t, 0}},  // b -> d
      {{u, m2}, {u, 0}},  // d -> c
  };

  // Provenance: keep the chart that covers each new triangle's centroid.
  ChartMap prov_t = T.to_polygon;
  int prov_t_poly = T.source_polygon;
  ChartMap prov_u = U.to_polygon.after(D.inverse());
  int prov_u_poly = U.source_polygon;
  auto pick_prov = [&](const Vec2& centroid, Triangle& tri) {
    double eps = 1e-9 * std::max(1.0, (b - c).squared_norm());
    if (point_in_triangle(centroid, b, c, a, eps)) {
      tri.source_polygon = prov_t_poly;
      tri.to_polygon = prov_t;
    } else {
      tri.source_polygon = prov_u_poly;
      tri.to_polygon = prov_u;
    }
  };

  Triangle nt;  // (b, d, a) replaces t
  nt.corner = {b, d, a};
  nt.vertex = {vb, vd, va};
  Triangle nu;  // (d, c, a) replaces u
  nu.corner = {d, c, a};
  nu.vertex = {vd, vc, va};
  pick_prov(nt.centroid(), nt);
  pick_prov(nu.centroid(), nu);
  // Internal diagonal d--a: nt edge 1 and nu edge 2, same chart.
  nt.neighbor[1] = u;
  nt.neighbor_side[1] = 2;
  nt.from_neighbor[1] = ChartMap{};
  nu.neighbor[2] = t;
  nu.neighbor_side[2] = 1;
  nu.from_neighbor[2] = ChartMap{};

  triangles[t] = nt;
  triangles[u] = nu;

  for (const Outer& o : outer) {
    auto [new_tri, new_side] = relocate.at({o.owner, o.side});
    // Chart change applied to the old owner chart to reach the new chart.
    ChartMap owner_change = o.owner_is_u ? D : ChartMap{};
    int nbr = o.nbr, nbr_side = o.nbr_side;
    ChartMap fwd = owner_change.after(o.from_nbr);
    auto self = relocate.find({nbr, nbr_side});
    if (self != relocate.end()) {
      // Neighbor is another quad-boundary edge of t or u: its chart changed.
      bool nbr_was_u = (nbr == u);
      ChartMap nbr_change = nbr_was_u ? D : ChartMap{};
      fwd = fwd.after(nbr_change.inverse());
      nbr = self->second.first;
      nbr_side = self->second.second;
    }
    Triangle& owner_tri = triangles[new_tri];
    owner_tri.neighbor[new_side] = nbr;
    owner_tri.neighbor_side[new_side] = nbr_side;
    owner_tri.from_neighbor[new_side] = fwd;
    if (self == relocate.end() && nbr >= 0) {
      Triangle& w = triangles[nbr];
      w.neighbor[nbr_side] = new_tri;
      w.neighbor_side[nbr_side] = new_side;
      w.from_neighbor[nbr_side] = fwd.inverse();
    }
  }
}

int Triangulation::split_edge(int t, int e) {
  Triangle& T = triangles[t];
  int u = T.neighbor[e];
  int m = T.neighbor_side[e];
  if (u < 0 || u == t)
    fail(ErrorCode::BadParams, "cannot split a self-adjacent edge");
  Triangle& U = triangles[u];
  ChartMap D = T.from_neighbor[e];

  int e1 = (e + 1) % 3, e2 = (e + 2) % 3;
  int m1 = (m + 1) % 3, m2 = (m + 2) % 3;
  Vec2 b = T.corner[e], c = T.corner[e1], a = T.corner[e2];
  Vec2 mid = (b + c) * 0.5;
  Vec2 cB = U.corner[m], bB = U.corner[m1], dB = U.corner[m2];
  Vec2 midB = (cB + bB) * 0.5;
  int vb = T.vertex[e], vc = T.vertex[e1], va = T.vertex[e2], vd = U.vertex[m2];

  int vm = static_cast<int>(vertices.size());
  {
    Vertex vert;
    vert.cone_angle = 2.0 * kPi;
    vert.singular = false;
    vert.surface_class = -1;
    if (surface)
      vert.position =
          canonicalize(*surface, T.source_polygon, T.to_polygon(mid));
    vertices.push_back(vert);
  }

  struct Outer {
    int owner, side;
    int nbr, nbr_side;
    ChartMap from_nbr;
  };
  std::array<Outer, 4> outer = {{
      {t, e1, T.neighbor[e1], T.neighbor_side[e1], T.from_neighbor[e1]},
      {t, e2, T.neighbor[e2], T.neighbor_side[e2], T.from_neighbor[e2]},
      {u, m1, U.neighbor[m1], U.neighbor_side[m1], U.from_neighbor[m1]},
      {u, m2, U.neighbor[m2], U.neighbor_side[m2], U.from_neighbor[m2]},
  }};
  int t2 = static_cast<int>(triangles.size());
  int u2 = t2 + 1;
  std::map<std::pair<int, int>, std::pair<int, int>> relocate = {
      {{t, e1}, {t2, 1}},  // c -> a
      {{t, e2}, {t, 2}},   // a -> b
      {{u, m1}, {u2, 1}},  // b -> d
      {{u, m2}, {u, 2}},   // d -> c
  };

  Triangle T1;  // (b, mid, a), chart of t
  T1.corner = {b, mid, a};
  T1.vertex = {vb, vm, va};
  T1.source_polygon = T.source_polygon;
  T1.to_polygon = T.to_polygon;
  Triangle T2;  // (mid, c, a), chart of t
  T2.corner = {mid, c, a};
  T2.vertex = {vm, vc, va};
  T2.source_polygon = T.source_polygon;
  T2.to_polygon = T.to_polygon;
  Triangle U1;  // (c, mid, d), chart of u
  U1.corner = {cB, midB, dB};
  U1.vertex = {vc, vm, vd};
  U1.source_polygon = U.source_polygon;
  U1.to_polygon = U.to_polygon;
  Triangle U2;  // (mid, b, d), chart of u
  U2.corner = {midB, bB, dB};
  U2.vertex = {vm, vb, vd};
  U2.source_polygon = U.source_polygon;
  U2.to_polygon = U.to_polygon;

  auto link = [](Triangle& x, int xe, int yi, int ye, const ChartMap& y_to_x) {
    x.neighbor[xe] = yi;
    x.neighbor_side[xe] = ye;
    x.from_neighbor[xe] = y_to_x;
  };
  // Split halves of the shared edge.
  int ti = t, ui = u;
  link(T1, 0, u2, 0, D);        // b->mid pairs mid->b
  link(U2, 0, ti, 0, D.inverse());
  link(T2, 0, ui, 0, D);        // mid->c pairs c->mid
  link(U1, 0, t2, 0, D.inverse());
  // New interior spokes.
  link(T1, 1, t2, 2, ChartMap{});  // mid->a pairs a->mid
  link(T2, 2, ti, 1, ChartMap{});
  link(U1, 1, u2, 2, ChartMap{});  // mid->d pairs d->mid
  link(U2, 2, ui, 1, ChartMap{});

  triangles[t] = T1;
  triangles[u] = U1;
  triangles.push_back(T2);
  triangles.push_back(U2);

  for (const Outer& o : outer) {
    auto [new_tri, new_side] = relocate.at({o.owner, o.side});
    int nbr = o.nbr, nbr_side = o.nbr_side;
    ChartMap fwd = o.from_nbr;  // charts are unchanged by splitting
    auto self = relocate.find({nbr, nbr_side});
    if (self != relocate.end()) {
      nbr = self->second.first;
      nbr_side = self->second.second;
    }
    Triangle& owner_tri = triangles[new_tri];
    owner_tri.neighbor[new_side] = nbr;
    owner_tri.neighbor_side[new_side] = nbr_side;
    owner_tri.from_neighbor[new_side] = fwd;
    if (self == relocate.end() && nbr >= 0) {
      Triangle& w = triangles[nbr];
      w.neighbor[nbr_side] = new_tri;
      w.neighbor_side[nbr_side] = new_side;
      w.from_neighbor[nbr_side] = fwd.inverse();
    }
  }
  return vm;
}

void Triangulation::check_consistent() const {
  for (int t = 0; t < static_cast<int>(triangles.size()); ++t) {
    const Triangle& T = triangles[t];
    if (!T.alive) continue;
    if (T.area() <= 0.0)
      fail(ErrorCode::OrientationError, "triangle with nonpositive area");
    for (int e = 0; e < 3; ++e) {
      int u = T.neighbor[e], m = T.neighbor_side[e];
      if (u < 0) fail(ErrorCode::UnmatchedEdge, "open triangle edge");
      const Triangle& U = triangles[u];
      if (!U.alive || U.neighbor[m] != t || U.neighbor_side[m] != e)
        fail(ErrorCode::UnmatchedEdge, "edge adjacency is not symmetric");
      const ChartMap& F = T.from_neighbor[e];
      double tol = 1e-7 * std::max(1.0, T.edge_length(e));
      if ((F(U.corner[m]) - T.corner[(e + 1) % 3]).norm() > tol ||
          (F(U.corner[(m + 1) % 3]) - T.corner[e]).norm() > tol)
        fail(ErrorCode::OrientationError, "edge transition mismatch");
      if (T.vertex[e] != U.vertex[(m + 1) % 3] ||
          T.vertex[(e + 1) % 3] != U.vertex[m])
        fail(ErrorCode::OrientationError, "edge vertex mismatch");
    }
  }
}

Triangulation triangulate(const FlatSurface& surface) {
  Triangulation tri;
  tri.surface = &surface;

  tri.vertices.resize(surface.singularities.size());
  for (size_t i = 0; i < surface.singularities.size(); ++i) {
    const Singularity& s = surface.singularities[i];
    Triangulation::Vertex& v = tri.vertices[i];
    v.cone_angle = s.cone_angle;
    v.singular = s.is_cone_point() || s.marked;
    v.surface_class = static_cast<int>(i);
    CornerRef c = s.vertex_class.front();
    v.position = {c.polygon, surface.polygons[c.polygon].vertices[c.vertex]};
  }

  // (polygon, min(i,j), max(i,j)) -> (triangle, side) for diagonals and
  // boundary edges of each polygon.
  std::map<std::tuple<int, int, int>, std::vector<std::pair<int, int>>> edges;
  for (int p = 0; p < static_cast<int>(surface.polygons.size()); ++p) {
    const Polygon& poly = surface.polygons[p];
    for (const auto& tr : ear_clip(poly)) {
      Triangulation::Triangle T;
      for (int k = 0; k < 3; ++k) {
        T.corner[k] = poly.vertices[tr[k]];
        T.vertex[k] = surface.corner_class.at({p, tr[k]});
      }
      T.source_polygon = p;
      T.to_polygon = ChartMap{};
      int id = static_cast<int>(tri.triangles.size());
      tri.triangles.push_back(T);
      for (int k = 0; k < 3; ++k) {
        int i = tr[k], j = tr[(k + 1) % 3];
        edges[{p, std::min(i, j), std::max(i, j)}].push_back({id, k});
      }
    }
  }

  auto link = [&](int t, int e, int u, int m, const ChartMap& from_u) {
    tri.triangles[t].neighbor[e] = u;
    tri.triangles[t].neighbor_side[e] = m;
    tri.triangles[t].from_neighbor[e] = from_u;
    tri.triangles[u].neighbor[m] = t;
    tri.triangles[u].neighbor_side[m] = e;
    tri.triangles[u].from_neighbor[m] = from_u.inverse();
  };

  // Interior diagonals share the polygon chart.
  for (int p = 0; p < static_cast<int>(surface.polygons.size()); ++p) {
    int n = surface.polygons[p].size();
    for (auto& [key, uses] : edges) {
      if (std::get<0>(key) != p) continue;
      int i = std::get<1>(key), j = std::get<2>(key);
      bool boundary = (j == i + 1) || (i == 0 && j == n - 1);
      if (boundary) continue;
      if (uses.size() != 2)
        fail(ErrorCode::UnmatchedEdge, "diagonal not shared by two triangles");
      link(uses[0].first, uses[0].second, uses[1].first, uses[1].second,
           ChartMap{});
    }
  }

  // Polygon boundary edges follow the gluings.
  auto boundary_use = [&](const EdgeRef& e) -> std::pair<int, int> {
    int n = surface.polygons[e.polygon].size();
    int i = e.edge, j = (e.edge + 1) % n;
    auto& uses = edges.at({e.polygon, std::min(i, j), std::max(i, j)});
    if (uses.size() != 1)
      fail(ErrorCode::UnmatchedEdge, "boundary edge not on one triangle");
    return uses.front();
  };
  for (const auto& g : surface.gluings) {
    auto [t, e] = boundary_use(g.a);
    auto [u, m] = boundary_use(g.b);
    link(t, e, u, m, gluing_map(surface, g.b, g.a, g.kind));
  }

  tri.check_consistent();
  return tri;
}

int make_delaunay(Triangulation& tri, int flip_cap) {
  int flips = 0;
  bool dirty = true;
  while (dirty) {
    dirty = false;
    for (int t = 0; t < static_cast<int>(tri.triangles.size()); ++t) {
      if (!tri.triangles[t].alive) continue;
      for (int e = 0; e < 3; ++e) {
        if (tri.is_local_delaunay(t, e)) continue;
        tri.flip(t, e);
        if (++flips > flip_cap)
          fail(ErrorCode::FlipLimitExceeded, "Delaunay flip cap exceeded");
        dirty = true;
      }
    }
  }
  return flips;
}

Triangulation delaunay(const FlatSurface& surface) {
  Triangulation tri = triangulate(surface);
  make_delaunay(tri);
  tri.check_consistent();
  return tri;
}

SurfacePoint canonicalize(const FlatSurface& surface, int polygon, Vec2 p) {
  for (int iter = 0; iter < 256; ++iter) {
    const Polygon& poly = surface.polygons[polygon];
    int n = poly.size();
    double scale = polygon_scale(poly);
    int worst = -1;
    double floor_dist = 1e-9 * scale;
    double best_seg = std::numeric_limits<double>::infinity();
    for (int e = 0; e < n; ++e) {
      Vec2 ev = poly.edge_vector(e);
      double outside = -ev.cross(p - poly.vertices[e]) / ev.norm();
      if (outside <= floor_dist) continue;
      // Among violated edges fold through the one whose closed segment is
      // nearest; the line violation alone ties between collinear sub-edges
      // (slit-style polygons) and can pick a wrong sheet near a cone point.
      double t = (p - poly.vertices[e]).dot(ev) / ev.dot(ev);
      t = std::clamp(t, 0.0, 1.0);
      double d = (p - (poly.vertices[e] + ev * t)).norm();
      if (d < best_seg) {
        best_seg = d;
        worst = e;
      }
    }
    if (worst < 0) return {polygon, p};
    auto [partner, kind] = partner_of(surface, {polygon, worst});
    p = gluing_map(surface, {polygon, worst}, partner, kind)(p);
    polygon = partner.polygon;
  }
  fail(ErrorCode::NoPathFound, "point folding did not terminate");
}

std::pair<int, Vec2> locate(const Triangulation& tri, const SurfacePoint& p) {
  if (!tri.surface) fail(ErrorCode::BadParams, "triangulation has no surface");
  const FlatSurface& surface = *tri.surface;

  auto try_polygon = [&](int poly, const Vec2& coords,
                         double eps) -> std::pair<int, Vec2> {
    for (int t = 0; t < static_cast<int>(tri.triangles.size()); ++t) {
      const auto& T = tri.triangles[t];
      if (!T.alive || T.source_polygon != poly) continue;
      Vec2 q = T.to_polygon.inverse()(coords);
      if (point_in_triangle(q, T.corner[0], T.corner[1], T.corner[2], eps))
        return {t, q};
    }
    return {-1, {}};
  };

  SurfacePoint c = canonicalize(surface, p.polygon, p.coords);
  double scale = polygon_scale(surface.polygons[c.polygon]);
  for (double eps : {1e-12 * scale * scale, 1e-9 * scale * scale}) {
    auto hit = try_polygon(c.polygon, c.coords, eps);
    if (hit.first >= 0) return hit;
    // Near a gluing edge the containing triangle may live in the partner
    // polygon's chart (flipped triangles straddle polygon boundaries).
    for (const auto& g : surface.gluings) {
      for (auto [from, to] : {std::pair{g.a, g.b}, std::pair{g.b, g.a}}) {
        if (from.polygon != c.polygon) continue;
        Vec2 moved = gluing_map(surface, from, to, g.kind)(c.coords);
        hit = try_polygon(to.polygon, moved, eps);
        if (hit.first >= 0) return hit;
      }
    }
  }
  fail(ErrorCode::NoPathFound, "surface point not found in any triangle");
}

}  // namespace hourglass
