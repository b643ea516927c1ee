#include "hourglass/flat_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <utility>

namespace hourglass {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

double surface_area(const Triangulation& tri) {
  return tri.surface ? tri.surface->area : tri.total_area();
}

Vec2 rotate_ccw(const Vec2& v, double ang) {
  double c = std::cos(ang), s = std::sin(ang);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

Vec2 normalized(const Vec2& v) {
  double n = v.norm();
  return {v.x / n, v.y / n};
}

/// Chart-atlas distance between nearby surface points: straight distance in
/// a shared polygon chart, possibly across one gluing. Infinity when the
/// points cannot be compared this way (then they are far apart anyway).
double chart_distance(const FlatSurface& surface, const SurfacePoint& a,
                      const SurfacePoint& b) {
  double best = kInf;
  if (a.polygon == b.polygon) best = (a.coords - b.coords).norm();
  for (const auto& g : surface.gluings) {
    for (auto [from, to] : {std::pair{g.a, g.b}, std::pair{g.b, g.a}}) {
      if (from.polygon != a.polygon || to.polygon != b.polygon) continue;
      Vec2 moved = gluing_map(surface, from, to, g.kind)(a.coords);
      best = std::min(best, (moved - b.coords).norm());
    }
  }
  return best;
}

}  // namespace

std::vector<SaddleConnection> enumerate_saddle_connections(
    const Triangulation& tri, double length_bound, int max_results) {
  if (length_bound <= 0)
    fail(ErrorCode::BadParams, "saddle connection bound must be positive");
  std::vector<SaddleConnection> out;
  for (int v : tri.singular_vertices()) {
    int sv = tri.vertices[v].surface_class;
    for (const auto& h : segments_from_vertex(tri, v, length_bound)) {
      if (!tri.vertices[h.vertex].singular) continue;
      out.push_back(
          {sv, tri.vertices[h.vertex].surface_class, h.vec, h.length});
      if (static_cast<int>(out.size()) > max_results)
        fail(ErrorCode::BoundTooLarge, "saddle connection count cap exceeded");
    }
  }
  std::sort(out.begin(), out.end(),
            [](const SaddleConnection& a, const SaddleConnection& b) {
              return a.length < b.length;
            });
  return out;
}

std::vector<SaddleConnection> enumerate_saddle_connections(
    const FlatSurface& surface, double length_bound, int max_results) {
  Triangulation tri = delaunay(surface);
  return enumerate_saddle_connections(tri, length_bound, max_results);
}

double puncture_disk_radius(const Triangulation& tri, int singularity_id) {
  int v = -1;
  for (int i = 0; i < static_cast<int>(tri.vertices.size()); ++i)
    if (tri.vertices[i].surface_class == singularity_id) v = i;
  if (v < 0 || !tri.vertices[v].singular)
    fail(ErrorCode::BadParams, "not a singular vertex");
  double R = 0.25 * std::sqrt(surface_area(tri));
  for (int iter = 0; iter < 16; ++iter) {
    double best = kInf;
    for (const auto& h : segments_from_vertex(tri, v, R)) {
      if (!tri.vertices[h.vertex].singular) continue;
      best = std::min(best, h.vertex == v ? h.length / 2 : h.length);
    }
    if (2.0 * best <= R) return best;
    R *= 2.0;
  }
  fail(ErrorCode::SearchBudgetExceeded, "puncture disk search did not settle");
}

double DistanceField::operator()(const SurfacePoint& p) const {
  auto [t, q] = locate(*tri_, p);
  const auto& T = tri_->triangles[t];
  double scale = std::max({T.edge_length(0), T.edge_length(1), T.edge_length(2)});
  for (int k = 0; k < 3; ++k) {
    if (tri_->vertices[T.vertex[k]].singular &&
        (q - T.corner[k]).norm() <= 1e-12 * std::max(1.0, scale))
      return 0.0;
  }
  double R = 0.25 * std::sqrt(surface_area(*tri_));
  for (int iter = 0; iter < 16; ++iter) {
    PointSearch ps = segments_from_point(*tri_, p, R);
    double best = kInf;
    for (const auto& h : ps.hits)
      if (tri_->vertices[h.vertex].singular) best = std::min(best, h.length);
    for (double loop : ps.loops) best = std::min(best, loop / 2);
    if (2.0 * best <= R) return best;
    R *= 2.0;
  }
  fail(ErrorCode::SearchBudgetExceeded, "distance field search did not settle");
}

DistanceField distance_field(const Triangulation& tri) {
  return DistanceField(tri);
}

// ---------------------------------------------------------------------------
// Cylinders
// ---------------------------------------------------------------------------

namespace {

struct RayDescriptor {
  int tri = -1;
  Vec2 pos;
  Vec2 dir;
};

/// Walks perpendicular to `dir` for the signed offset and returns the
/// parallel ray there (parallel transport of the direction).
std::optional<RayDescriptor> offset_ray(const Triangulation& tri,
                                        const RayDescriptor& seed,
                                        double offset) {
  if (offset == 0.0) return seed;
  double dist = std::fabs(offset);
  Vec2 n = normalized(seed.dir).perp() * (offset > 0 ? 1.0 : -1.0);
  RayWalker w(tri, seed.tri, seed.pos, n);
  for (int steps = 0; steps < 100000; ++steps) {
    if (w.exit_param() >= dist) {
      Vec2 plane_pos = w.origin() + w.direction() * dist;
      Vec2 chart_pos = w.dev().inverse()(plane_pos);
      Vec2 chart_dir = normalized(seed.dir) * w.dev().sign;
      return RayDescriptor{w.triangle(), chart_pos, chart_dir};
    }
    if (!w.step()) return std::nullopt;
  }
  return std::nullopt;
}

struct ScanResult {
  bool closed = false;
  double min_above = kInf;
  double min_below = kInf;
  bool touches = false;
};

/// Walks one period of a core-parallel ray at the given absolute offset and
/// collects singular-vertex offsets (absolute, relative to the seed ray).
ScanResult scan_period(const Triangulation& tri, const RayDescriptor& seed,
                       double offset, double ell,
                       std::vector<std::pair<int, ChartMap>>* crossings,
                       Vec2* plane_origin, Vec2* plane_dir) {
  ScanResult res;
  auto ray = offset_ray(tri, seed, offset);
  if (!ray) return res;
  ClosureResult c = trace_closure(tri, ray->tri, ray->pos, ray->dir,
                                  ell * (1.0 + 1e-6) + 1e-9);
  if (!c.closed || std::fabs(c.length - ell) > 1e-6 * std::max(1.0, ell))
    return res;
  res.closed = true;
  RayWalker w(tri, ray->tri, ray->pos, ray->dir);
  double tol = 1e-9 * std::max(1.0, ell);
  for (int steps = 0; steps < 100000; ++steps) {
    if (crossings) {
      crossings->push_back({w.triangle(), w.dev()});
      if (steps == 0) {
        *plane_origin = w.origin();
        *plane_dir = w.direction();
      }
    }
    const auto& T = tri.triangles[w.triangle()];
    for (int k = 0; k < 3; ++k) {
      if (!tri.vertices[T.vertex[k]].singular) continue;
      double rel = w.direction().cross(w.dev()(T.corner[k]) - w.origin());
      double abs_off = offset + rel;
      if (std::fabs(abs_off) <= tol)
        res.touches = true;
      else if (abs_off > 0)
        res.min_above = std::min(res.min_above, abs_off);
      else
        res.min_below = std::min(res.min_below, -abs_off);
    }
    if (w.traveled() >= ell * (1.0 - 1e-9)) break;
    if (!w.step()) break;
  }
  return res;
}

std::optional<FlatCylinder> build_cylinder(const Triangulation& tri,
                                           const RayDescriptor& seed,
                                           double ell) {
  FlatCylinder cyl;
  ScanResult base = scan_period(tri, seed, 0.0, ell, &cyl.crossings,
                                &cyl.plane_origin, &cyl.plane_dir);
  if (!base.closed || base.touches) return std::nullopt;
  double above = base.min_above, below = base.min_below;
  if (!std::isfinite(above) || !std::isfinite(below)) return std::nullopt;

  auto expand = [&](double side_sign, double bound) -> double {
    double known = bound;
    double last_good = 0.0;
    for (int iter = 0; iter < 48; ++iter) {
      double margin = std::max(1e-10, 1e-7 * known);
      double target = known - margin;
      if (target <= last_good) return known;
      ScanResult r = scan_period(tri, seed, side_sign * target, ell, nullptr,
                                 nullptr, nullptr);
      if (r.closed) {
        last_good = target;
        if (r.touches) return target;
        double seen = side_sign > 0 ? r.min_above : r.min_below;
        if (seen >= known - 1e-12) return known;
        if (seen <= target) return target;
        known = seen;
      } else {
        // Unseen obstruction: bisect for the largest closing offset.
        double lo = last_good, hi = target;
        for (int b = 0; b < 40 && hi - lo > 1e-11 * std::max(1.0, hi); ++b) {
          double mid = 0.5 * (lo + hi);
          ScanResult m = scan_period(tri, seed, side_sign * mid, ell, nullptr,
                                     nullptr, nullptr);
          if (m.closed)
            lo = mid;
          else
            hi = mid;
        }
        return hi;
      }
    }
    return known;
  };

  cyl.above = expand(+1.0, above);
  cyl.below = expand(-1.0, below);
  cyl.core_length = ell;
  cyl.width = cyl.above + cyl.below;
  if (cyl.width <= 0) return std::nullopt;
  cyl.modulus = cyl.width / ell;
  Vec2 d = normalized(seed.dir);
  double ang = std::atan2(d.y, d.x);
  while (ang < 0) ang += kPi;
  while (ang >= kPi) ang -= kPi;
  cyl.direction = ang;
  cyl.seed_triangle = seed.tri;
  cyl.seed_chart_pos = seed.pos;
  cyl.seed_chart_dir = seed.dir;
  return cyl;
}

}  // namespace

SurfacePoint cylinder_point_at_offset(const Triangulation& tri,
                                      const FlatCylinder& cyl, double offset) {
  RayDescriptor seed{cyl.seed_triangle, cyl.seed_chart_pos, cyl.seed_chart_dir};
  auto ray = offset_ray(tri, seed, offset);
  if (!ray)
    fail(ErrorCode::NoPathFound, "perpendicular walk hit a singularity");
  const auto& T = tri.triangles[ray->tri];
  return canonicalize(*tri.surface, T.source_polygon, T.to_polygon(ray->pos));
}

double distance_to_singularities(const Triangulation& tri,
                                 const SurfacePoint& p) {
  auto [t, q] = locate(tri, p);
  const auto& T = tri.triangles[t];
  for (int k = 0; k < 3; ++k) {
    if (tri.vertices[T.vertex[k]].singular &&
        (q - T.corner[k]).norm() <= 1e-12)
      return 0.0;
  }
  double R = 0.25 * std::sqrt(surface_area(tri));
  for (int iter = 0; iter < 16; ++iter) {
    double best = kInf;
    for (const auto& h : segments_from_point(tri, p, R).hits)
      if (tri.vertices[h.vertex].singular) best = std::min(best, h.length);
    if (best <= R) return best;
    R *= 2.0;
  }
  fail(ErrorCode::SearchBudgetExceeded, "singularity distance did not settle");
}

bool cylinder_contains(const Triangulation& tri, const FlatCylinder& cyl,
                       const SurfacePoint& p, double margin) {
  auto [t, q] = locate(tri, p);
  for (const auto& [ct, M] : cyl.crossings) {
    if (ct != t) continue;
    double perp = cyl.plane_dir.cross(M(q) - cyl.plane_origin);
    if (perp < cyl.above - margin && perp > -(cyl.below - margin)) return true;
  }
  return false;
}

std::vector<FlatCylinder> detect_cylinders(const Triangulation& tri,
                                           double core_bound,
                                           double min_modulus) {
  std::vector<FlatCylinder> found;
  std::vector<Vec2> dirs;
  for (const auto& sc : enumerate_saddle_connections(tri, core_bound)) {
    Vec2 d = normalized(sc.holonomy);
    if (d.y < 0 || (d.y == 0 && d.x < 0)) d = -d;
    bool fresh = true;
    for (const auto& e : dirs)
      if ((d - e).norm() < 1e-9) fresh = false;
    if (fresh) dirs.push_back(d);
  }
  if (!tri.surface) fail(ErrorCode::BadParams, "triangulation has no surface");
  const FlatSurface& surface = *tri.surface;

  for (const Vec2& d : dirs) {
    for (int t = 0; t < static_cast<int>(tri.triangles.size()); ++t) {
      const auto& T = tri.triangles[t];
      if (!T.alive) continue;
      Vec2 cen = T.centroid();
      std::vector<Vec2> seeds = {cen};
      for (int e = 0; e < 3; ++e) {
        for (double f : {0.17, 0.34, 0.5, 0.66, 0.83}) {
          Vec2 m = T.corner[e] + (T.corner[(e + 1) % 3] - T.corner[e]) * f;
          seeds.push_back(m + (cen - m) * 0.04);
        }
      }
      for (const Vec2& s : seeds) {
        SurfacePoint sp =
            canonicalize(surface, T.source_polygon, T.to_polygon(s));
        bool covered = false;
        for (const auto& cyl : found) {
          Vec2 cd{std::cos(cyl.direction), std::sin(cyl.direction)};
          if (std::fabs(cd.cross(d)) > 1e-7) continue;
          if (cylinder_contains(tri, cyl, sp)) {
            covered = true;
            break;
          }
        }
        if (covered) continue;
        ClosureResult c =
            trace_closure(tri, t, s, d, core_bound * (1.0 + 1e-6));
        if (!c.closed) continue;
        auto cyl = build_cylinder(tri, {t, s, d}, c.length);
        if (!cyl) continue;
        found.push_back(std::move(*cyl));
      }
    }
  }
  std::vector<FlatCylinder> out;
  for (auto& cyl : found)
    if (cyl.modulus >= min_modulus - 1e-9) out.push_back(std::move(cyl));
  std::sort(out.begin(), out.end(),
            [](const FlatCylinder& a, const FlatCylinder& b) {
              return a.core_length < b.core_length;
            });
  return out;
}

std::vector<FlatCylinder> find_cylinders(const Triangulation& tri,
                                         double min_modulus) {
  if (min_modulus < 0) fail(ErrorCode::BadParams, "min_modulus must be >= 0");
  double bound = std::sqrt(surface_area(tri) / std::max(min_modulus, 0.1));
  return detect_cylinders(tri, bound, min_modulus);
}

std::vector<FlatCylinder> find_cylinders(const FlatSurface& surface,
                                         double min_modulus) {
  Triangulation tri = delaunay(surface);
  return find_cylinders(tri, min_modulus);
}

// ---------------------------------------------------------------------------
// Systole
// ---------------------------------------------------------------------------

SystoleResult systole(const Triangulation& tri) {
  double R = 0.5 * std::sqrt(surface_area(tri));
  for (int iter = 0; iter < 14; ++iter) {
    auto scs = enumerate_saddle_connections(tri, R);
    double min_sc = kInf, min_loop = kInf, min_double = kInf;
    const SaddleConnection* loop_sc = nullptr;
    const SaddleConnection* double_sc = nullptr;
    const auto& sings = tri.surface->singularities;
    for (const auto& sc : scs) {
      min_sc = std::min(min_sc, sc.length);
      if (sc.start == sc.end &&
          sings[sc.start].cone_angle >= 2.0 * kPi - 1e-9) {
        if (sc.length < min_loop) {
          min_loop = sc.length;
          loop_sc = &sc;
        }
      }
      if (sc.start != sc.end && sings[sc.start].cone_angle < 2.0 * kPi - 1e-9 &&
          sings[sc.end].cone_angle < 2.0 * kPi - 1e-9) {
        if (2.0 * sc.length < min_double) {
          min_double = 2.0 * sc.length;
          double_sc = &sc;
        }
      }
    }
    auto cyls = detect_cylinders(tri, R, 0.0);
    double min_core = kInf;
    const FlatCylinder* core_cyl = nullptr;
    for (const auto& cyl : cyls) {
      if (cyl.core_length < min_core) {
        min_core = cyl.core_length;
        core_cyl = &cyl;
      }
    }
    double best = std::min({min_loop, min_double, min_core});
    double lower_singular = std::isinf(min_sc)
                                ? R
                                : std::min(min_loop, 2.0 * min_sc);
    double lower_cyl = std::isinf(min_core) ? R : min_core;
    double lower = std::min(lower_singular, lower_cyl);
    if (std::isfinite(best) && best <= lower + 1e-9 * std::max(1.0, best)) {
      SystoleResult res;
      res.length = best;
      if (best == min_core && core_cyl) {
        res.witness.is_cylinder_core = true;
        res.witness.length = best;
        res.witness.core_triangle = core_cyl->seed_triangle;
        res.witness.core_chart_pos = core_cyl->seed_chart_pos;
        res.witness.core_chart_dir = core_cyl->seed_chart_dir;
      } else if (best == min_loop && loop_sc) {
        res.witness.segments = {*loop_sc};
        res.witness.length = best;
      } else if (double_sc) {
        SaddleConnection back = *double_sc;
        std::swap(back.start, back.end);
        back.holonomy = -back.holonomy;
        res.witness.segments = {*double_sc, back};
        res.witness.length = best;
      }
      return res;
    }
    R *= 2.0;
  }
  fail(ErrorCode::SearchBudgetExceeded, "systole search did not certify");
}

SystoleResult systole(const FlatSurface& surface) {
  Triangulation tri = delaunay(surface);
  return systole(tri);
}

// ---------------------------------------------------------------------------
// Expanding annuli
// ---------------------------------------------------------------------------

namespace {

struct FanCorner {
  int tri = -1;
  int corner = -1;
  double angle = 0.0;
};

std::vector<FanCorner> vertex_fan(const Triangulation& tri, int v) {
  int t0 = -1, k0 = -1;
  for (int t = 0; t < static_cast<int>(tri.triangles.size()) && t0 < 0; ++t) {
    if (!tri.triangles[t].alive) continue;
    for (int k = 0; k < 3; ++k)
      if (tri.triangles[t].vertex[k] == v) {
        t0 = t;
        k0 = k;
        break;
      }
  }
  if (t0 < 0) fail(ErrorCode::BadParams, "vertex not found in triangulation");
  std::vector<FanCorner> fan;
  int t = t0, k = k0;
  for (int guard = 0; guard < 100000; ++guard) {
    const auto& T = tri.triangles[t];
    Vec2 a = T.corner[(k + 1) % 3] - T.corner[k];
    Vec2 b = T.corner[(k + 2) % 3] - T.corner[k];
    double ang = std::atan2(a.cross(b), a.dot(b));
    if (ang < 0) ang += 2.0 * kPi;
    fan.push_back({t, k, ang});
    int cross_edge = (k + 2) % 3;  // edge from corner k+2 back to corner k
    int u = T.neighbor[cross_edge];
    int m = T.neighbor_side[cross_edge];
    t = u;
    k = (m + 1) % 3;
    if (t == t0 && k == k0) return fan;
  }
  fail(ErrorCode::SearchBudgetExceeded, "vertex fan walk did not close");
}

/// Shoots a geodesic of length r from the vertex in fan direction theta.
std::optional<SurfacePoint> shoot_from_vertex(
    const Triangulation& tri, const std::vector<FanCorner>& fan, double theta,
    double r) {
  double cum = 0.0;
  for (const auto& fc : fan) {
    if (theta <= cum + fc.angle) {
      const auto& T = tri.triangles[fc.tri];
      double local = theta - cum;
      Vec2 dir =
          rotate_ccw(normalized(T.corner[(fc.corner + 1) % 3] - T.corner[fc.corner]),
                     local);
      double delta = 1e-9 * std::max(1.0, r);
      Vec2 start = T.corner[fc.corner] + dir * delta;
      RayWalker w(tri, fc.tri, start, dir);
      double dist = r - delta;
      for (int steps = 0; steps < 100000; ++steps) {
        if (w.exit_param() >= dist) {
          Vec2 chart = w.dev().inverse()(w.origin() + w.direction() * dist);
          const auto& C = tri.triangles[w.triangle()];
          return canonicalize(*tri.surface, C.source_polygon,
                              C.to_polygon(chart));
        }
        if (!w.step()) return std::nullopt;
      }
      return std::nullopt;
    }
    cum += fc.angle;
  }
  return std::nullopt;
}

struct WavefrontSample {
  bool alive = false;
  SurfacePoint point;
};

std::vector<WavefrontSample> sample_wavefront(const Triangulation& tri,
                                              const std::vector<FanCorner>& fan,
                                              int vertex, double total_angle,
                                              double r, int samples) {
  std::vector<WavefrontSample> out(samples);
  for (int j = 0; j < samples; ++j) {
    double theta = (j + 0.5) * total_angle / samples;
    auto x = shoot_from_vertex(tri, fan, theta, r);
    if (!x) continue;
    PointSearch ps = segments_from_point(tri, *x, r * (1.0 + 1e-3));
    double dmin = kInf;
    for (const auto& h : ps.hits)
      if (h.vertex == vertex) dmin = std::min(dmin, h.length);
    if (dmin >= r - std::max(1e-9, 1e-6 * r)) {
      out[j].alive = true;
      out[j].point = *x;
    }
  }
  return out;
}

struct WavefrontComponent {
  std::vector<int> samples;
  double length = 0.0;
};

std::vector<WavefrontComponent> cluster_wavefront(
    const FlatSurface& surface, const std::vector<WavefrontSample>& samples,
    double r, double dtheta) {
  int n = static_cast<int>(samples.size());
  std::vector<int> parent(n);
  for (int i = 0; i < n; ++i) parent[i] = i;
  std::function<int(int)> find = [&](int i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  double thr = std::max(6.0 * r * dtheta, 1e-9);
  for (int i = 0; i < n; ++i) {
    if (!samples[i].alive) continue;
    for (int j = i + 1; j < n; ++j) {
      if (!samples[j].alive) continue;
      if (chart_distance(surface, samples[i].point, samples[j].point) < thr)
        parent[find(i)] = find(j);
    }
  }
  std::map<int, WavefrontComponent> comps;
  for (int i = 0; i < n; ++i) {
    if (!samples[i].alive) continue;
    comps[find(i)].samples.push_back(i);
  }
  std::vector<WavefrontComponent> out;
  for (auto& [root, comp] : comps) {
    comp.length = r * dtheta * static_cast<double>(comp.samples.size());
    out.push_back(std::move(comp));
  }
  return out;
}

double overlap_count(const WavefrontComponent& a, const WavefrontComponent& b) {
  std::size_t i = 0, j = 0, common = 0;
  while (i < a.samples.size() && j < b.samples.size()) {
    if (a.samples[i] < b.samples[j])
      ++i;
    else if (a.samples[i] > b.samples[j])
      ++j;
    else {
      ++common;
      ++i;
      ++j;
    }
  }
  return static_cast<double>(common);
}

}  // namespace

ExpandingAnnulus expanding_annulus(const Triangulation& tri,
                                   int singularity_id) {
  if (!tri.surface) fail(ErrorCode::BadParams, "triangulation has no surface");
  const FlatSurface& surface = *tri.surface;
  if (singularity_id < 0 ||
      singularity_id >= static_cast<int>(surface.singularities.size()))
    fail(ErrorCode::BadParams, "no such singularity");
  const Singularity& sing = surface.singularities[singularity_id];
  if (!sing.is_cone_point() && !sing.marked)
    fail(ErrorCode::DegenerateCore, "core must be a singular or marked point");

  int v = -1;
  for (int i = 0; i < static_cast<int>(tri.vertices.size()); ++i)
    if (tri.vertices[i].surface_class == singularity_id) v = i;
  if (v < 0) fail(ErrorCode::BadParams, "singularity not a mesh vertex");

  // Wavefront topology events: distances to other singularities and half
  // lengths of geodesic loops back to the core.
  double r_max = std::sqrt(surface_area(tri));
  std::vector<double> events;
  for (const auto& h : segments_from_vertex(tri, v, 2.0 * r_max)) {
    if (!tri.vertices[h.vertex].singular) continue;
    double e = h.vertex == v ? h.length / 2 : h.length;
    if (e < r_max) events.push_back(e);
  }
  std::sort(events.begin(), events.end());
  events.erase(std::unique(events.begin(), events.end(),
                           [](double a, double b) {
                             return std::fabs(a - b) <= 1e-9 * std::max(1.0, a);
                           }),
               events.end());
  if (events.empty())
    fail(ErrorCode::SearchBudgetExceeded, "no wavefront events found");

  ExpandingAnnulus out;
  out.core_singularity = singularity_id;
  if (!sing.is_cone_point()) {
    // Puncture convention: the initial annulus, mu = infinity.
    double w = events.front();
    out.inner_radius = 0.0;
    out.outer_radius = w;
    out.inner_length = 0.0;
    out.outer_length = sing.cone_angle * w;
    out.width = w;
    out.mu.infinite = true;
    return out;
  }

  auto fan = vertex_fan(tri, v);
  double total_angle = 0.0;
  for (const auto& fc : fan) total_angle += fc.angle;
  const int M = 1440;
  double dtheta = total_angle / M;
  events.push_back(r_max);

  bool have = false;
  double best_mu = -kInf;
  for (std::size_t i = 0; i + 1 < events.size(); ++i) {
    double r_a = events[i], r_b = events[i + 1];
    if (r_b - r_a <= 1e-6 * std::max(1.0, r_b)) continue;
    double r_lo = r_a + 0.03 * (r_b - r_a);
    double r_hi = r_b - 0.03 * (r_b - r_a);
    auto lo_samples = sample_wavefront(tri, fan, v, total_angle, r_lo, M);
    auto hi_samples = sample_wavefront(tri, fan, v, total_angle, r_hi, M);
    auto lo_comps = cluster_wavefront(surface, lo_samples, r_lo, dtheta);
    auto hi_comps = cluster_wavefront(surface, hi_samples, r_hi, dtheta);
    for (const auto& lc : lo_comps) {
      const WavefrontComponent* match = nullptr;
      double best_overlap = 0.0;
      for (const auto& hc : hi_comps) {
        double ov = overlap_count(lc, hc);
        if (ov > best_overlap) {
          best_overlap = ov;
          match = &hc;
        }
      }
      if (!match || lc.length <= 0 || match->length <= 0) continue;
      double mu = std::log(match->length / lc.length);
      if (mu > best_mu) {
        best_mu = mu;
        have = true;
        out.inner_radius = r_a;
        out.outer_radius = r_b;
        out.inner_length = lc.length;
        out.outer_length = match->length;
        out.width = r_b - r_a;
        out.mu = {false, std::max(mu, 0.0)};
      }
    }
  }
  if (!have)
    fail(ErrorCode::DegenerateCore, "no expanding annulus found at this core");
  return out;
}

ExpandingAnnulus expanding_annulus(const Triangulation& tri,
                                   const GeodesicLoop& core, int side) {
  if (!core.is_cylinder_core || core.core_triangle < 0)
    fail(ErrorCode::DegenerateCore,
         "loop core must be a cylinder core circle");
  ClosureResult c =
      trace_closure(tri, core.core_triangle, core.core_chart_pos,
                    core.core_chart_dir, core.length * (1.0 + 1e-6) + 1e-9);
  if (!c.closed || std::fabs(c.length - core.length) >
                       1e-6 * std::max(1.0, core.length))
    fail(ErrorCode::DegenerateCore, "core loop is not a closed geodesic");
  auto cyl = build_cylinder(
      tri, {core.core_triangle, core.core_chart_pos, core.core_chart_dir},
      c.length);
  if (!cyl) fail(ErrorCode::DegenerateCore, "core loop touches a singularity");
  ExpandingAnnulus out;
  out.core_loop = core;
  out.side = side;
  out.inner_length = core.length;
  out.outer_length = core.length;
  out.width = side >= 0 ? cyl->above : cyl->below;
  out.mu = {false, 0.0};
  return out;
}

}  // namespace hourglass
