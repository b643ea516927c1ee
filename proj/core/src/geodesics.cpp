#include "hourglass/geodesics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <tuple>
#include <vector>

namespace hourglass {

namespace {

double ncross(const Vec2& a, const Vec2& b) {
  double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return a.cross(b) / (na * nb);
}

/// Removes hits whose segment passes exactly through a closer hit vertex:
/// vertices are obstacles, so a collinear longer hit is not a segment.
void drop_shadowed_hits(std::vector<RayHit>& hits) {
  std::sort(hits.begin(), hits.end(),
            [](const RayHit& a, const RayHit& b) { return a.length < b.length; });
  std::vector<RayHit> keep;
  for (const auto& h : hits) {
    bool shadowed = false;
    for (const auto& k : keep) {
      if (k.length >= h.length - 1e-12) break;
      if (std::fabs(k.vec.cross(h.vec)) <= 1e-9 * k.length * h.length &&
          k.vec.dot(h.vec) > 0) {
        shadowed = true;
        break;
      }
    }
    if (!shadowed) keep.push_back(h);
  }
  hits = std::move(keep);
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  Vec2 ab = b - a;
  double t = ab.squared_norm() > 0 ? (p - a).dot(ab) / ab.squared_norm() : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (p - (a + ab * t)).norm();
}

/// Search cone [lo, hi) of angle < pi, counterclockwise.
struct WedgeState {
  int tri = -1;
  int entry = -1;  // edge the cone enters the triangle through
  ChartMap dev;    // triangle chart -> search plane
  Vec2 lo, hi;
};

constexpr double kConeEps = 1e-12;
constexpr double kHitEps = 1e-9;

struct WedgeSearch {
  const Triangulation& tri;
  double radius;
  long budget;
  std::vector<WedgeState> stack;
  // Optional source-copy detection (loops through an interior point).
  bool track_source = false;
  int source_tri = -1;
  Vec2 source_pos;

  std::map<std::tuple<int, std::int64_t, std::int64_t>, RayHit> hits;
  std::vector<Vec2> loop_vecs;

  explicit WedgeSearch(const Triangulation& t, double r, long b)
      : tri(t), radius(r), budget(b) {}

  void record_hit(int vertex, const Vec2& vec) {
    double len = vec.norm();
    if (len <= kHitEps || len > radius * (1.0 + 1e-9)) return;
    double quant = 1e-7 * std::max(1.0, radius);
    std::tuple<int, std::int64_t, std::int64_t> key{
        vertex, std::llround(vec.x / quant), std::llround(vec.y / quant)};
    auto it = hits.find(key);
    if (it == hits.end()) hits[key] = RayHit{vertex, vec, len};
  }

  void push(const WedgeState& s) {
    if (ncross(s.lo, s.hi) <= kConeEps) return;
    const auto& T = tri.triangles[s.tri];
    Vec2 a = s.dev(T.corner[s.entry]);
    Vec2 b = s.dev(T.corner[(s.entry + 1) % 3]);
    if (point_segment_distance({0, 0}, a, b) > radius) return;
    stack.push_back(s);
  }

  void run() {
    while (!stack.empty()) {
      if (--budget < 0)
        fail(ErrorCode::SearchBudgetExceeded, "geodesic wedge search budget");
      WedgeState s = stack.back();
      stack.pop_back();
      const auto& T = tri.triangles[s.tri];
      int e = s.entry, e1 = (e + 1) % 3, e2 = (e + 2) % 3;
      Vec2 A = s.dev(T.corner[e]);
      Vec2 B = s.dev(T.corner[e1]);
      Vec2 C = s.dev(T.corner[e2]);
      // Apex hit: vertex visible inside (or on the boundary of) the cone.
      if (ncross(s.lo, C) >= -kHitEps && ncross(C, s.hi) >= -kHitEps)
        record_hit(T.vertex[e2], C);
      if (track_source && s.tri == source_tri) {
        Vec2 c = s.dev(source_pos);
        double len = c.norm();
        if (len > kHitEps && len <= radius && ncross(s.lo, c) >= -kHitEps &&
            ncross(c, s.hi) >= -kHitEps)
          loop_vecs.push_back(c);
      }
      // Cross edge e1 (B -> C): visible sector [B, C].
      cross_edge(s, e1, B, C);
      // Cross edge e2 (C -> A): visible sector [C, A].
      cross_edge(s, e2, C, A);
    }
  }

  void cross_edge(const WedgeState& s, int edge, const Vec2& sec_lo,
                  const Vec2& sec_hi) {
    Vec2 lo = ncross(s.lo, sec_lo) > 0 ? sec_lo : s.lo;
    Vec2 hi = ncross(sec_hi, s.hi) > 0 ? sec_hi : s.hi;
    if (ncross(lo, hi) <= kConeEps) return;
    const auto& T = tri.triangles[s.tri];
    int u = T.neighbor[edge];
    WedgeState next;
    next.tri = u;
    next.entry = T.neighbor_side[edge];
    next.dev = s.dev.after(T.from_neighbor[edge]);
    next.lo = lo;
    next.hi = hi;
    push(next);
  }
};

}  // namespace

std::vector<RayHit> segments_from_vertex(const Triangulation& tri, int vertex,
                                         double radius, long budget) {
  WedgeSearch search(tri, radius, budget);
  for (int t = 0; t < static_cast<int>(tri.triangles.size()); ++t) {
    const auto& T = tri.triangles[t];
    if (!T.alive) continue;
    for (int k = 0; k < 3; ++k) {
      if (T.vertex[k] != vertex) continue;
      int k1 = (k + 1) % 3, k2 = (k + 2) % 3;
      Vec2 b = T.corner[k1] - T.corner[k];
      Vec2 c = T.corner[k2] - T.corner[k];
      // The two triangle edges at this corner are geodesic segments.
      search.record_hit(T.vertex[k1], b);
      search.record_hit(T.vertex[k2], c);
      // Open corner wedge propagates across the far edge (k1 -> k2).
      WedgeState seed;
      seed.tri = T.neighbor[k1];
      seed.entry = T.neighbor_side[k1];
      seed.dev = ChartMap{1.0, -T.corner[k]}.after(T.from_neighbor[k1]);
      seed.lo = b;
      seed.hi = c;
      search.push(seed);
    }
  }
  search.run();
  std::vector<RayHit> out;
  out.reserve(search.hits.size());
  for (auto& [key, hit] : search.hits) out.push_back(hit);
  drop_shadowed_hits(out);
  return out;
}

PointSearch segments_from_point(const Triangulation& tri, const SurfacePoint& p,
                                double radius, long budget) {
  auto [t0, q] = locate(tri, p);
  WedgeSearch search(tri, radius, budget);
  search.track_source = true;
  search.source_tri = t0;
  search.source_pos = q;
  const auto& T = tri.triangles[t0];
  ChartMap dev{1.0, -q};
  for (int k = 0; k < 3; ++k) {
    search.record_hit(T.vertex[k], dev(T.corner[k]));
    WedgeState seed;
    seed.tri = T.neighbor[k];
    seed.entry = T.neighbor_side[k];
    seed.dev = dev.after(T.from_neighbor[k]);
    seed.lo = dev(T.corner[k]);
    seed.hi = dev(T.corner[(k + 1) % 3]);
    if (ncross(seed.lo, seed.hi) <= kConeEps && seed.lo.dot(seed.hi) < 0) {
      // Source on the edge itself: the half-plane wedge (angle pi) does not
      // fit the cone representation; split it at the perpendicular.
      Vec2 mid = seed.lo.perp();
      WedgeState half = seed;
      half.hi = mid;
      search.push(half);
      seed.lo = mid;
    }
    search.push(seed);
  }
  search.run();
  PointSearch out;
  out.hits.reserve(search.hits.size());
  for (auto& [key, hit] : search.hits) out.hits.push_back(hit);
  drop_shadowed_hits(out.hits);
  for (const Vec2& c : search.loop_vecs) {
    bool shadowed = false;
    for (const auto& h : out.hits) {
      if (h.length >= c.norm() - 1e-12) break;
      if (std::fabs(h.vec.cross(c)) <= 1e-9 * h.length * c.norm() &&
          h.vec.dot(c) > 0) {
        shadowed = true;
        break;
      }
    }
    if (!shadowed) out.loops.push_back(c.norm());
  }
  std::sort(out.loops.begin(), out.loops.end());
  // Deduplicate loop lengths found through overlapping wedge boundaries.
  out.loops.erase(std::unique(out.loops.begin(), out.loops.end(),
                              [](double a, double b) {
                                return std::fabs(a - b) <=
                                       1e-7 * std::max(1.0, a);
                              }),
                  out.loops.end());
  return out;
}

RayWalker::RayWalker(const Triangulation& tri, int triangle,
                     const Vec2& chart_pos, const Vec2& chart_dir)
    : mesh_(&tri), tri_(triangle) {
  dev_ = ChartMap{};
  origin_ = chart_pos;
  double n = chart_dir.norm();
  if (n <= 0) fail(ErrorCode::BadParams, "ray direction must be nonzero");
  dir_ = chart_dir * (1.0 / n);
  compute_exit();
}

void RayWalker::compute_exit() {
  const auto& T = mesh_->triangles[tri_];
  double best = -1e300;
  bool found = false;
  double scale = std::max({T.edge_length(0), T.edge_length(1), T.edge_length(2)});
  for (int e = 0; e < 3; ++e) {
    Vec2 a = dev_(T.corner[e]);
    Vec2 b = dev_(T.corner[(e + 1) % 3]);
    Vec2 ab = b - a;
    double den = dir_.cross(ab);
    if (std::fabs(den) < 1e-14 * std::max(1.0, ab.norm())) continue;
    double t = (a - origin_).cross(ab) / den;
    double u = (a - origin_).cross(dir_) / den;
    if (u < -1e-9 || u > 1.0 + 1e-9) continue;
    if (t > best) {
      best = t;
      t_exit_ = t;
      exit_edge_candidate_ = e;
      found = true;
    }
  }
  if (!found || t_exit_ < t_cur_ - 1e-9 * std::max(1.0, scale)) {
    t_exit_ = t_cur_;
    exit_edge_candidate_ = -1;
  }
}

bool RayWalker::step() {
  if (exit_edge_candidate_ < 0 || t_exit_ <= t_cur_ + 1e-13) return false;
  const auto& T = mesh_->triangles[tri_];
  int e = exit_edge_candidate_;
  int u = T.neighbor[e];
  ChartMap next_dev = dev_.after(T.from_neighbor[e]);
  t_cur_ = t_exit_;
  entry_edge_ = T.neighbor_side[e];
  tri_ = u;
  dev_ = next_dev;
  compute_exit();
  return true;
}

Vec2 RayWalker::chart_position() const {
  return dev_.inverse()(origin_ + dir_ * t_cur_);
}

SurfacePoint RayWalker::surface_position() const {
  const auto& T = mesh_->triangles[tri_];
  if (!mesh_->surface) fail(ErrorCode::BadParams, "triangulation has no surface");
  return canonicalize(*mesh_->surface, T.source_polygon,
                      T.to_polygon(chart_position()));
}

ClosureResult trace_closure(const Triangulation& tri, int triangle,
                            const Vec2& chart_pos, const Vec2& chart_dir,
                            double max_length) {
  RayWalker walker(tri, triangle, chart_pos, chart_dir);
  const Vec2 d = walker.direction();
  const Vec2 p0 = walker.origin();
  for (int steps = 0; steps < 100000; ++steps) {
    if (walker.triangle() == triangle && walker.dev().sign > 0) {
      Vec2 c = walker.dev()(chart_pos) - p0;
      double tol = 1e-7 * std::max(1.0, c.norm());
      double s = d.dot(c);
      if (std::fabs(d.cross(c)) <= tol && s > 1e-9 && s <= max_length &&
          s >= walker.traveled() - tol && s <= walker.exit_param() + tol)
        return {true, s};
    }
    if (walker.traveled() > max_length) break;
    if (!walker.step()) break;
  }
  return {false, 0.0};
}

}  // namespace hourglass
