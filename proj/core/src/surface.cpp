#include "hourglass/surface.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <sstream>

namespace hourglass {

namespace {
constexpr double kPi = std::numbers::pi;

bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  auto orient = [](const Vec2& p, const Vec2& q, const Vec2& r) {
    double v = (q - p).cross(r - p);
    if (v > 1e-14) return 1;
    if (v < -1e-14) return -1;
    return 0;
  };
  int o1 = orient(a, b, c), o2 = orient(a, b, d);
  int o3 = orient(c, d, a), o4 = orient(c, d, b);
  return o1 != o2 && o3 != o4;
}
}  // namespace

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::EdgeLengthMismatch: return "EdgeLengthMismatch";
    case ErrorCode::UnmatchedEdge: return "UnmatchedEdge";
    case ErrorCode::NonSimplePolygon: return "NonSimplePolygon";
    case ErrorCode::OrientationError: return "OrientationError";
    case ErrorCode::BadParams: return "BadParams";
    case ErrorCode::GlobalSquare: return "GlobalSquare";
    case ErrorCode::FlipLimitExceeded: return "FlipLimitExceeded";
    case ErrorCode::BoundTooLarge: return "BoundTooLarge";
    case ErrorCode::SearchBudgetExceeded: return "SearchBudgetExceeded";
    case ErrorCode::DegenerateCore: return "DegenerateCore";
    case ErrorCode::DisjointnessViolated: return "DisjointnessViolated";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::SolverFailure: return "SolverFailure";
    case ErrorCode::InvolutionMismatch: return "InvolutionMismatch";
    case ErrorCode::QuadratureUnstable: return "QuadratureUnstable";
    case ErrorCode::GramIllConditioned: return "GramIllConditioned";
    case ErrorCode::IllConditionedFit: return "IllConditionedFit";
    case ErrorCode::FloorViolated: return "FloorViolated";
    case ErrorCode::PartitionInvalid: return "PartitionInvalid";
    case ErrorCode::DiskNotEmbedded: return "DiskNotEmbedded";
    case ErrorCode::NoPathFound: return "NoPathFound";
    case ErrorCode::OrthogonalizationFailed: return "OrthogonalizationFailed";
    case ErrorCode::FormatError: return "FormatError";
  }
  return "UnknownError";
}

std::optional<Rational> Rational::parse(const std::string& text) {
  if (text.empty()) return std::nullopt;
  auto slash = text.find('/');
  try {
    if (slash != std::string::npos) {
      std::int64_t n = std::stoll(text.substr(0, slash));
      std::int64_t d = std::stoll(text.substr(slash + 1));
      return Rational(n, d);
    }
    auto dot = text.find('.');
    if (dot == std::string::npos) {
      return Rational(std::stoll(text));
    }
    std::string head = text.substr(0, dot);
    std::string frac = text.substr(dot + 1);
    if (frac.size() > 17) return std::nullopt;
    bool neg = !head.empty() && head[0] == '-';
    std::int64_t whole = head.empty() || head == "-" ? 0 : std::stoll(head);
    std::int64_t den = 1;
    for (size_t i = 0; i < frac.size(); ++i) den *= 10;
    std::int64_t num = frac.empty() ? 0 : std::stoll(frac);
    Rational r = Rational(whole < 0 ? -whole : whole) + Rational(num, den);
    return neg || (whole < 0) ? -r : r;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

double Polygon::area() const {
  double a = 0.0;
  int n = size();
  for (int i = 0; i < n; ++i) a += vertices[i].cross(vertices[(i + 1) % n]);
  return 0.5 * a;
}

double Polygon::interior_angle(int v) const {
  int n = size();
  Vec2 to_prev = vertices[(v + n - 1) % n] - vertices[v];
  Vec2 to_next = vertices[(v + 1) % n] - vertices[v];
  double ang = std::atan2(to_next.cross(to_prev), to_next.dot(to_prev));
  if (ang < 0) ang += 2.0 * kPi;
  if (ang == 0.0) ang = 2.0 * kPi;  // fully reflex corner
  return ang;
}

bool Polygon::is_counterclockwise() const { return area() > 0.0; }

bool Polygon::is_simple() const {
  int n = size();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
      if (segments_intersect(vertices[i], vertices[(i + 1) % n],
                             vertices[j], vertices[(j + 1) % n]))
        return false;
    }
  }
  return true;
}

namespace {

struct GluingTable {
  // For each edge, the partner edge and gluing kind.
  std::map<EdgeRef, std::pair<EdgeRef, GluingKind>> partner;
};

GluingTable validate_gluings(const SurfaceSpec& spec) {
  GluingTable table;
  for (const auto& g : spec.gluings) {
    for (const EdgeRef& e : {g.a, g.b}) {
      if (e.polygon < 0 || e.polygon >= static_cast<int>(spec.polygons.size()))
        fail(ErrorCode::UnmatchedEdge, "gluing references nonexistent polygon");
      if (e.edge < 0 || e.edge >= spec.polygons[e.polygon].size())
        fail(ErrorCode::UnmatchedEdge, "gluing references nonexistent edge");
      if (table.partner.count(e))
        fail(ErrorCode::UnmatchedEdge, "edge appears in more than one gluing");
    }
    if (g.a == g.b)
      fail(ErrorCode::UnmatchedEdge, "edge glued to itself; split it first");
    table.partner[g.a] = {g.b, g.kind};
    table.partner[g.b] = {g.a, g.kind};

    Vec2 ea = spec.polygons[g.a.polygon].edge_vector(g.a.edge);
    Vec2 eb = spec.polygons[g.b.polygon].edge_vector(g.b.edge);
    double tol = spec.tolerance * std::max(1.0, std::max(ea.norm(), eb.norm()));
    if (std::fabs(ea.norm() - eb.norm()) > tol)
      fail(ErrorCode::EdgeLengthMismatch, "glued edges have different lengths");
    Vec2 expect = g.kind == GluingKind::Translation ? -ea : ea;
    if ((eb - expect).norm() > tol)
      fail(ErrorCode::OrientationError,
           "gluing does not reverse boundary orientation");
  }
  // Every edge must be matched.
  for (int p = 0; p < static_cast<int>(spec.polygons.size()); ++p) {
    for (int e = 0; e < spec.polygons[p].size(); ++e) {
      if (!table.partner.count({p, e}))
        fail(ErrorCode::UnmatchedEdge, "edge (" + std::to_string(p) + "," +
                                           std::to_string(e) + ") is unglued");
    }
  }
  return table;
}

}  // namespace

FlatSurface build_surface(const SurfaceSpec& spec) {
  if (spec.polygons.empty())
    fail(ErrorCode::BadParams, "surface spec has no polygons");
  for (const auto& poly : spec.polygons) {
    if (poly.size() < 3)
      fail(ErrorCode::NonSimplePolygon, "polygon has fewer than 3 vertices");
    if (!poly.is_counterclockwise())
      fail(ErrorCode::NonSimplePolygon, "polygon is not counterclockwise");
    if (!poly.is_simple())
      fail(ErrorCode::NonSimplePolygon, "polygon is self-intersecting");
  }
  GluingTable table = validate_gluings(spec);

  FlatSurface out;
  out.polygons = spec.polygons;
  out.gluings = spec.gluings;
  out.name = spec.name;
  out.tolerance = spec.tolerance;

  // Walk corner identifications to build vertex classes. From corner (p, v),
  // cross the outgoing edge v; the gluing carries the start of edge v to the
  // end of the partner edge.
  std::set<CornerRef> seen;
  for (int p = 0; p < static_cast<int>(out.polygons.size()); ++p) {
    for (int v = 0; v < out.polygons[p].size(); ++v) {
      CornerRef start{p, v};
      if (seen.count(start)) continue;
      Singularity cls;
      CornerRef cur = start;
      do {
        seen.insert(cur);
        cls.vertex_class.push_back(cur);
        cls.cone_angle += out.polygons[cur.polygon].interior_angle(cur.vertex);
        auto [partner, kind] = table.partner.at({cur.polygon, cur.vertex});
        int n = out.polygons[partner.polygon].size();
        cur = CornerRef{partner.polygon, (partner.edge + 1) % n};
      } while (!(cur == start));
      int id = static_cast<int>(out.singularities.size());
      for (const auto& c : cls.vertex_class) out.corner_class[c] = id;
      double k = cls.cone_angle / kPi - 2.0;
      cls.order = static_cast<int>(std::llround(k));
      if (std::fabs(k - cls.order) > 1e-6)
        fail(ErrorCode::BadParams, "cone angle is not a multiple of pi");
      out.singularities.push_back(std::move(cls));
    }
  }
  for (const auto& c : spec.marked_corners) {
    auto it = out.corner_class.find(c);
    if (it == out.corner_class.end())
      fail(ErrorCode::BadParams, "marked corner does not exist");
    out.singularities[it->second].marked = true;
  }
  for (const auto& s : out.singularities)
    if (s.marked) ++out.num_marked;

  // Euler characteristic.
  int total_edges = 0;
  for (const auto& poly : out.polygons) total_edges += poly.size();
  int V = static_cast<int>(out.singularities.size());
  int E = total_edges / 2;
  int F = static_cast<int>(out.polygons.size());
  int chi = V - E + F;
  if (chi % 2 != 0) fail(ErrorCode::BadParams, "odd Euler characteristic");
  out.genus = (2 - chi) / 2;
  if (out.genus < 0) fail(ErrorCode::BadParams, "negative genus");

  for (const auto& poly : out.polygons) out.area += poly.area();

  // Translation-only holonomy iff polygons are 2-colorable with Translation
  // gluings joining like colors and HalfTurn gluings joining unlike colors.
  {
    std::vector<int> color(out.polygons.size(), -1);
    out.is_square = true;
    for (size_t root = 0; root < out.polygons.size() && out.is_square; ++root) {
      if (color[root] != -1) continue;
      color[root] = 0;
      std::queue<int> queue;
      queue.push(static_cast<int>(root));
      while (!queue.empty() && out.is_square) {
        int p = queue.front();
        queue.pop();
        for (const auto& g : out.gluings) {
          if (g.a.polygon != p && g.b.polygon != p) continue;
          int q = g.a.polygon == p ? g.b.polygon : g.a.polygon;
          int want = g.kind == GluingKind::Translation ? color[p] : 1 - color[p];
          if (color[q] == -1) {
            color[q] = want;
            queue.push(q);
          } else if (color[q] != want) {
            out.is_square = false;
          }
        }
      }
    }
  }

  if (spec.normalize_area && out.area > 0.0) {
    double scale = 1.0 / std::sqrt(out.area);
    SurfaceSpec sspec = spec;
    sspec.normalize_area = false;
    for (auto& poly : sspec.polygons) {
      poly.exact.clear();
      for (auto& v : poly.vertices) v = v * scale;
    }
    return build_surface(sspec);
  }
  return out;
}

namespace {

SurfaceSpec torus_spec(double a, double b) {
  if (a <= 0 || b <= 0) fail(ErrorCode::BadParams, "torus sides must be positive");
  SurfaceSpec spec;
  Polygon poly;
  poly.vertices = {{0, 0}, {a, 0}, {a, b}, {0, b}};
  spec.polygons = {poly};
  spec.gluings = {{{0, 0}, {0, 2}, GluingKind::Translation},
                  {{0, 1}, {0, 3}, GluingKind::Translation}};
  spec.marked_corners = {{0, 0}};
  return spec;
}

}  // namespace

FlatSurface standard_surface(StandardFamily family, double a, double b,
                             bool normalize_area) {
  SurfaceSpec spec;
  switch (family) {
    case StandardFamily::SquareTorus:
      spec = torus_spec(a, a);
      spec.name = "square_torus";
      break;
    case StandardFamily::RectTorus:
      spec = torus_spec(a, b);
      spec.name = "rect_torus";
      break;
    case StandardFamily::RegularOctagon: {
      if (a <= 0) fail(ErrorCode::BadParams, "octagon side must be positive");
      double R = a / (2.0 * std::sin(kPi / 8.0));
      Polygon poly;
      for (int i = 0; i < 8; ++i) {
        double theta = kPi / 8.0 + 2.0 * kPi * i / 8.0;
        poly.vertices.push_back({R * std::cos(theta), R * std::sin(theta)});
      }
      spec.polygons = {poly};
      for (int i = 0; i < 4; ++i)
        spec.gluings.push_back({{0, i}, {0, i + 4}, GluingKind::Translation});
      spec.name = "regular_octagon";
      break;
    }
    case StandardFamily::Pillowcase: {
      if (a <= 0 || b <= 0)
        fail(ErrorCode::BadParams, "pillowcase sides must be positive");
      Polygon p1, p2;
      p1.vertices = {{0, 0}, {a, 0}, {a, b}, {0, b}};
      p2.vertices = {{0, b}, {a, b}, {a, 2 * b}, {0, 2 * b}};
      spec.polygons = {p1, p2};
      spec.gluings = {
          {{0, 2}, {1, 0}, GluingKind::Translation},  // shared horizontal seam
          {{0, 0}, {1, 2}, GluingKind::Translation},  // outer horizontal seam
          {{0, 3}, {1, 3}, GluingKind::HalfTurn},     // left fold
          {{0, 1}, {1, 1}, GluingKind::HalfTurn},     // right fold
      };
      spec.name = "pillowcase";
      break;
    }
  }
  spec.normalize_area = normalize_area;
  return build_surface(spec);
}

FlatSurface genus2_example(double S, double s, double L) {
  if (S <= 0 || s <= 0 || L <= 0)
    fail(ErrorCode::BadParams, "genus2_example parameters must be positive");
  double slit = 2.0 * kPi * s;
  if (slit >= S) fail(ErrorCode::BadParams, "slit does not fit in the torus");
  if (s / S >= 0.25) fail(ErrorCode::BadParams, "s/S must be below 1/4");
  if (s / L >= 0.25) fail(ErrorCode::BadParams, "s/L must be below 1/4");

  double a = 0.5 * (S - slit);  // slit centered on the bottom edge
  Polygon torus;
  torus.vertices = {{0, 0},    {a, 0},        {a + slit, 0}, {S, 0},
                    {S, S},    {a + slit, S}, {a, S},        {0, S}};
  Polygon cyl;
  cyl.vertices = {{0, 0}, {slit, 0}, {slit, 2 * L}, {0, 2 * L}};

  SurfaceSpec spec;
  spec.polygons = {torus, cyl};
  spec.gluings = {
      {{0, 7}, {0, 3}, GluingKind::Translation},  // torus left-right
      {{0, 0}, {0, 6}, GluingKind::Translation},  // bottom/top left of slit
      {{0, 2}, {0, 4}, GluingKind::Translation},  // bottom/top right of slit
      {{0, 1}, {1, 2}, GluingKind::Translation},  // upper slit bank - cyl top
      {{0, 5}, {1, 0}, GluingKind::Translation},  // lower slit bank - cyl bottom
      {{1, 3}, {1, 1}, GluingKind::Translation},  // cylinder seam
  };
  spec.name = "genus2_slit_torus";
  return build_surface(spec);
}

namespace {

SurfaceSpec spec_from_surface(const FlatSurface& surface) {
  SurfaceSpec spec;
  spec.polygons = surface.polygons;
  spec.gluings = surface.gluings;
  spec.name = surface.name;
  spec.tolerance = surface.tolerance;
  for (const auto& sing : surface.singularities)
    if (sing.marked)
      spec.marked_corners.push_back(sing.vertex_class.front());
  return spec;
}

}  // namespace

FlatSurface apply_flow(const FlatSurface& surface, double t) {
  SurfaceSpec spec = spec_from_surface(surface);
  double ex = std::exp(t), ey = std::exp(-t);
  for (auto& poly : spec.polygons) {
    poly.exact.clear();
    for (auto& v : poly.vertices) v = {v.x * ex, v.y * ey};
  }
  FlatSurface out = build_surface(spec);
  out.involution_polygon = surface.involution_polygon;
  return out;
}

FlatSurface orienting_double_cover(const FlatSurface& surface) {
  if (surface.is_square)
    fail(ErrorCode::GlobalSquare,
         "surface is already a translation surface; cover disconnects");
  int n = static_cast<int>(surface.polygons.size());
  SurfaceSpec spec;
  spec.name = surface.name + "_double_cover";
  spec.tolerance = surface.tolerance;
  spec.polygons.resize(2 * n);
  for (int j = 0; j < n; ++j) {
    spec.polygons[j] = surface.polygons[j];
    spec.polygons[j].exact.clear();
    Polygon rotated = surface.polygons[j];
    rotated.exact.clear();
    for (auto& v : rotated.vertices) v = -v;
    spec.polygons[n + j] = rotated;
  }
  for (const auto& g : surface.gluings) {
    EdgeRef a = g.a, b = g.b;
    EdgeRef a2{a.polygon + n, a.edge}, b2{b.polygon + n, b.edge};
    if (g.kind == GluingKind::Translation) {
      spec.gluings.push_back({a, b, GluingKind::Translation});
      spec.gluings.push_back({a2, b2, GluingKind::Translation});
    } else {
      spec.gluings.push_back({a, b2, GluingKind::Translation});
      spec.gluings.push_back({a2, b, GluingKind::Translation});
    }
  }
  for (const auto& sing : surface.singularities) {
    if (!sing.marked) continue;
    CornerRef c = sing.vertex_class.front();
    spec.marked_corners.push_back(c);
    spec.marked_corners.push_back({c.polygon + n, c.vertex});
  }
  FlatSurface cover = build_surface(spec);
  if (!cover.is_square)
    fail(ErrorCode::BadParams, "double cover failed to trivialize holonomy");
  cover.involution_polygon.resize(2 * n);
  for (int j = 0; j < n; ++j) {
    cover.involution_polygon[j] = n + j;
    cover.involution_polygon[n + j] = j;
  }
  return cover;
}

std::vector<int> FlatSurface::singular_set() const {
  std::vector<int> out;
  for (int i = 0; i < static_cast<int>(singularities.size()); ++i) {
    const auto& s = singularities[i];
    if (s.is_cone_point() || s.marked) out.push_back(i);
  }
  return out;
}

double FlatSurface::gauss_bonnet_defect() const {
  double sum = 0.0;
  for (const auto& s : singularities) sum += 2.0 * kPi - s.cone_angle;
  return sum - 2.0 * kPi * (2.0 - 2.0 * genus);
}

}  // namespace hourglass
