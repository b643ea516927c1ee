#include "hourglass/shells.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <vector>

namespace hourglass {

namespace {

constexpr double kTau = 2.0 * std::numbers::pi;

/// Polar quadrature of a shell [r_in, r_out]: composite Simpson radially,
/// exact trapezoid angularly. Accumulates sup, L1 and L2 of f.
struct ShellQuadrature {
  double sup = 0.0;
  double l1 = 0.0;
  double l2_sq = 0.0;
};

ShellQuadrature shell_quadrature(const PlanarField& f, double r_in,
                                 double r_out) {
  constexpr int kRadialPanels = 48;
  constexpr int kAngular = 192;
  int points = 2 * kRadialPanels + 1;
  double hr = (r_out - r_in) / (points - 1);
  ShellQuadrature out;
  for (int i = 0; i < points; ++i) {
    double rho = r_in + i * hr;
    double ring_l1 = 0.0, ring_l2 = 0.0;
    for (int k = 0; k < kAngular; ++k) {
      double theta = kTau * k / kAngular;
      double mag = std::abs(f(std::polar(rho, theta)));
      out.sup = std::max(out.sup, mag);
      ring_l1 += mag;
      ring_l2 += mag * mag;
    }
    double w = (i == 0 || i == points - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    // Polar area element rho drho dtheta.
    out.l1 += w * ring_l1 * rho * (kTau / kAngular);
    out.l2_sq += w * ring_l2 * rho * (kTau / kAngular);
  }
  out.l1 *= hr / 3.0;
  out.l2_sq *= hr / 3.0;
  return out;
}

double triangle_clearance(const Mesh& mesh, int t) {
  const auto& tr = mesh.tri.triangles[t];
  Vec2 c = tr.centroid();
  double best = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    double d = mesh.vertex_dist[tr.vertex[k]] + (c - tr.corner[k]).norm();
    best = std::min(best, d);
  }
  return best;
}

}  // namespace

ShellPartition dyadic_shells(double outer_radius, int j0, int count) {
  if (!(outer_radius > 0.0) || count <= 0)
    fail(ErrorCode::BadParams, "invalid shell partition parameters");
  ShellPartition part;
  part.j0 = j0;
  part.outer_radius = outer_radius;
  part.shells.resize(count);
  for (int k = 0; k < count; ++k) {
    Shell& sh = part.shells[k];
    sh.r_out = outer_radius * std::ldexp(1.0, -k);
    sh.r_in = 0.5 * sh.r_out;
    sh.diameter = 2.0 * sh.r_out;
    sh.area = std::numbers::pi * (sh.r_out * sh.r_out - sh.r_in * sh.r_in);
  }
  validate_partition(part);
  return part;
}

void validate_partition(const ShellPartition& part) {
  int count = static_cast<int>(part.shells.size());
  if (count == 0) fail(ErrorCode::PartitionInvalid, "empty shell partition");
  double scale = part.outer_radius;
  for (int k = 0; k < count; ++k) {
    const Shell& sh = part.shells[k];
    double dyadic = scale * std::ldexp(1.0, -k);
    if (!(sh.r_out > sh.r_in) || !(sh.r_in > 0.0))
      fail(ErrorCode::PartitionInvalid, "degenerate shell radii");
    // Two-sided dyadic bounds on diameter and area (constants 1 and 2, resp.
    // pi/2 and 4pi, relative to the outer radius).
    if (sh.diameter < dyadic * (1.0 - 1e-9) ||
        sh.diameter > 2.0 * dyadic * (1.0 + 1e-9))
      fail(ErrorCode::PartitionInvalid, "shell diameter outside dyadic bounds");
    if (sh.area < 0.5 * std::numbers::pi * dyadic * dyadic * 0.25 * (1.0 - 1e-9) ||
        sh.area > 4.0 * std::numbers::pi * dyadic * dyadic * (1.0 + 1e-9))
      fail(ErrorCode::PartitionInvalid, "shell area outside dyadic bounds");
    // Shells tile the annulus contiguously.
    if (k + 1 < count &&
        std::abs(part.shells[k + 1].r_out - sh.r_in) > 1e-9 * scale)
      fail(ErrorCode::PartitionInvalid, "shells do not tile the annulus");
    // The (2^{-j-2} scale)-neighborhood of W_j stays in the adjacent shells.
    double nb = 0.25 * dyadic;
    if (k > 0 && sh.r_out + nb > part.shells[k - 1].r_out * (1.0 + 1e-9))
      fail(ErrorCode::PartitionInvalid, "outward neighborhood escapes");
    if (k + 1 < count && sh.r_in - nb < part.shells[k + 1].r_in * (1.0 - 1e-9))
      fail(ErrorCode::PartitionInvalid, "inward neighborhood escapes");
  }
}

ShellsReport shells_check(const PlanarField& f, const ShellPartition& part,
                          double delta0) {
  validate_partition(part);
  if (delta0 < 0.0) fail(ErrorCode::BadParams, "negative delta0");

  ShellsReport report;
  report.delta0 = delta0;
  double l1 = 0.0, l2_sq = 0.0;
  for (int k = 0; k < static_cast<int>(part.shells.size()); ++k) {
    const Shell& sh = part.shells[k];
    ShellQuadrature q = shell_quadrature(f, sh.r_in, sh.r_out);
    report.shell_sup.push_back(q.sup);
    l1 += q.l1;
    l2_sq += q.l2_sq;
    int j = part.j0 + k;
    double bound = delta0 * std::ldexp(1.0, j);
    if (q.sup > 0.0)
      report.c_sup = std::max(report.c_sup, q.sup / std::max(bound, 1e-300));
  }
  double l1_bound = delta0 * std::ldexp(1.0, part.j0);
  report.c_l1 = (l1 == 0.0) ? 0.0 : l1 / std::max(l1_bound, 1e-300);
  double l2 = std::sqrt(l2_sq);
  report.c_l2 = (l2 == 0.0) ? 0.0 : l2 / std::max(delta0, 1e-300);
  return report;
}

GradientReport gradient_estimate_check(
    const PlanarField& f, const std::vector<std::complex<double>>& points,
    const std::vector<double>& radii, double t) {
  if (points.size() != radii.size() || t <= 0.0)
    fail(ErrorCode::BadParams, "mismatched points and radii");
  GradientReport report;
  for (std::size_t i = 0; i < points.size(); ++i) {
    double r = radii[i];
    double h = 1e-5 * r;
    if (!(r > 0.0) || t * r <= 8.0 * h)
      fail(ErrorCode::DiskNotEmbedded, "disk too small for the stencil");
    std::complex<double> x = points[i];
    // Holomorphic field: the complex derivative along the real direction.
    double grad = std::abs((f(x + h) - f(x - h)) / (2.0 * h));

    // ||Im f||_{L2} over the disk of radius t*r: Simpson radial, trapezoid
    // angular.
    double R = t * r;
    constexpr int kRadialPanels = 48;
    constexpr int kAngular = 128;
    int pts = 2 * kRadialPanels + 1;
    double hr = R / (pts - 1);
    double acc = 0.0;
    for (int m = 0; m < pts; ++m) {
      double rho = m * hr;
      double ring = 0.0;
      for (int k = 0; k < kAngular; ++k) {
        double im = f(x + std::polar(rho, kTau * k / kAngular)).imag();
        ring += im * im;
      }
      double w = (m == 0 || m == pts - 1) ? 1.0 : (m % 2 == 1 ? 4.0 : 2.0);
      acc += w * ring * rho * (kTau / kAngular);
    }
    double rhs = std::sqrt(std::max(0.0, acc * hr / 3.0));

    double ratio =
        (grad < 1e-12 && rhs < 1e-300) ? 0.0 : grad / std::max(rhs, 1e-300);
    report.ratios.push_back(ratio);
    report.max_ratio = std::max(report.max_ratio, ratio);
  }
  return report;
}

EfficientPathReport efficient_path_check(const Mesh& mesh,
                                         const MeromorphicField& f,
                                         const SurfacePoint& x1,
                                         const SurfacePoint& x2) {
  auto [t1, p1] = locate(mesh.tri, x1);
  auto [t2, p2] = locate(mesh.tri, x2);

  int nt = mesh.triangle_count();
  std::vector<double> node(nt);
  for (int t = 0; t < nt; ++t) node[t] = triangle_clearance(mesh, t);

  // Widest path: maximize the minimum clearance along the path.
  std::vector<double> best(nt, -1.0);
  std::priority_queue<std::pair<double, int>> queue;
  best[t1] = node[t1];
  queue.push({best[t1], t1});
  while (!queue.empty()) {
    auto [w, t] = queue.top();
    queue.pop();
    if (w < best[t]) continue;
    if (t == t2) break;
    for (int k = 0; k < 3; ++k) {
      int u = mesh.tri.triangles[t].neighbor[k];
      if (u < 0) continue;
      double cand = std::min(w, node[u]);
      if (cand > best[u]) {
        best[u] = cand;
        queue.push({cand, u});
      }
    }
  }
  if (best[t2] < 0.0)
    fail(ErrorCode::NoPathFound, "no path between the query points");

  EfficientPathReport report;
  report.clearance = best[t2];
  report.value_gap = std::abs(f.value[t1] - f.value[t2]);
  double acc = 0.0;
  for (int t = 0; t < nt; ++t) {
    double im = f.value[t].imag();
    acc += mesh.tri.triangles[t].area() * im * im;
  }
  report.im_norm = std::sqrt(acc);
  report.ratio = (report.value_gap == 0.0)
                     ? 0.0
                     : report.value_gap * report.clearance /
                           std::max(report.im_norm, 1e-300);
  return report;
}

}  // namespace hourglass
