#include "hourglass/walkthrough.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hourglass/mesh.hpp"

namespace hourglass {

namespace {

constexpr double kPi = std::numbers::pi;

enum Region { kT = 0, kU, kA, kE, kM, kRegionCount };

const char* region_name(int r) {
  switch (r) {
    case kT: return "T";
    case kU: return "U";
    case kA: return "A";
    case kE: return "E";
    default: return "M";
  }
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  Vec2 ab = b - a;
  double len2 = ab.squared_norm();
  double t = (len2 > 0) ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + ab * t)).norm();
}

/// Distance in the torus chart to the slit segment, minimized over the
/// period lattice.
double torus_slit_distance(Vec2 p, double S, double a, double slit) {
  double best = 1e300;
  for (int ix = -1; ix <= 1; ++ix)
    for (int iy = -1; iy <= 1; ++iy) {
      Vec2 q{p.x + ix * S, p.y + iy * S};
      best = std::min(best,
                      point_segment_distance(q, {a, 0.0}, {a + slit, 0.0}));
    }
  return best;
}

double torus_cone_distance(Vec2 p, double S, double a, double slit) {
  double best = 1e300;
  for (int ix = -1; ix <= 1; ++ix)
    for (int iy = -1; iy <= 1; ++iy) {
      Vec2 q{p.x + ix * S, p.y + iy * S};
      best = std::min({best, (q - Vec2{a, 0.0}).norm(),
                       (q - Vec2{a + slit, 0.0}).norm()});
    }
  return best;
}

}  // namespace

double WalkthroughRegionRow::area_ratio() const {
  if (predicted_area <= 0.0) return area;
  return area / predicted_area;
}
double WalkthroughRegionRow::boundary_ratio() const {
  if (predicted_boundary <= 0.0) return boundary_sup;
  return boundary_sup / predicted_boundary;
}
double WalkthroughRegionRow::integral_ratio() const {
  // Against a zero prediction the ratio reports the raw residual.
  if (predicted_integral <= 0.0) return integral_abs;
  return integral_abs / predicted_integral;
}
double WalkthroughRegionRow::l2_ratio() const {
  if (predicted_l2 <= 0.0) return l2;
  return l2 / predicted_l2;
}

WalkthroughReport genus2_walkthrough(double S, double s, double L,
                                     const WalkthroughParams& params) {
  double B = params.B, b = params.b;
  if (!(B > 0) || !(b > 0) || !(b < 1))
    fail(ErrorCode::BadParams, "invalid walkthrough scales");
  if (!(B * s < b * S))
    fail(ErrorCode::BadParams, "slit neighborhood swallows the mid scale");
  if (!(L > B * s)) fail(ErrorCode::BadParams, "annulus interior is empty");

  FlatSurface surface = genus2_example(S, s, L);
  double slit = 2.0 * kPi * s;
  double a = 0.5 * (S - slit);

  double h = params.h > 0 ? params.h : std::min({kPi * s, S / 8.0, L / 8.0});
  Mesh mesh = refine_mesh(surface, h);
  HarmonicBasis basis = harmonic_basis(mesh);
  SpectralGapResult gap = spectral_gap(mesh, basis);

  // Normalize the near-minimizer to unit L2 norm (plain area quadrature).
  Eigen::VectorXcd f = gap.argmin.value;
  int nt = mesh.triangle_count();
  double norm2 = 0.0;
  for (int t = 0; t < nt; ++t)
    norm2 += mesh.tri.triangles[t].area() * std::norm(f[t]);
  if (!(norm2 > 0)) fail(ErrorCode::SolverFailure, "degenerate minimizer");
  f /= std::sqrt(norm2);

  WalkthroughReport report;
  report.S = S;
  report.s = s;
  report.L = L;
  report.B = B;
  report.b = b;
  report.gap_delta = gap.delta;
  report.d = std::max(s / S, std::sqrt(s / L));
  report.selected_case = (s / S >= std::sqrt(s / L)) ? 1 : 2;

  double delta2 = 0.0;
  for (int t = 0; t < nt; ++t) {
    double im = f[t].imag();
    delta2 += mesh.tri.triangles[t].area() * im * im;
  }
  report.delta = std::sqrt(delta2);
  report.delta_hat = report.delta / report.d;

  // Region classification by centroid in polygon coordinates.
  std::vector<int> region(nt);
  std::vector<double> depth(nt, 0.0);  // slit distance, torus triangles only
  for (int t = 0; t < nt; ++t) {
    const auto& tr = mesh.tri.triangles[t];
    bool touches_cone = false;
    for (int k = 0; k < 3; ++k)
      if (mesh.tri.vertices[tr.vertex[k]].singular) touches_cone = true;
    SurfacePoint p =
        canonicalize(surface, tr.source_polygon, tr.to_polygon(tr.centroid()));
    if (p.polygon == 1) {
      double x = p.coords.x, y = p.coords.y;
      if (y > B * s && y < 2.0 * L - B * s) {
        region[t] = kA;
      } else {
        double xr = std::min(std::abs(x), std::abs(slit - x));
        double dc = std::min(std::hypot(xr, y), std::hypot(xr, 2.0 * L - y));
        region[t] = (touches_cone || dc < b * s) ? kU : kE;
      }
    } else {
      double dc = torus_cone_distance(p.coords, S, a, slit);
      double ds = torus_slit_distance(p.coords, S, a, slit);
      depth[t] = ds;
      if (touches_cone || dc < b * s)
        region[t] = kU;
      else if (ds <= B * s)
        region[t] = kE;
      else if (ds <= b * S)
        region[t] = kM;
      else
        region[t] = kT;
    }
  }

  // f hat(0): area average over the annulus, and the deepest point of T.
  std::complex<double> sumA(0.0, 0.0);
  double areaA = 0.0;
  int deepest = -1;
  for (int t = 0; t < nt; ++t) {
    if (region[t] == kA) {
      double w = mesh.tri.triangles[t].area();
      sumA += w * f[t];
      areaA += w;
    }
    if (region[t] == kT && (deepest < 0 || depth[t] > depth[deepest]))
      deepest = t;
  }
  if (areaA <= 0) fail(ErrorCode::BadParams, "annulus region is empty");
  if (deepest < 0) fail(ErrorCode::BadParams, "torus region is empty");
  report.f_hat0 = sumA / areaA;
  report.f_pT = f[deepest];
  report.constant = (report.selected_case == 1) ? report.f_hat0 : report.f_pT;
  report.step2_ratio = 4.0 * kPi * L * s * std::norm(report.f_hat0);

  // Residual of the exact cancellation int_A (f - fhat0) |q| = 0.
  std::complex<double> residual(0.0, 0.0);
  for (int t = 0; t < nt; ++t)
    if (region[t] == kA)
      residual += mesh.tri.triangles[t].area() * (f[t] - report.f_hat0);
  report.integral_A_residual = std::abs(residual);

  // Rotation invariance: mid-band average against the full-annulus average.
  {
    std::complex<double> mid(0.0, 0.0);
    double wmid = 0.0;
    for (int t = 0; t < nt; ++t) {
      if (region[t] != kA) continue;
      const auto& tr = mesh.tri.triangles[t];
      SurfacePoint p = canonicalize(surface, tr.source_polygon,
                                    tr.to_polygon(tr.centroid()));
      if (p.polygon == 1 && std::abs(p.coords.y - L) < 0.2 * L) {
        double w = tr.area();
        mid += w * f[t];
        wmid += w;
      }
    }
    report.rotation_residual =
        (wmid > 0) ? std::abs(mid / wmid - report.f_hat0) : 0.0;
  }

  // Per-region measurements of g = f - constant.
  double area[kRegionCount] = {};
  double integral_re[kRegionCount] = {}, integral_im[kRegionCount] = {};
  double l2[kRegionCount] = {};
  double boundary[kRegionCount] = {};
  for (int t = 0; t < nt; ++t) {
    int r = region[t];
    const auto& tr = mesh.tri.triangles[t];
    std::complex<double> g = f[t] - report.constant;
    double w = tr.area();
    area[r] += w;
    integral_re[r] += w * g.real();
    integral_im[r] += w * g.imag();
    l2[r] += w * std::norm(g);
    for (int k = 0; k < 3; ++k) {
      int u = tr.neighbor[k];
      if (u >= 0 && region[u] != r) {
        boundary[r] = std::max(boundary[r], std::abs(g));
        break;
      }
    }
  }

  double delta = report.delta, dhat = report.delta_hat;
  double areaLs = 4.0 * kPi * L * s;
  auto make_row = [&](int r, double pa, double pb, double pi_, double pl2) {
    WalkthroughRegionRow row;
    row.region = region_name(r);
    row.area = area[r];
    row.predicted_area = pa;
    row.boundary_sup = boundary[r];
    row.predicted_boundary = pb;
    row.integral_abs = std::hypot(integral_re[r], integral_im[r]);
    row.predicted_integral = pi_;
    row.l2 = l2[r];
    row.predicted_l2 = pl2;
    return row;
  };

  if (report.selected_case == 1) {
    report.rows.push_back(make_row(kA, areaLs, delta / s, 0.0, dhat * dhat));
    report.rows.push_back(
        make_row(kE, s * s, delta / s, s * delta, dhat * dhat));
    report.rows.push_back(
        make_row(kU, s * s, delta / s, s * delta, dhat * dhat));
    report.rows.push_back(
        make_row(kM, S * S, delta / s, S * dhat, dhat * dhat));
    report.rows.push_back(
        make_row(kT, S * S, delta / s, S * dhat, dhat * dhat));
  } else {
    report.rows.push_back(make_row(kT, S * S, dhat, dhat, dhat * dhat));
    report.rows.push_back(
        make_row(kE, s * s, dhat / s, s * dhat, dhat * dhat));
    report.rows.push_back(
        make_row(kU, s * s, dhat / s, s * dhat, dhat * dhat));
    report.rows.push_back(make_row(kM, S * S, delta, delta, dhat * dhat));
    report.rows.push_back(make_row(kA, areaLs, dhat / std::sqrt(L * s),
                                   dhat * std::sqrt(L * s), dhat * dhat));
  }
  return report;
}

}  // namespace hourglass
