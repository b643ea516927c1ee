#include "hourglass/laurent.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace hourglass {

namespace {

constexpr double kTau = 2.0 * std::numbers::pi;

/// Evaluates the series on a full angular circle at fixed x using a shared
/// phase table; out[k] = f(x, y_k), y_k = 2 pi s k / K.
void eval_circle(const LaurentSeries& series, const CylinderCoords& coords,
                 double x, int K, std::vector<std::complex<double>>& out) {
  int N = series.degree;
  out.assign(K, {0.0, 0.0});
  for (int n = -N; n <= N; ++n) {
    std::complex<double> c = series.at(n);
    if (c == std::complex<double>(0.0, 0.0)) continue;
    double radial = std::exp(n * x / coords.s);
    std::complex<double> rot = std::polar(1.0, n * kTau / K);
    std::complex<double> phase(1.0, 0.0);
    for (int k = 0; k < K; ++k) {
      out[k] += c * radial * phase;
      phase *= rot;
    }
  }
}

}  // namespace

std::complex<double> LaurentSeries::operator()(std::complex<double> z) const {
  std::complex<double> acc(0.0, 0.0);
  // Horner in z for n >= 0 and in 1/z for n < 0.
  for (int n = degree; n >= 1; --n) acc = (acc + at(n)) * z;
  acc += at(0);
  std::complex<double> neg(0.0, 0.0);
  std::complex<double> zi = 1.0 / z;
  for (int n = -degree; n <= -1; ++n) neg = (neg + at(n)) * zi;
  return acc + neg;
}

std::complex<double> LaurentSeries::eval(const CylinderCoords& coords, double x,
                                         double y) const {
  std::complex<double> acc(0.0, 0.0);
  for (int n = -degree; n <= degree; ++n) {
    std::complex<double> c = at(n);
    if (c == std::complex<double>(0.0, 0.0)) continue;
    acc += c * std::exp(std::complex<double>(n * x / coords.s, n * y / coords.s));
  }
  return acc;
}

LaurentSeries laurent_fit(const CylinderFunction& f,
                          const CylinderCoords& coords, int degree) {
  int N = degree;
  if (N < 0 || coords.s <= 0 || coords.L <= 0)
    fail(ErrorCode::BadParams, "invalid Laurent fit parameters");
  if (N * (2.0 * coords.L / coords.s) > 700.0)
    fail(ErrorCode::IllConditionedFit,
         "radial system overflows at this degree and aspect");

  int circles = 2 * N + 1;
  int K = 4 * N + 4;
  std::vector<double> xs(circles);
  for (int m = 0; m < circles; ++m)
    xs[m] = -coords.L + 2.0 * coords.L * (m + 0.5) / circles;

  // Per-circle Fourier coefficients c_n(x_m) = hat f(n) e^{n x_m / s}.
  std::vector<std::vector<std::complex<double>>> ring(circles);
  for (int m = 0; m < circles; ++m) {
    ring[m].assign(2 * N + 1, {0.0, 0.0});
    for (int k = 0; k < K; ++k) {
      double y = kTau * coords.s * k / K;
      std::complex<double> v = f(xs[m], y);
      for (int n = -N; n <= N; ++n)
        ring[m][n + N] += v * std::polar(1.0, -n * kTau * k / K) * (1.0 / K);
    }
  }

  LaurentSeries out = LaurentSeries::zero(N);
  for (int n = -N; n <= N; ++n) {
    // One-parameter least squares with weights scaled to avoid overflow:
    // the extremal circle for this n carries weight 1.
    double xr = (n >= 0) ? xs.back() : xs.front();
    std::complex<double> num(0.0, 0.0);
    double den = 0.0;
    for (int m = 0; m < circles; ++m) {
      double w = std::exp(n * (xs[m] - xr) / coords.s);
      num += ring[m][n + N] * w;
      den += w * w;
    }
    if (!(den > 1e-300))
      fail(ErrorCode::IllConditionedFit, "degenerate radial least squares");
    out.at(n) = (num / den) * std::exp(-n * xr / coords.s);
  }
  return out;
}

double cylinder_l2_norm(const LaurentSeries& series, const CylinderCoords& coords) {
  double s = coords.s, L = coords.L;
  double sum = 2.0 * L * std::norm(series.at(0));
  for (int n = 1; n <= series.degree; ++n) {
    double pair = std::norm(series.at(n)) + std::norm(series.at(-n));
    if (pair == 0.0) continue;
    sum += pair * std::sinh(2.0 * n * L / s) / (n / s);
  }
  return std::sqrt(kTau * s * sum);
}

double parseval_check(const LaurentSeries& series, const CylinderCoords& coords) {
  double closed = kTau * coords.s *
                  (2.0 * coords.L * std::norm(series.at(0)));
  for (int n = 1; n <= series.degree; ++n) {
    double pair = std::norm(series.at(n)) + std::norm(series.at(-n));
    closed += kTau * coords.s * pair * std::sinh(2.0 * n * coords.L / coords.s) /
              (n / coords.s);
  }

  // Direct quadrature: composite Simpson in x, exact trapezoid in y.
  int N = series.degree;
  int K = 4 * N + 8;
  double aspect = std::max(1.0, N * coords.L / coords.s);
  int panels = std::max(512, static_cast<int>(std::min(40000.0, 64.0 * aspect)));
  int points = 2 * panels + 1;
  double hx = 2.0 * coords.L / (points - 1);
  std::vector<std::complex<double>> circle;
  double quad = 0.0;
  for (int i = 0; i < points; ++i) {
    double x = -coords.L + i * hx;
    eval_circle(series, coords, x, K, circle);
    double ring = 0.0;
    for (const auto& v : circle) ring += std::norm(v);
    ring *= kTau * coords.s / K;
    double w = (i == 0 || i == points - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    quad += w * ring;
  }
  quad *= hx / 3.0;

  double scale = std::max(closed, quad);
  if (scale <= 0.0) return 0.0;
  return std::abs(closed - quad) / scale;
}

CylinderLemmaReport cylinder_lemma_check(const LaurentSeries& series,
                                         const CylinderCoords& coords,
                                         double B, double ls_floor) {
  double s = coords.s, L = coords.L;
  if (L / s < ls_floor)
    fail(ErrorCode::FloorViolated, "cylinder aspect below the asymptotic floor");

  int N = series.degree;
  int K = 4 * N + 8;
  CylinderLemmaReport report;

  // delta = ||Im f||_2 by the same Simpson-x / trapezoid-y quadrature.
  {
    double aspect = std::max(1.0, N * L / s);
    int panels = std::max(512, static_cast<int>(std::min(40000.0, 64.0 * aspect)));
    int points = 2 * panels + 1;
    double hx = 2.0 * L / (points - 1);
    std::vector<std::complex<double>> circle;
    double quad = 0.0;
    for (int i = 0; i < points; ++i) {
      double x = -L + i * hx;
      eval_circle(series, coords, x, K, circle);
      double ring = 0.0;
      for (const auto& v : circle) ring += v.imag() * v.imag();
      ring *= kTau * s / K;
      double w = (i == 0 || i == points - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
      quad += w * ring;
    }
    report.delta = std::sqrt(std::max(0.0, quad * hx / 3.0));
  }

  std::complex<double> c0 = series.at(0);

  // (a) interior sup of |f - c0| on |x| < L - B s.
  double interior = L - B * s;
  double sup = 0.0;
  if (interior > 0) {
    int nx = 201;
    std::vector<std::complex<double>> circle;
    for (int i = 0; i < nx; ++i) {
      double x = -interior + 2.0 * interior * i / (nx - 1);
      eval_circle(series, coords, x, K, circle);
      for (const auto& v : circle) sup = std::max(sup, std::abs(v - c0));
    }
  }
  double dscale = report.delta / s;
  report.c_sup = (sup == 0.0) ? 0.0 : sup / std::max(dscale, 1e-300);

  // (b) rotation-invariant circle averages equal c0.
  {
    std::vector<std::complex<double>> circle;
    double worst = 0.0;
    for (double x : {-0.9 * L, -0.3 * L, 0.0, 0.4 * L, 0.9 * L}) {
      eval_circle(series, coords, x, K, circle);
      std::complex<double> avg(0.0, 0.0);
      double supv = 0.0;
      for (const auto& v : circle) {
        avg += v;
        supv = std::max(supv, std::abs(v));
      }
      avg /= static_cast<double>(K);
      // Relative to the circle's sup so cancellation noise does not dominate.
      worst = std::max(worst, std::abs(avg - c0) / std::max(supv, 1e-300));
    }
    report.rotation_residual = worst;
  }

  // (c) L2 bound constant.
  double norm2 = kTau * s * (2.0 * L * std::norm(c0));
  for (int n = 1; n <= N; ++n)
    norm2 += kTau * s * (std::norm(series.at(n)) + std::norm(series.at(-n))) *
             std::sinh(2.0 * n * L / s) / (n / s);
  double denom = L * s * std::norm(c0) + report.delta * report.delta;
  report.c_l2 = (norm2 == 0.0) ? 0.0 : norm2 / std::max(denom, 1e-300);

  // Coefficient decay constant.
  double decay = 0.0;
  for (int n = 1; n <= N; ++n) {
    double bound = std::sqrt(static_cast<double>(n)) * dscale *
                   std::exp(-n * L / s);
    double mag = std::max(std::abs(series.at(n)), std::abs(series.at(-n)));
    if (mag > 0.0) decay = std::max(decay, mag / std::max(bound, 1e-300));
  }
  report.c_decay = decay;
  return report;
}

}  // namespace hourglass
