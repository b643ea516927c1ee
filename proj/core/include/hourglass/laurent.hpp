#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "hourglass/numeric.hpp"

namespace hourglass {

/// Flat cylinder (-L, L) x [0, 2*pi*s) with the conformal identification
/// z = exp((x + i y) / s); the core curve has length 2*pi*s.
struct CylinderCoords {
  double s = 1.0;
  double L = 1.0;

  std::complex<double> to_z(double x, double y) const {
    return std::exp(std::complex<double>(x, y) / s);
  }
};

/// Finite Laurent series sum_{n=-N}^{N} c_n z^n.
struct LaurentSeries {
  int degree = 0;  // N
  std::vector<std::complex<double>> coeff;  // index n + N

  std::complex<double> at(int n) const {
    if (n < -degree || n > degree) return {0.0, 0.0};
    return coeff[n + degree];
  }
  std::complex<double>& at(int n) { return coeff[n + degree]; }

  std::complex<double> operator()(std::complex<double> z) const;
  /// Evaluation in cylinder coordinates without forming z (overflow-safe
  /// via exponents n*(x/s)).
  std::complex<double> eval(const CylinderCoords& coords, double x,
                            double y) const;

  static LaurentSeries zero(int degree) {
    LaurentSeries out;
    out.degree = degree;
    out.coeff.assign(2 * degree + 1, {0.0, 0.0});
    return out;
  }
};

using CylinderFunction =
    std::function<std::complex<double>(double x, double y)>;

/// Recovers Laurent coefficients of a holomorphic function on the cylinder:
/// per-circle discrete Fourier transform plus a radial least-squares fit over
/// 2N+1 circles with 4N+4 angular samples each.
LaurentSeries laurent_fit(const CylinderFunction& f,
                          const CylinderCoords& coords, int degree);

/// Relative error between the Parseval closed form
///   ||f||^2 = 2*pi*s [ 2L |c_0|^2
///             + sum_n (|c_n|^2 + |c_-n|^2) sinh(2nL/s) / (n/s) ]
/// and direct two-dimensional quadrature of |f|^2 over the cylinder.
double parseval_check(const LaurentSeries& series, const CylinderCoords& coords);

/// L2 norm of the series over the cylinder via the closed form.
double cylinder_l2_norm(const LaurentSeries& series, const CylinderCoords& coords);

struct CylinderLemmaReport {
  double delta = 0.0;         // ||Im f||_2 by quadrature
  double c_sup = 0.0;         // sup |f - c_0| on |x| < L - B s, over delta/s
  double c_l2 = 0.0;          // ||f||^2 over (L s |c_0|^2 + delta^2)
  double c_decay = 0.0;       // max |c_n| / (sqrt(n) (delta/s) e^{-nL/s})
  double rotation_residual = 0.0;  // circle averages against c_0
};

/// Empirical constants for the cylinder estimates: interior sup bound, L2
/// bound, rotation-invariant averages and coefficient decay. Requires
/// L/s >= floor (default 10).
CylinderLemmaReport cylinder_lemma_check(const LaurentSeries& series,
                                         const CylinderCoords& coords,
                                         double B = 8.0,
                                         double ls_floor = 10.0);

}  // namespace hourglass
