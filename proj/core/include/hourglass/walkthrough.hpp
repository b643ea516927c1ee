#pragma once

#include <complex>
#include <string>
#include <vector>

#include "hourglass/hodge.hpp"

namespace hourglass {

/// One region row of the slit-torus estimate table: measured quantities of
/// g = f - const over the region against the predicted orders of magnitude
/// (unit implied constants).
struct WalkthroughRegionRow {
  std::string region;  // "T", "U", "A", "E", "M"
  double area = 0.0;
  double predicted_area = 0.0;
  double boundary_sup = 0.0;
  double predicted_boundary = 0.0;
  double integral_abs = 0.0;  // |int_R g |q||
  double predicted_integral = 0.0;
  double l2 = 0.0;  // int_R |g|^2 |q|
  double predicted_l2 = 0.0;

  double area_ratio() const;
  double boundary_ratio() const;
  double integral_ratio() const;
  double l2_ratio() const;
};

struct WalkthroughParams {
  double B = 8.0;   // slit-neighborhood scale, in units of s
  double b = 0.25;  // cone-neighborhood (b*s) and mid-scale (b*S) fractions
  double h = 0.0;   // mesh target; 0 picks min(pi*s, S/8, L/8)
};

struct WalkthroughReport {
  int selected_case = 0;  // 1: g = f - fhat0, 2: g = f - f(p_T)
  double S = 0.0, s = 0.0, L = 0.0;
  double B = 0.0, b = 0.0;
  double d = 0.0;          // max(s/S, sqrt(s/L))
  double delta = 0.0;      // ||Im f||_2 with ||f||_2 = 1
  double delta_hat = 0.0;  // delta / d
  double gap_delta = 0.0;  // spectral-gap value the field realizes
  std::complex<double> f_hat0;    // area average of f over the annulus A
  std::complex<double> f_pT;      // f at the deepest point of T
  std::complex<double> constant;  // the case-selected constant
  double step2_ratio = 0.0;       // 4*pi*L*s*|f_hat0|^2 over ||f||^2
  double integral_A_residual = 0.0;  // |int_A (f - f_hat0) |q||
  double rotation_residual = 0.0;    // mid-band vs full-annulus average of f
  std::vector<WalkthroughRegionRow> rows;
};

/// Partitions the slit-torus surface into the regions T, U, A, E, M, takes
/// the near-minimizing field from the spectral gap, selects the estimate
/// case by comparing s/S with sqrt(s/L), and evaluates every table cell.
WalkthroughReport genus2_walkthrough(double S, double s, double L,
                                     const WalkthroughParams& params = {});

}  // namespace hourglass
