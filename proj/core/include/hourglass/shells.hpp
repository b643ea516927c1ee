#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "hourglass/hodge.hpp"

namespace hourglass {

struct Shell {
  double r_in = 0.0;
  double r_out = 0.0;
  double diameter = 0.0;
  double area = 0.0;
};

/// Dyadic shell partition of a planar annulus: radii halving from the outer
/// boundary inward, shell j spanning [outer * 2^-(j-j0+1), outer * 2^-(j-j0)].
struct ShellPartition {
  std::vector<Shell> shells;
  int j0 = 0;
  double outer_radius = 1.0;
};

ShellPartition dyadic_shells(double outer_radius, int j0, int count);

/// Checks the partition certificates: two-sided dyadic diameter and area
/// bounds and the 2^{-j-2}-neighborhood containment in adjacent shells.
void validate_partition(const ShellPartition& part);

using PlanarField = std::function<std::complex<double>(std::complex<double>)>;

struct ShellsReport {
  double delta0 = 0.0;
  double c_sup = 0.0;  // max_j sup_{W_j} |f| / (delta0 2^j)
  double c_l1 = 0.0;   // ||f||_{L1(W)} / (delta0 2^{j0})
  double c_l2 = 0.0;   // ||f||_{L2(W)} / delta0
  std::vector<double> shell_sup;
};

/// Empirical constants for the dyadic-shell estimates; hypotheses (sup bound
/// on the outermost shell, Im-norm bound) are the caller's responsibility,
/// typically enforced by rescaling.
ShellsReport shells_check(const PlanarField& f, const ShellPartition& part,
                          double delta0);

struct GradientReport {
  double max_ratio = 0.0;
  std::vector<double> ratios;
};

/// Ratio |f'(x)| / ||Im f||_{L2(B_{t r}(x))} per point; radii are the
/// embedded-disk radii at the points.
GradientReport gradient_estimate_check(const PlanarField& f,
                                       const std::vector<std::complex<double>>& points,
                                       const std::vector<double>& radii,
                                       double t);

struct EfficientPathReport {
  double ratio = 0.0;      // |f(x1) - f(x2)| * r / ||Im f||_2
  double clearance = 0.0;  // best min singularity distance along a path
  double value_gap = 0.0;
  double im_norm = 0.0;
};

/// Certifies a path between the points maximizing the minimum singularity
/// clearance (widest path over the triangle adjacency graph) and reports the
/// efficient-path ratio for the discrete field.
EfficientPathReport efficient_path_check(const Mesh& mesh,
                                         const MeromorphicField& f,
                                         const SurfacePoint& x1,
                                         const SurfacePoint& x2);

}  // namespace hourglass
