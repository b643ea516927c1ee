#pragma once

#include <vector>

#include "hourglass/flat_geometry.hpp"

namespace hourglass {

/// Primitive annuli decomposition parameters. The admission threshold mu0 and
/// level-circle offset factor B must satisfy mu0 > B > 2; the defaults also
/// keep mu0 >= 2B so cylinder middles are never empty.
struct PADParams {
  double mu0 = 16.0;
  double B = 8.0;
  double b() const { return 1.0 / B; }
};

enum class PieceKind { Thick, CylinderMiddle, AnnulusShell };
enum class CircleKind { Inner, Outer };

/// Level circle of a decomposition annulus. Cylinder annuli carry two
/// core-parallel circles at distance B*l(core) from the boundaries; shell
/// annuli carry a degenerate inner circle at the puncture and an outer circle
/// at the 1/B distance-ratio point.
struct LevelCircle {
  int annulus = -1;
  CircleKind kind = CircleKind::Inner;
  double length = 0.0;
  bool degenerate = false;
  /// Signed seed-ray offset (cylinders) or radius from the core point (shells).
  double position = 0.0;
  /// Adjacent pieces in the decomposition graph (-1 for degenerate circles).
  int node_a = -1;
  int node_b = -1;
};

struct PADAnnulus {
  bool is_cylinder = false;
  FlatCylinder cylinder;       // valid when is_cylinder
  int shell_singularity = -1;  // valid for shells
  double shell_radius = 0.0;   // embedded punctured-disk radius W(p)
  MuValue mu;
};

struct PADPiece {
  PieceKind kind = PieceKind::Thick;
  int annulus = -1;  // owning annulus for non-thick pieces
  double area = 0.0;
  double diameter = 0.0;  // estimate (centroid graph for thick pieces)
  double size = 0.0;
  double boundary_length = 0.0;  // total length of adjacent level circles
  std::vector<int> triangles;    // triangles classified into this piece
};

struct PADecomposition {
  PADParams params;
  std::vector<PADAnnulus> annuli;
  std::vector<LevelCircle> circles;
  std::vector<PADPiece> pieces;
  double surface_area = 0.0;
};

struct ThickThinEntry {
  int piece = -1;
  PieceKind kind = PieceKind::Thick;
  double area = 0.0;
  double diameter = 0.0;
  double size = 0.0;
  double boundary_length = 0.0;
  double disk_radius = 0.0;  // largest embedded disk at a deep sample point
  double diam_over_size = 0.0;
  double area_over_size2 = 0.0;
  double boundary_over_size = 0.0;
  bool flagged = false;
};

struct ThickThinReport {
  std::vector<ThickThinEntry> entries;
  double band = 8.0;  // ratios outside [1/band, band] are flagged
};

struct HourglassResult {
  double value = 1.0;
  std::vector<int> witness;  // indices into pad.circles; empty when value = 1
  double witness_length = 0.0;
  double smaller_side_area = 0.0;
};

/// Builds the primitive annuli decomposition: admits cylinders of modulus
/// above mu0 and singularity shells whose embedded disk radius is below
/// sqrt(Area)/mu0, places level circles, checks their disjointness, and cuts
/// the surface into graph pieces.
PADecomposition build_pad(const Triangulation& tri, const PADParams& params = {});
PADecomposition build_pad(const FlatSurface& surface,
                          const PADParams& params = {});

/// Report-only size estimates per piece (diameter, area and boundary against
/// the piece size).
ThickThinReport verify_thick_thin(const Triangulation& tri,
                                  const PADecomposition& pad);

/// Hourglass ratio: min of 1 and min over separating systems of level
/// circles of l(U)/sqrt(area of the smaller side), where neither side may
/// consist solely of annulus shells. Exhaustive over circle subsets.
HourglassResult hourglass_ratio(const PADecomposition& pad);

}  // namespace hourglass
