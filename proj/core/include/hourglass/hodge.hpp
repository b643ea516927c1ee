#pragma once

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hourglass/mesh.hpp"

namespace hourglass {

/// Real 1-cochain: one value per mesh edge in canonical orientation.
using Cochain1 = Eigen::VectorXd;

/// Harmonic (closed and cotan-co-closed) basis of H^1, normalized so the
/// pairing against the tree-cotree cycle basis is the identity.
struct HarmonicBasis {
  std::vector<Cochain1> cochains;  // 2g entries
  /// Cycle j as an ordered loop of (edge id, +-1 canonical direction).
  std::vector<std::vector<std::pair<int, int>>> cycles;
  Eigen::MatrixXd pairing;  // pairing(i, k) = period of cochains[i] over cycles[k]
  double closed_residual = 0.0;    // max |d1 h| over faces
  double coclosed_residual = 0.0;  // max |delta h| over vertices
};

HarmonicBasis harmonic_basis(const Mesh& mesh);

/// Per-triangle constant covector reconstruction of a closed cochain.
std::vector<Vec2> constant_form(const Mesh& mesh, const Cochain1& c);

double hodge_inner(const Mesh& mesh, const Cochain1& a, const Cochain1& b);
Eigen::MatrixXd hodge_gram(const Mesh& mesh, const std::vector<Cochain1>& basis);

/// Hodge star (90-degree rotation of the constant form) re-projected into the
/// harmonic span.
Cochain1 hodge_star(const Mesh& mesh, const HarmonicBasis& basis,
                    const Cochain1& c);

/// Period vector of a cochain over the basis cycles.
Eigen::VectorXd cycle_periods(const HarmonicBasis& basis, const Cochain1& c);

/// Per-triangle complex function f with h_c = f dz for the holomorphic
/// partner h_c = c + i * star(c). Sign-ambiguous on half-turn charts; the
/// quantities consumed downstream (f^2, |f|^2, products of two fields) are
/// well defined.
struct MeromorphicField {
  Eigen::VectorXcd value;
  std::string provenance;
};

MeromorphicField holomorphic_field(const Mesh& mesh, const Cochain1& c);

struct QuadratureParams {
  double eps_factor = 1.0;       // base singular exclusion radius, times mesh h
  double richardson_tol = 0.05;  // extrapolation disagreement bound
};

/// -Re(int f^2 |q|) / ||f||^2 with epsilon-disks around the singularities
/// excluded and the epsilon -> 0 limit Richardson-extrapolated.
double field_log_derivative(const Mesh& mesh, const MeromorphicField& f,
                            const QuadratureParams& params = {});

/// Variational derivative of log||c|| along the Teichmueller flow.
double forni_derivative(const Mesh& mesh, const Cochain1& c,
                        const QuadratureParams& params = {});

struct SpectralGapResult {
  double delta = 0.0;
  MeromorphicField argmin;
  double gram_condition = 0.0;
};

/// delta^2 = min ||Im f||^2 / ||f||^2 over the real span of the products
/// eta_i eta_j / omega^2 (and their i-multiples), after projecting away the
/// constants.
SpectralGapResult spectral_gap(const Mesh& mesh);
SpectralGapResult spectral_gap(const Mesh& mesh, const HarmonicBasis& basis);

struct OddEvenSplit {
  Eigen::MatrixXd action;  // pullback of the deck involution on the basis
  double residual = 0.0;   // ||action^2 - I||
  std::vector<Cochain1> odd;
  std::vector<Cochain1> even;
};

/// Splits the harmonic space of an orienting double cover into the odd and
/// even parts of the deck involution.
OddEvenSplit odd_even_split(const Mesh& mesh, const HarmonicBasis& basis);

/// Straight segment in a polygon chart; paths are segment chains.
struct ChartSegment {
  int polygon = -1;
  Vec2 a, b;
};
using CyclePath = std::vector<ChartSegment>;

/// Basis cycles realized as polygon-chart polylines (flow-equivariant data).
std::vector<CyclePath> cycle_paths(const Mesh& mesh, const HarmonicBasis& basis);

/// Path integral of a closed cochain (given by its constant form) along a
/// straight chart segment.
double integrate_segment(const Mesh& mesh, const std::vector<Vec2>& form,
                         const ChartSegment& seg);

/// Harmonic data of a flow-time-t surface together with the period matrix of
/// its basis over the (flowed) base cycles.
struct TransportFrame {
  Mesh mesh;
  HarmonicBasis basis;
  Eigen::MatrixXd period_matrix;  // (i, k): basis i over flowed base cycle k
  Eigen::MatrixXd gram;
};

/// `flowed` must be apply_flow(base, t); the cycles are the base-surface
/// paths and are flowed internally.
TransportFrame transport_frame(const FlatSurface& flowed, double t,
                               const std::vector<CyclePath>& base_cycles,
                               double h, const MeshParams& mesh_params = {});

/// Hodge norm in the frame of the fixed cohomology class with the given
/// periods over the base cycles.
double frame_norm(const TransportFrame& frame, const Eigen::VectorXd& periods);

/// Hodge norm at flow time t of the fixed class with the given base periods.
double transported_norm(const FlatSurface& base,
                        const std::vector<CyclePath>& cycles,
                        const Eigen::VectorXd& periods, double t, double h,
                        const MeshParams& mesh_params = {});

/// Variational log-derivative of the fixed class in a transported frame:
/// the harmonic representative is recovered from the period matrix and fed
/// to Forni's formula on the frame mesh.
double frame_log_derivative(const TransportFrame& frame,
                            const Eigen::VectorXd& periods,
                            const QuadratureParams& params = {});

/// Central finite difference of log||c||_t at t = 0 for the fixed class.
double flow_derivative_fd(const FlatSurface& base,
                          const std::vector<CyclePath>& cycles,
                          const Eigen::VectorXd& periods, double dt, double h,
                          const MeshParams& mesh_params = {});

}  // namespace hourglass
