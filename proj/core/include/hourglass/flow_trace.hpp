#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hourglass/decomposition.hpp"
#include "hourglass/hodge.hpp"

namespace hourglass {

struct FlowParams {
  double t_start = 0.0;
  double t_end = 1.0;
  double dt_sample = 0.1;
  double h = 0.1;        // mesh target for the Hodge frames
  double fd_dt = 1e-3;   // central-difference half step for log-derivatives
  bool compute_gap = false;
  int classes = -1;  // tracked classes; -1 keeps the whole complement (2g-2)
  PADParams pad;
  MeshParams mesh;
  QuadratureParams quadrature;
};

struct FlowSample {
  double t = 0.0;
  double H = 0.0;
  double kappa = 0.0;
  double delta = 0.0;  // NaN when the gap is not computed
  double area = 0.0;
  std::vector<double> dlog;  // one entry per tracked class
  std::string flags;         // ';'-joined error codes; empty when clean
};

/// Sampled time series along the Teichmueller flow, together with the fixed
/// tracked cohomology data at t_start (periods over the base cycles, base
/// Gram matrix, and the omega classes used for orthogonalization).
struct FlowTrace {
  std::vector<FlowSample> samples;
  int class_count = 0;
  Eigen::MatrixXd class_periods;  // 2g x k, one column per tracked class
  Eigen::MatrixXd base_gram;      // Hodge Gram of the t_start basis
  Eigen::VectorXd omega_re;       // periods of Re(omega) over the base cycles
  Eigen::VectorXd omega_im;
  FlowParams params;
};

/// Flows the surface and records H, kappa, delta, area and the Hodge-norm
/// log-derivatives of the tracked classes at each sample. Default classes:
/// a Hodge-orthonormalized basis of the complement of {[Re w], [Im w]} at
/// t_start. A non-empty `classes` matrix (columns = period vectors over the
/// t_start cycle basis) overrides the default and is used verbatim.
/// Per-sample failures are recorded in the row flags; the trace continues.
FlowTrace trace_flow(const FlatSurface& surface, const FlowParams& params,
                     const Eigen::MatrixXd& classes = Eigen::MatrixXd());

/// CSV with header `t,H,kappa,delta,area,dlog_1..dlog_k,flags`, every number
/// with 17 significant digits.
std::string trace_csv(const FlowTrace& trace);

/// Trapezoid-rule diagnostics (int H^2 dt, int kappa^2 dt) over the clean
/// samples of the trace.
std::pair<double, double> integral_h_squared(const FlowTrace& trace);

struct AuditResult {
  std::vector<double> margins;  // per clean sample: (1 - max|dlog|) / H^2
  double fitted_c = 0.0;        // min margin
  bool pass = false;
  std::vector<double> systole_margins;  // same with kappa^2
  double systole_c = 0.0;
  bool systole_pass = false;
};

/// Audits |d/dt log||a|| | <= 1 - c H^2 over the trace. Verifies first that
/// every tracked class is Hodge-orthogonal to [Re w] and [Im w] at t_start
/// (OrthogonalizationFailed otherwise).
AuditResult hodge_gap_audit(const FlowTrace& trace);

}  // namespace hourglass
