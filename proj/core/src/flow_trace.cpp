#include "hourglass/flow_trace.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "hourglass/flat_geometry.hpp"

namespace hourglass {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void add_flag(std::string& flags, const char* code) {
  if (!flags.empty()) flags += ';';
  flags += code;
}

/// Periods of the constant 1-forms dx and dy over the basis cycles; needs
/// translation-only charts so the components are globally defined.
void omega_periods(const Mesh& mesh, const HarmonicBasis& basis,
                   Eigen::VectorXd& re, Eigen::VectorXd& im) {
  if (!mesh.tri.charts_translation_only())
    fail(ErrorCode::BadParams,
         "omega period classes need translation-only charts");
  int n = static_cast<int>(basis.cycles.size());
  re.setZero(n);
  im.setZero(n);
  for (int k = 0; k < n; ++k) {
    for (auto [e, sign] : basis.cycles[k]) {
      const MeshEdge& edge = mesh.edges[e];
      const auto& tr = mesh.tri.triangles[edge.t];
      Vec2 d = tr.corner[(edge.e + 1) % 3] - tr.corner[edge.e];
      re[k] += sign * d.x;
      im[k] += sign * d.y;
    }
  }
}

/// Hodge-orthonormal basis of the G-orthogonal complement of the span of
/// p_re and p_im, by Gram-Schmidt over the coordinate directions.
Eigen::MatrixXd default_classes(const Eigen::MatrixXd& gram,
                                const Eigen::VectorXd& p_re,
                                const Eigen::VectorXd& p_im, int want) {
  int n = static_cast<int>(p_re.size());
  std::vector<Eigen::VectorXd> frame;
  auto g_inner = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return a.dot(gram * b);
  };
  std::vector<Eigen::VectorXd> kept;
  for (const Eigen::VectorXd& p : {p_re, p_im}) {
    Eigen::VectorXd v = p;
    for (const auto& u : kept) v -= g_inner(u, v) * u;
    double norm = std::sqrt(std::max(0.0, g_inner(v, v)));
    if (norm > 1e-12) kept.push_back(v / norm);
  }
  std::size_t protected_count = kept.size();
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd v = Eigen::VectorXd::Unit(n, j);
    for (const auto& u : kept) v -= g_inner(u, v) * u;
    double norm = std::sqrt(std::max(0.0, g_inner(v, v)));
    if (norm > 1e-8) kept.push_back(v / norm);
  }
  int have = static_cast<int>(kept.size() - protected_count);
  int take = (want < 0) ? have : std::min(want, have);
  Eigen::MatrixXd out(n, take);
  for (int j = 0; j < take; ++j) out.col(j) = kept[protected_count + j];
  return out;
}

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

FlowTrace trace_flow(const FlatSurface& surface, const FlowParams& params,
                     const Eigen::MatrixXd& classes) {
  if (!(params.t_start < params.t_end) || !(params.dt_sample > 0))
    fail(ErrorCode::BadParams, "invalid flow sampling window");
  if (!(params.fd_dt > 0) || !(params.h > 0))
    fail(ErrorCode::BadParams, "invalid flow discretization parameters");

  FlowTrace trace;
  trace.params = params;

  // Base frame at t_start: basis cycles, Gram, omega periods, classes.
  FlatSurface base = apply_flow(surface, params.t_start);
  Mesh mesh0 = refine_mesh(base, params.h, params.mesh);
  HarmonicBasis basis0 = harmonic_basis(mesh0);
  std::vector<CyclePath> cycles = cycle_paths(mesh0, basis0);
  trace.base_gram = hodge_gram(mesh0, basis0.cochains);
  omega_periods(mesh0, basis0, trace.omega_re, trace.omega_im);
  trace.class_periods =
      (classes.size() > 0)
          ? classes
          : default_classes(trace.base_gram, trace.omega_re, trace.omega_im,
                            params.classes);
  trace.class_count = static_cast<int>(trace.class_periods.cols());

  int steps = static_cast<int>(
      std::floor((params.t_end - params.t_start) / params.dt_sample + 1e-9));
  for (int i = 0; i <= steps; ++i) {
    double t = params.t_start + i * params.dt_sample;
    double tau = t - params.t_start;
    FlowSample sample;
    sample.t = t;
    sample.H = kNaN;
    sample.kappa = kNaN;
    sample.delta = kNaN;
    sample.area = kNaN;
    sample.dlog.assign(trace.class_count, kNaN);

    FlatSurface flowed = apply_flow(base, tau);
    sample.area = flowed.area;

    try {
      PADecomposition pad = build_pad(flowed, params.pad);
      sample.H = hourglass_ratio(pad).value;
    } catch (const SurfaceError& err) {
      add_flag(sample.flags, error_code_name(err.code()));
    }
    try {
      sample.kappa = systole(flowed).length;
    } catch (const SurfaceError& err) {
      add_flag(sample.flags, error_code_name(err.code()));
    }

    try {
      // Variational formula on the sample's own frame: smooth in t, unlike
      // re-meshed finite differences, which jump across Delaunay flip
      // boundaries (the FD estimator is cross-checked against this one in
      // the Hodge test suite).
      TransportFrame frame =
          transport_frame(flowed, tau, cycles, params.h, params.mesh);
      for (int j = 0; j < trace.class_count; ++j)
        sample.dlog[j] = frame_log_derivative(
            frame, trace.class_periods.col(j), params.quadrature);
      if (params.compute_gap)
        sample.delta = spectral_gap(frame.mesh, frame.basis).delta;
    } catch (const SurfaceError& err) {
      add_flag(sample.flags, error_code_name(err.code()));
    }

    trace.samples.push_back(std::move(sample));
  }
  return trace;
}

std::string trace_csv(const FlowTrace& trace) {
  std::ostringstream out;
  out << "t,H,kappa,delta,area";
  for (int j = 1; j <= trace.class_count; ++j) out << ",dlog_" << j;
  out << ",flags\n";
  for (const auto& sample : trace.samples) {
    out << format_value(sample.t) << ',' << format_value(sample.H) << ','
        << format_value(sample.kappa) << ',' << format_value(sample.delta)
        << ',' << format_value(sample.area);
    for (double d : sample.dlog) out << ',' << format_value(d);
    out << ',' << sample.flags << '\n';
  }
  return out.str();
}

std::pair<double, double> integral_h_squared(const FlowTrace& trace) {
  if (trace.samples.size() < 2)
    fail(ErrorCode::BadParams, "integral needs at least two samples");
  double ih = 0.0, ik = 0.0;
  for (std::size_t i = 1; i < trace.samples.size(); ++i) {
    const auto& a = trace.samples[i - 1];
    const auto& b = trace.samples[i];
    double dt = b.t - a.t;
    ih += 0.5 * dt * (a.H * a.H + b.H * b.H);
    ik += 0.5 * dt * (a.kappa * a.kappa + b.kappa * b.kappa);
  }
  return {ih, ik};
}

AuditResult hodge_gap_audit(const FlowTrace& trace) {
  const Eigen::MatrixXd& G = trace.base_gram;
  auto g_norm = [&](const Eigen::VectorXd& v) {
    return std::sqrt(std::max(0.0, v.dot(G * v)));
  };
  for (int j = 0; j < trace.class_periods.cols(); ++j) {
    Eigen::VectorXd a = trace.class_periods.col(j);
    for (const Eigen::VectorXd& p : {trace.omega_re, trace.omega_im}) {
      double cosine =
          std::abs(a.dot(G * p)) / std::max(g_norm(a) * g_norm(p), 1e-300);
      if (!(cosine <= 1e-6))
        fail(ErrorCode::OrthogonalizationFailed,
             "tracked class is not Hodge-orthogonal to the omega classes");
    }
  }

  AuditResult result;
  for (const auto& sample : trace.samples) {
    if (!sample.flags.empty()) continue;
    double worst = 0.0;
    bool ok = true;
    for (double d : sample.dlog) {
      if (!std::isfinite(d)) ok = false;
      worst = std::max(worst, std::abs(d));
    }
    if (!ok || !std::isfinite(sample.H) || !std::isfinite(sample.kappa))
      continue;
    result.margins.push_back((1.0 - worst) / (sample.H * sample.H));
    result.systole_margins.push_back((1.0 - worst) /
                                     (sample.kappa * sample.kappa));
  }
  if (result.margins.empty())
    fail(ErrorCode::BadParams, "no clean samples to audit");
  result.fitted_c = *std::min_element(result.margins.begin(),
                                      result.margins.end());
  result.systole_c = *std::min_element(result.systole_margins.begin(),
                                       result.systole_margins.end());
  auto finite_positive = [](const std::vector<double>& m) {
    for (double v : m)
      if (!std::isfinite(v) || !(v > 0.0)) return false;
    return true;
  };
  result.pass = finite_positive(result.margins);
  result.systole_pass = finite_positive(result.systole_margins);
  return result;
}

}  // namespace hourglass
