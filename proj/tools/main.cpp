#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hourglass/decomposition.hpp"
#include "hourglass/flat_geometry.hpp"
#include "hourglass/flow_trace.hpp"
#include "hourglass/laurent.hpp"
#include "hourglass/shells.hpp"
#include "hourglass/surface_io.hpp"
#include "hourglass/walkthrough.hpp"

namespace {

using namespace hourglass;
using json = nlohmann::json;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::EdgeLengthMismatch:
    case ErrorCode::UnmatchedEdge:
    case ErrorCode::NonSimplePolygon:
    case ErrorCode::OrientationError:
    case ErrorCode::BadParams:
    case ErrorCode::GlobalSquare:
    case ErrorCode::FormatError:
      return 1;
    case ErrorCode::FlipLimitExceeded:
    case ErrorCode::SearchBudgetExceeded:
    case ErrorCode::BudgetExceeded:
    case ErrorCode::BoundTooLarge:
      return 3;
    default:
      return 2;  // numeric failure
  }
}

/// Defaults, overridable by --config and then by command-line flags.
struct Config {
  double mu0 = 16.0;
  double B = 8.0;
  double h = 0.15;
  double t0 = 0.0;
  double t1 = 1.0;
  double dt = 0.1;
  bool gap = false;
  int classes = -1;
  int trials = 50;
  unsigned seed = 20260824;
  double richardson_tol = 0.05;
  std::string format = "report";
  std::string out;
};

void load_config(Config& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::FormatError, "cannot open config file " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    fail(ErrorCode::FormatError, std::string("config parse error: ") + e.what());
  }
  if (doc.contains("mu0")) cfg.mu0 = doc["mu0"].get<double>();
  if (doc.contains("B")) cfg.B = doc["B"].get<double>();
  if (doc.contains("h")) cfg.h = doc["h"].get<double>();
  if (doc.contains("t0")) cfg.t0 = doc["t0"].get<double>();
  if (doc.contains("t1")) cfg.t1 = doc["t1"].get<double>();
  if (doc.contains("dt")) cfg.dt = doc["dt"].get<double>();
  if (doc.contains("gap")) cfg.gap = doc["gap"].get<bool>();
  if (doc.contains("classes")) cfg.classes = doc["classes"].get<int>();
  if (doc.contains("trials")) cfg.trials = doc["trials"].get<int>();
  if (doc.contains("seed")) cfg.seed = doc["seed"].get<unsigned>();
  if (doc.contains("richardson_tol"))
    cfg.richardson_tol = doc["richardson_tol"].get<double>();
  if (doc.contains("format")) cfg.format = doc["format"].get<std::string>();
}

/// Named builtin surfaces or a JSON surface file.
///   torus | rect:a | octagon | pillowcase | genus2:S,s,L | <path>
FlatSurface load_surface(const std::string& name) {
  if (name == "torus" || name == "square-torus")
    return standard_surface(StandardFamily::SquareTorus);
  if (name == "octagon") return standard_surface(StandardFamily::RegularOctagon);
  if (name == "pillowcase") return standard_surface(StandardFamily::Pillowcase);
  if (name.rfind("rect:", 0) == 0)
    return standard_surface(StandardFamily::RectTorus,
                            std::stod(name.substr(5)), 1.0, true);
  if (name.rfind("genus2:", 0) == 0) {
    double S, s, L;
    if (std::sscanf(name.c_str() + 7, "%lf,%lf,%lf", &S, &s, &L) != 3)
      fail(ErrorCode::FormatError, "expected genus2:S,s,L");
    return genus2_example(S, s, L);
  }
  return build_surface(read_surface_file(name));
}

void emit(const Config& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(cfg.out, std::ios::binary);
  if (!out) fail(ErrorCode::FormatError, "cannot write " + cfg.out);
  out << text;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------

int cmd_build(const Config& cfg, const std::string& file) {
  FlatSurface surface = load_surface(file);
  std::ostringstream out;
  if (cfg.format == "csv") {
    out << "key,value\n";
    out << "name," << surface.name << "\n";
    out << "polygons," << surface.polygons.size() << "\n";
    out << "genus," << surface.genus << "\n";
    out << "area," << fmt(surface.area) << "\n";
    out << "square," << (surface.is_square ? 1 : 0) << "\n";
    out << "gauss_bonnet_defect," << fmt(surface.gauss_bonnet_defect()) << "\n";
    int i = 0;
    for (const auto& sing : surface.singularities)
      out << "cone_angle_" << i++ << "," << fmt(sing.cone_angle) << "\n";
  } else {
    out << "surface " << surface.name << "\n";
    out << "  polygons: " << surface.polygons.size() << "\n";
    out << "  genus: " << surface.genus << "\n";
    out << "  area: " << fmt(surface.area) << "\n";
    out << "  translation charts: " << (surface.is_square ? "yes" : "no")
        << "\n";
    out << "  Gauss-Bonnet defect: " << fmt(surface.gauss_bonnet_defect())
        << "\n";
    out << "  singular classes:\n";
    for (const auto& sing : surface.singularities)
      if (sing.is_cone_point() || sing.marked)
        out << "    cone angle " << fmt(sing.cone_angle)
            << (sing.marked ? " (marked)" : "") << "\n";
  }
  emit(cfg, out.str());
  return 0;
}

int cmd_decompose(const Config& cfg, const std::string& file) {
  FlatSurface surface = load_surface(file);
  PADParams params;
  params.mu0 = cfg.mu0;
  params.B = cfg.B;
  PADecomposition pad = build_pad(surface, params);
  std::ostringstream out;
  if (cfg.format == "csv") {
    out << "kind,index,modulus_or_radius,area\n";
    int i = 0;
    for (const auto& ann : pad.annuli)
      out << (ann.is_cylinder ? "cylinder" : "expanding") << ',' << i++ << ','
          << fmt(ann.is_cylinder ? ann.cylinder.modulus : ann.shell_radius)
          << ',' << fmt(0.0) << "\n";
    i = 0;
    for (const auto& piece : pad.pieces)
      out << "piece," << i++ << ',' << fmt(piece.size) << ','
          << fmt(piece.area) << "\n";
  } else {
    out << "primitive annuli decomposition of " << surface.name << "\n";
    out << "  annuli: " << pad.annuli.size() << "\n";
    for (const auto& ann : pad.annuli) {
      if (ann.is_cylinder)
        out << "    cylinder: core " << fmt(ann.cylinder.core_length)
            << " width " << fmt(ann.cylinder.width) << " modulus "
            << fmt(ann.cylinder.modulus) << "\n";
      else
        out << "    expanding annulus: shell radius " << fmt(ann.shell_radius)
            << "\n";
    }
    out << "  complementary pieces: " << pad.pieces.size() << "\n";
    for (const auto& piece : pad.pieces)
      out << "    piece: area " << fmt(piece.area) << " size "
          << fmt(piece.size) << "\n";
  }
  emit(cfg, out.str());
  return 0;
}

int cmd_hourglass(const Config& cfg, const std::string& file) {
  FlatSurface surface = load_surface(file);
  PADParams params;
  params.mu0 = cfg.mu0;
  params.B = cfg.B;
  PADecomposition pad = build_pad(surface, params);
  HourglassResult result = hourglass_ratio(pad);
  std::ostringstream out;
  if (cfg.format == "csv") {
    out << "H,witness_length,smaller_side_area\n";
    out << fmt(result.value) << ',' << fmt(result.witness_length) << ','
        << fmt(result.smaller_side_area) << "\n";
  } else {
    out << "hourglass ratio H = " << fmt(result.value) << "\n";
    out << "  witness length: " << fmt(result.witness_length) << "\n";
    out << "  smaller side area: " << fmt(result.smaller_side_area) << "\n";
  }
  emit(cfg, out.str());
  return 0;
}

int cmd_flow(const Config& cfg, const std::string& file) {
  FlatSurface surface = load_surface(file);
  FlowParams params;
  params.t_start = cfg.t0;
  params.t_end = cfg.t1;
  params.dt_sample = cfg.dt;
  params.h = cfg.h;
  params.compute_gap = cfg.gap;
  params.classes = cfg.classes;
  params.pad.mu0 = cfg.mu0;
  params.pad.B = cfg.B;
  params.quadrature.richardson_tol = cfg.richardson_tol;
  FlowTrace trace = trace_flow(surface, params);
  if (cfg.format == "csv") {
    emit(cfg, trace_csv(trace));
    return 0;
  }
  std::ostringstream out;
  out << "flow trace of " << surface.name << " over [" << fmt(cfg.t0) << ", "
      << fmt(cfg.t1) << "], " << trace.samples.size() << " samples, "
      << trace.class_count << " tracked classes";
  if (!surface.is_square)
    out << " (odd cohomology of the orienting cover)";
  out << "\n";
  out << trace_csv(trace);
  if (trace.samples.size() >= 2) {
    auto [ih, ik] = integral_h_squared(trace);
    out << "int H^2 dt = " << fmt(ih) << "\n";
    out << "int kappa^2 dt = " << fmt(ik) << "\n";
  }
  AuditResult audit = hodge_gap_audit(trace);
  out << "audit: fitted c = " << fmt(audit.fitted_c)
      << (audit.pass ? " PASS" : " FAIL") << "; systole c = "
      << fmt(audit.systole_c) << (audit.systole_pass ? " PASS" : " FAIL")
      << "\n";
  emit(cfg, out.str());
  return audit.pass ? 0 : 2;
}

int cmd_gap(const Config& cfg, const std::string& file) {
  FlatSurface surface = load_surface(file);
  Mesh mesh = refine_mesh(surface, cfg.h);
  SpectralGapResult gap = spectral_gap(mesh);
  std::ostringstream out;
  if (cfg.format == "csv") {
    out << "delta,gram_condition\n";
    out << fmt(gap.delta) << ',' << fmt(gap.gram_condition) << "\n";
  } else {
    out << "spectral gap delta = " << fmt(gap.delta) << "\n";
    out << "  mesh: " << mesh.triangle_count() << " triangles at h = "
        << fmt(cfg.h) << "\n";
    out << "  Gram condition: " << fmt(gap.gram_condition) << "\n";
    out << "  bound 2^(-1/2) = " << fmt(1.0 / std::sqrt(2.0)) << "\n";
  }
  emit(cfg, out.str());
  return 0;
}

int cmd_verify(const Config& cfg, const std::string& suite) {
  std::ostringstream out;
  bool all_pass = true;
  auto line = [&](const std::string& name, bool pass,
                  const std::string& detail) {
    out << (pass ? "PASS " : "FAIL ") << name << ": " << detail << "\n";
    all_pass = all_pass && pass;
  };
  std::mt19937 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  if (suite.empty() || suite == "cylinder") {
    const double lengths[] = {10.0, 20.0, 40.0};
    double worst[3] = {0.0, 0.0, 0.0};
    for (int trial = 0; trial < std::max(1, cfg.trials / 10); ++trial) {
      LaurentSeries draw = LaurentSeries::zero(3);
      for (int n = -3; n <= 3; ++n)
        draw.at(n) = std::complex<double>(unit(rng), unit(rng));
      // The same draw across aspect ratios, with the lemma's decay scale.
      for (int k = 0; k < 3; ++k) {
        double L = lengths[k];
        LaurentSeries series = LaurentSeries::zero(3);
        for (int n = -3; n <= 3; ++n)
          series.at(n) = draw.at(n) * std::exp(-std::abs(n) * L);
        worst[k] = std::max(
            worst[k], cylinder_lemma_check(series, {1.0, L}).c_sup);
      }
    }
    double c_min = std::min({worst[0], worst[1], worst[2]});
    double c_max = std::max({worst[0], worst[1], worst[2]});
    line("cylinder", c_max <= 4.0 * c_min,
         "sup constant in [" + fmt(c_min) + ", " + fmt(c_max) +
             "] over L/s in {10,20,40}");
  }

  if (suite.empty() || suite == "shells") {
    ShellPartition part = dyadic_shells(1.0, 0, 5);
    double worst = 0.0;
    for (int trial = 0; trial < cfg.trials; ++trial) {
      std::vector<std::complex<double>> coeff(7);
      for (auto& c : coeff) c = std::complex<double>(unit(rng), unit(rng));
      PlanarField f = [&coeff](std::complex<double> z) {
        std::complex<double> acc(0.0, 0.0);
        for (int n = -3; n <= 3; ++n) acc += coeff[n + 3] * std::pow(z, n);
        return acc;
      };
      // Midpoint polar quadrature of ||Im f||_2 over the annulus.
      double r_in = part.shells.back().r_in;
      double im_sq = 0.0;
      int nr = 200, na = 128;
      for (int ir = 0; ir < nr; ++ir) {
        double r = r_in + (ir + 0.5) * (1.0 - r_in) / nr;
        for (int ia = 0; ia < na; ++ia) {
          double th = 2.0 * std::numbers::pi * (ia + 0.5) / na;
          double v = f(std::polar(r, th)).imag();
          im_sq += v * v * r;
        }
      }
      im_sq *= (1.0 - r_in) / nr * 2.0 * std::numbers::pi / na;
      ShellsReport probe = shells_check(f, part, 1.0);
      double delta0 = std::max(probe.shell_sup[0], std::sqrt(im_sq));
      worst = std::max(worst, shells_check(f, part, delta0).c_l2);
    }
    line("shells", worst <= 20.0,
         "max L2 constant " + fmt(worst) + " over " +
             std::to_string(cfg.trials) + " trials");
  }

  if (suite.empty() || suite == "gradient") {
    PlanarField linear = [](std::complex<double> z) { return z; };
    double ratio =
        gradient_estimate_check(linear, {{0.0, 0.0}}, {1.0}, 1.0).max_ratio;
    double expected = 2.0 / std::sqrt(std::numbers::pi);
    line("gradient", std::abs(ratio - expected) < 1e-3,
         "f(z)=z disk ratio " + fmt(ratio) + " vs 2/sqrt(pi) = " +
             fmt(expected));
  }

  if (suite.empty() || suite == "walkthrough") {
    WalkthroughReport report = genus2_walkthrough(1.0, 0.01, 2.0);
    bool finite = true;
    for (const auto& row : report.rows)
      finite = finite && std::isfinite(row.area_ratio()) &&
               std::isfinite(row.boundary_ratio()) &&
               std::isfinite(row.l2_ratio());
    line("walkthrough",
         report.selected_case == 2 && report.integral_A_residual < 1e-8 &&
             finite,
         "case " + std::to_string(report.selected_case) +
             ", annulus residual " + fmt(report.integral_A_residual));
    out << "  region table (measured / predicted):\n";
    for (const auto& row : report.rows) {
      out << "    " << row.region << ": area " << fmt(row.area) << " / "
          << fmt(row.predicted_area) << ", boundary "
          << fmt(row.boundary_sup) << " / " << fmt(row.predicted_boundary)
          << ", |int g| " << fmt(row.integral_abs) << " / "
          << fmt(row.predicted_integral) << ", int |g|^2 " << fmt(row.l2)
          << " / " << fmt(row.predicted_l2) << "\n";
    }
  }

  emit(cfg, out.str());
  return all_pass ? 0 : 2;
}

int cmd_audit(const Config& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::FormatError, "cannot open trace " + path);
  std::string header;
  if (!std::getline(in, header) || header.rfind("t,H,kappa,delta,area", 0) != 0)
    fail(ErrorCode::FormatError, "not a flow trace CSV");
  std::vector<double> margins, sys_margins;
  std::string row;
  while (std::getline(in, row)) {
    if (row.empty()) continue;
    // The final column is the flags string; everything before it is numeric.
    std::size_t pos = row.rfind(',');
    if (pos == std::string::npos) fail(ErrorCode::FormatError, "short CSV row");
    if (pos + 1 < row.size()) continue;  // flagged row
    std::vector<std::string> cells;
    std::stringstream ss(row.substr(0, pos));
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() < 5) fail(ErrorCode::FormatError, "short CSV row");
    double H = std::stod(cells[1]);
    double kappa = std::stod(cells[2]);
    double worst = 0.0;
    bool finite = std::isfinite(H) && std::isfinite(kappa);
    for (std::size_t i = 5; i < cells.size(); ++i) {
      double d = std::stod(cells[i]);
      if (!std::isfinite(d)) finite = false;
      worst = std::max(worst, std::abs(d));
    }
    if (!finite) continue;
    margins.push_back((1.0 - worst) / (H * H));
    sys_margins.push_back((1.0 - worst) / (kappa * kappa));
  }
  if (margins.empty())
    fail(ErrorCode::BadParams, "no clean samples in the trace");
  double c = *std::min_element(margins.begin(), margins.end());
  double cs = *std::min_element(sys_margins.begin(), sys_margins.end());
  bool pass = c > 0.0 && cs > 0.0;
  std::ostringstream out;
  if (cfg.format == "csv") {
    out << "samples,fitted_c,systole_c,pass\n";
    out << margins.size() << ',' << fmt(c) << ',' << fmt(cs) << ','
        << (pass ? 1 : 0) << "\n";
  } else {
    out << "audit of " << path << ": " << margins.size()
        << " clean samples\n";
    out << "  fitted c (hourglass) = " << fmt(c) << "\n";
    out << "  fitted c (systole)   = " << fmt(cs) << "\n";
    out << "  " << (pass ? "PASS" : "FAIL") << "\n";
  }
  emit(cfg, out.str());
  return pass ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "flat-geometric invariants of half-translation surfaces: hourglass "
      "ratio, primitive annuli, spectral gap, flow traces and lemma "
      "harnesses"};
  app.require_subcommand(1);
  // `--h` is a documented mesh-target option; keep help on --help only.
  app.set_help_flag("--help", "print this help message and exit");

  Config cfg;
  std::string config_path;
  app.add_option("--config", config_path,
                 "JSON config with defaults (mu0, B, h, t0, t1, dt, gap, "
                 "classes, trials, seed, format)");
  app.add_option("--out", cfg.out, "write output to this path");
  app.add_option("--format", cfg.format, "csv|report")
      ->check(CLI::IsMember({"csv", "report"}));

  std::string surface_arg, suite, trace_path;

  CLI::App* build = app.add_subcommand("build", "validate and print invariants");
  build->add_option("file", surface_arg, "surface (builtin name or JSON file)")
      ->required();

  CLI::App* decompose =
      app.add_subcommand("decompose", "primitive annuli decomposition");
  decompose->add_option("file", surface_arg)->required();
  decompose->add_option("--mu0", cfg.mu0, "annulus admission threshold");
  decompose->add_option("--B", cfg.B, "level-circle offset factor");

  CLI::App* hourglass = app.add_subcommand("hourglass", "hourglass ratio");
  hourglass->add_option("file", surface_arg)->required();

  CLI::App* flow = app.add_subcommand("flow", "trace along the flow");
  flow->add_option("file", surface_arg)->required();
  flow->add_option("--t0", cfg.t0, "start time");
  flow->add_option("--t1", cfg.t1, "end time");
  flow->add_option("--dt", cfg.dt, "sample spacing");
  flow->add_option("--h", cfg.h, "mesh target");
  flow->add_flag("--gap", cfg.gap, "compute the spectral gap per sample");
  flow->add_option("--classes", cfg.classes, "number of tracked classes");

  CLI::App* gap = app.add_subcommand("gap", "spectral gap");
  gap->add_option("file", surface_arg)->required();
  gap->add_option("--h", cfg.h, "mesh target");

  CLI::App* verify =
      app.add_subcommand("verify-lemmas", "analytic lemma harnesses");
  verify->add_option("--suite", suite, "cylinder|shells|gradient|walkthrough")
      ->check(CLI::IsMember({"cylinder", "shells", "gradient", "walkthrough"}));
  verify->add_option("--trials", cfg.trials, "random trials");
  verify->add_option("--seed", cfg.seed, "random seed");

  CLI::App* audit = app.add_subcommand("audit", "audit a flow trace CSV");
  audit->add_option("trace", trace_path, "trace CSV file")->required();

  // Let the global --config/--out/--format flags appear after the subcommand.
  for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; }))
    sub->fallthrough();

  // Config file values are defaults; explicit flags override them. The file
  // is loaded before CLI11 parses, so it is scanned out of argv directly.
  try {
    argv = app.ensure_utf8(argv);
    for (int i = 1; i + 1 < argc; ++i)
      if (std::string(argv[i]) == "--config") load_config(cfg, argv[i + 1]);
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const hourglass::SurfaceError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return exit_code_for(err.code());
  }

  try {
    if (*build) return cmd_build(cfg, surface_arg);
    if (*decompose) return cmd_decompose(cfg, surface_arg);
    if (*hourglass) return cmd_hourglass(cfg, surface_arg);
    if (*flow) return cmd_flow(cfg, surface_arg);
    if (*gap) return cmd_gap(cfg, surface_arg);
    if (*verify) return cmd_verify(cfg, suite);
    if (*audit) return cmd_audit(cfg, trace_path);
  } catch (const hourglass::SurfaceError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return exit_code_for(err.code());
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 2;
  }
  return 0;
}
