#include <cmath>
#include <complex>
#include <random>

#include "doctest.h"
#include "hourglass/hodge.hpp"

using namespace hourglass;

namespace {

/// Harmonic representative whose constant form is (closest to) the given
/// global covector. Exact on translation charts when the covector is the
/// form of a global harmonic 1-form.
Cochain1 project_field(const Mesh& mesh, const HarmonicBasis& basis, Vec2 target) {
  int n = static_cast<int>(basis.cochains.size());
  Eigen::VectorXd rhs(n);
  for (int i = 0; i < n; ++i) {
    std::vector<Vec2> form = constant_form(mesh, basis.cochains[i]);
    double m = 0.0;
    for (int t = 0; t < mesh.triangle_count(); ++t)
      if (mesh.tri.triangles[t].alive)
        m += mesh.tri.triangles[t].area() * form[t].dot(target);
    rhs[i] = m;
  }
  Eigen::MatrixXd gram = hodge_gram(mesh, basis.cochains);
  Eigen::VectorXd a = gram.ldlt().solve(rhs);
  Cochain1 out = Eigen::VectorXd::Zero(mesh.edge_count());
  for (int i = 0; i < n; ++i) out += a[i] * basis.cochains[i];
  return out;
}

double max_form_error(const Mesh& mesh, const Cochain1& c, Vec2 target) {
  std::vector<Vec2> form = constant_form(mesh, c);
  double err = 0.0;
  for (int t = 0; t < mesh.triangle_count(); ++t)
    if (mesh.tri.triangles[t].alive)
      err = std::max(err, (form[t] - target).norm());
  return err;
}

}  // namespace

TEST_CASE("torus harmonic basis") {
  FlatSurface t = standard_surface(StandardFamily::SquareTorus);
  Mesh mesh = refine_mesh(t, 0.15);
  HarmonicBasis basis = harmonic_basis(mesh);
  REQUIRE(basis.cochains.size() == 2);
  CHECK(basis.closed_residual < 1e-9);
  CHECK(basis.coclosed_residual < 1e-8);
  CHECK((basis.pairing - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-9);

  // Unimodular homology basis on a unit-area torus: det of the dual Gram is 1.
  Eigen::MatrixXd gram = hodge_gram(mesh, basis.cochains);
  CHECK(gram.determinant() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK((gram - gram.transpose()).norm() < 1e-10);
}

TEST_CASE("square torus side-aligned duals have identity Gram") {
  FlatSurface t = standard_surface(StandardFamily::SquareTorus);
  Mesh mesh = refine_mesh(t, 0.15);
  HarmonicBasis basis = harmonic_basis(mesh);
  Cochain1 cx = project_field(mesh, basis, {1, 0});
  Cochain1 cy = project_field(mesh, basis, {0, 1});
  CHECK(max_form_error(mesh, cx, {1, 0}) < 1e-8);
  CHECK(max_form_error(mesh, cy, {0, 1}) < 1e-8);
  Eigen::MatrixXd gram = hodge_gram(mesh, {cx, cy});
  CHECK((gram - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-4);
}

TEST_CASE("aspect-2 torus cycle-normalized Gram is diag(1/2, 2)") {
  double a = std::sqrt(2.0), b = 1.0 / std::sqrt(2.0);
  FlatSurface t = standard_surface(StandardFamily::RectTorus, a, b);
  Mesh mesh = refine_mesh(t, 0.15);
  HarmonicBasis basis = harmonic_basis(mesh);
  // Duals of the two lattice cycles: dx/a has period 1 over the horizontal
  // side, dy/b over the vertical one.
  Cochain1 u1 = project_field(mesh, basis, {1.0 / a, 0});
  Cochain1 u2 = project_field(mesh, basis, {0, 1.0 / b});
  Eigen::MatrixXd gram = hodge_gram(mesh, {u1, u2});
  CHECK(gram(0, 0) == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(gram(1, 1) == doctest::Approx(2.0).epsilon(1e-3));
  CHECK(std::abs(gram(0, 1)) < 1e-6);
  CHECK(gram(1, 1) / gram(0, 0) == doctest::Approx(4.0).epsilon(1e-3));
}

TEST_CASE("gram transforms by congruence") {
  FlatSurface o = standard_surface(StandardFamily::RegularOctagon);
  Mesh mesh = refine_mesh(o, 0.35);
  HarmonicBasis basis = harmonic_basis(mesh);
  REQUIRE(basis.cochains.size() == 4);
  CHECK((basis.pairing - Eigen::MatrixXd::Identity(4, 4)).norm() < 1e-8);
  CHECK(basis.closed_residual < 1e-8);
  CHECK(basis.coclosed_residual < 1e-7);

  Eigen::MatrixXd gram = hodge_gram(mesh, basis.cochains);
  CHECK((gram - gram.transpose()).norm() < 1e-10);

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  Eigen::MatrixXd a(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a(i, j) = unif(rng);
  std::vector<Cochain1> transformed;
  for (int j = 0; j < 4; ++j) {
    Cochain1 c = Eigen::VectorXd::Zero(mesh.edge_count());
    for (int i = 0; i < 4; ++i) c += a(i, j) * basis.cochains[i];
    transformed.push_back(c);
  }
  Eigen::MatrixXd lhs = hodge_gram(mesh, transformed);
  Eigen::MatrixXd rhs = a.transpose() * gram * a;
  CHECK((lhs - rhs).norm() < 1e-8 * std::max(1.0, rhs.norm()));
}

TEST_CASE("hodge star on the torus") {
  FlatSurface t = standard_surface(StandardFamily::SquareTorus);
  Mesh mesh = refine_mesh(t, 0.15);
  HarmonicBasis basis = harmonic_basis(mesh);
  Cochain1 cx = project_field(mesh, basis, {1, 0});
  Cochain1 cy = project_field(mesh, basis, {0, 1});
  Cochain1 sx = hodge_star(mesh, basis, cx);
  CHECK((sx - cy).cwiseAbs().maxCoeff() < 1e-8);
  Cochain1 ssx = hodge_star(mesh, basis, sx);
  CHECK((ssx + cx).cwiseAbs().maxCoeff() < 1e-8);
  // Star is an isometry on the harmonic span.
  CHECK(hodge_inner(mesh, sx, sx) ==
        doctest::Approx(hodge_inner(mesh, cx, cx)).epsilon(1e-9));
}

TEST_CASE("forni derivative extremes") {
  for (auto family : {StandardFamily::SquareTorus, StandardFamily::RegularOctagon}) {
    FlatSurface s = standard_surface(family);
    Mesh mesh = refine_mesh(s, family == StandardFamily::SquareTorus ? 0.15 : 0.3);
    HarmonicBasis basis = harmonic_basis(mesh);
    Cochain1 cx = project_field(mesh, basis, {1, 0});
    Cochain1 cy = project_field(mesh, basis, {0, 1});
    CHECK(forni_derivative(mesh, cx) == doctest::Approx(-1.0).epsilon(1e-3));
    CHECK(forni_derivative(mesh, cy) == doctest::Approx(1.0).epsilon(1e-3));
  }
}

TEST_CASE("log-derivative identity 1 - 2 delta^2") {
  FlatSurface o = standard_surface(StandardFamily::RegularOctagon);
  Mesh mesh = refine_mesh(o, 0.3);
  std::mt19937 rng(12345);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (double delta : {0.05, 0.2, 0.5}) {
    std::complex<double> phase(std::sqrt(1.0 - delta * delta), delta);
    for (int trial = 0; trial < 20; ++trial) {
      MeromorphicField f;
      f.value = Eigen::VectorXcd::Zero(mesh.triangle_count());
      for (int t = 0; t < mesh.triangle_count(); ++t)
        if (mesh.tri.triangles[t].alive) f.value[t] = phase * unif(rng);
      f.provenance = "synthetic";
      double d = field_log_derivative(mesh, f);
      CHECK(d == doctest::Approx(-(1.0 - 2.0 * delta * delta)).epsilon(1e-3));
    }
  }
}

TEST_CASE("spectral gap on the octagon") {
  FlatSurface o = standard_surface(StandardFamily::RegularOctagon);
  Mesh mesh = refine_mesh(o, 0.3);
  SpectralGapResult gap = spectral_gap(mesh);
  CHECK(gap.delta <= std::pow(2.0, -0.5) + 1e-6);
  CHECK(gap.delta >= 0.05);
  CHECK(gap.gram_condition >= 1.0);
  CHECK(gap.argmin.value.size() == mesh.triangle_count());
}

TEST_CASE("torus spectral gap degenerates to constants") {
  FlatSurface t = standard_surface(StandardFamily::SquareTorus);
  Mesh mesh = refine_mesh(t, 0.2);
  CHECK_THROWS_AS(spectral_gap(mesh), SurfaceError);
}

TEST_CASE("genus-2 spectral gap is admissible") {
  FlatSurface g = genus2_example(1.0, 0.1, 2.0);
  Mesh mesh = refine_mesh(g, 0.2);
  SpectralGapResult gap = spectral_gap(mesh);
  CHECK(gap.delta <= std::pow(2.0, -0.5) + 1e-6);
  CHECK(gap.delta > 0.0);
}

TEST_CASE("transported norm at time zero matches the Hodge norm") {
  FlatSurface t = standard_surface(StandardFamily::SquareTorus);
  Mesh mesh = refine_mesh(t, 0.15);
  HarmonicBasis basis = harmonic_basis(mesh);
  Cochain1 cx = project_field(mesh, basis, {1, 0});
  std::vector<CyclePath> paths = cycle_paths(mesh, basis);
  Eigen::VectorXd periods = cycle_periods(basis, cx);
  double direct = std::sqrt(hodge_inner(mesh, cx, cx));
  double transported = transported_norm(t, paths, periods, 0.0, 0.15);
  CHECK(transported == doctest::Approx(direct).epsilon(1e-6));
}

TEST_CASE("finite-difference flow derivative matches the variational one") {
  FlatSurface t = standard_surface(StandardFamily::SquareTorus);
  Mesh mesh = refine_mesh(t, 0.12);
  HarmonicBasis basis = harmonic_basis(mesh);
  Cochain1 cx = project_field(mesh, basis, {1, 0});
  std::vector<CyclePath> paths = cycle_paths(mesh, basis);
  Eigen::VectorXd periods = cycle_periods(basis, cx);
  double dt = 1e-3;
  double fd = flow_derivative_fd(t, paths, periods, dt, 0.12);
  double variational = forni_derivative(mesh, cx);
  CHECK(std::abs(fd - variational) <= std::max(1e-2, 10 * dt * dt));
  CHECK(fd == doctest::Approx(-1.0).epsilon(2e-2));
}

TEST_CASE("odd/even split of the pillowcase cover") {
  FlatSurface p = standard_surface(StandardFamily::Pillowcase);
  FlatSurface cover = orienting_double_cover(p);
  Mesh mesh = refine_mesh(cover, 0.3);
  HarmonicBasis basis = harmonic_basis(mesh);
  REQUIRE(basis.cochains.size() == 2);
  OddEvenSplit split = odd_even_split(mesh, basis);
  CHECK(split.residual < 1e-6);
  CHECK(split.odd.size() == 2);
  CHECK(split.even.size() == 0);
}

TEST_CASE("odd/even split requires a deck involution") {
  FlatSurface t = standard_surface(StandardFamily::SquareTorus);
  Mesh mesh = refine_mesh(t, 0.25);
  HarmonicBasis basis = harmonic_basis(mesh);
  CHECK_THROWS_AS(odd_even_split(mesh, basis), SurfaceError);
}
