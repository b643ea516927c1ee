#include "hourglass/hodge.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "hourglass/geodesics.hpp"

namespace hourglass {

namespace {

using Crossing = std::pair<int, int>;  // (edge id, target face)

/// Tree structure from a BFS: parent node and the connecting edge.
struct BfsTree {
  std::vector<int> parent;
  std::vector<int> parent_edge;
  std::vector<int> depth;
};

BfsTree bfs_tree(int nodes, const std::vector<std::vector<std::pair<int, int>>>& adj,
                 int root) {
  BfsTree tree;
  tree.parent.assign(nodes, -1);
  tree.parent_edge.assign(nodes, -1);
  tree.depth.assign(nodes, -1);
  std::deque<int> queue{root};
  tree.depth[root] = 0;
  while (!queue.empty()) {
    int n = queue.front();
    queue.pop_front();
    for (auto [other, edge] : adj[n]) {
      if (tree.depth[other] >= 0) continue;
      tree.depth[other] = tree.depth[n] + 1;
      tree.parent[other] = n;
      tree.parent_edge[other] = edge;
      queue.push_back(other);
    }
  }
  return tree;
}

/// Face crossings along the dual-tree path from face a to face b.
std::vector<Crossing> dual_path(const BfsTree& tree, int a, int b) {
  std::vector<Crossing> down, up;  // a -> lca, then lca -> b
  int x = a, y = b;
  while (tree.depth[x] > tree.depth[y]) {
    down.push_back({tree.parent_edge[x], tree.parent[x]});
    x = tree.parent[x];
  }
  while (tree.depth[y] > tree.depth[x]) {
    up.push_back({tree.parent_edge[y], y});
    y = tree.parent[y];
  }
  while (x != y) {
    down.push_back({tree.parent_edge[x], tree.parent[x]});
    x = tree.parent[x];
    up.push_back({tree.parent_edge[y], y});
    y = tree.parent[y];
  }
  std::reverse(up.begin(), up.end());
  down.insert(down.end(), up.begin(), up.end());
  return down;
}

/// Directed edge steps (edge id, +-1) along the primal-tree path from vertex
/// a to vertex b.
std::vector<std::pair<int, int>> primal_path(const Mesh& mesh, const BfsTree& tree,
                                             int a, int b) {
  auto step_to_parent = [&](int v) {
    int e = tree.parent_edge[v];
    int sign = (mesh.edges[e].va == v) ? 1 : -1;
    return std::pair<int, int>{e, sign};
  };
  std::vector<std::pair<int, int>> down, up;
  int x = a, y = b;
  while (tree.depth[x] > tree.depth[y]) {
    down.push_back(step_to_parent(x));
    x = tree.parent[x];
  }
  while (tree.depth[y] > tree.depth[x]) {
    auto [e, s] = step_to_parent(y);
    up.push_back({e, -s});
    y = tree.parent[y];
  }
  while (x != y) {
    down.push_back(step_to_parent(x));
    x = tree.parent[x];
    auto [e, s] = step_to_parent(y);
    up.push_back({e, -s});
    y = tree.parent[y];
  }
  std::reverse(up.begin(), up.end());
  down.insert(down.end(), up.begin(), up.end());
  return down;
}

Eigen::VectorXd d0_transpose_w(const Mesh& mesh, const Eigen::VectorXd& x) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(mesh.vertex_count());
  for (int e = 0; e < mesh.edge_count(); ++e) {
    double wx = mesh.edges[e].weight * x[e];
    out[mesh.edges[e].vb] += wx;
    out[mesh.edges[e].va] -= wx;
  }
  return out;
}

/// Distance estimate from a triangle's centroid to the singular set.
std::vector<double> triangle_singular_distance(const Mesh& mesh) {
  std::vector<double> dist(mesh.tri.triangles.size(),
                           std::numeric_limits<double>::infinity());
  for (size_t t = 0; t < mesh.tri.triangles.size(); ++t) {
    const auto& tr = mesh.tri.triangles[t];
    if (!tr.alive) continue;
    Vec2 c = tr.centroid();
    for (int k = 0; k < 3; ++k) {
      double d = mesh.vertex_dist[tr.vertex[k]] + (c - tr.corner[k]).norm();
      dist[t] = std::min(dist[t], d);
    }
  }
  return dist;
}

double base_exclusion_radius(const Mesh& mesh, const QuadratureParams& params) {
  double h = mesh.h;
  if (!(h > 0.0)) {
    double total = 0.0;
    for (const auto& e : mesh.edges) total += e.length;
    h = mesh.edges.empty() ? 1.0 : total / mesh.edge_count();
  }
  return params.eps_factor * h;
}

}  // namespace

HarmonicBasis harmonic_basis(const Mesh& mesh) {
  int nv = mesh.vertex_count();
  int ne = mesh.edge_count();
  int nf = mesh.triangle_count();

  // Primal spanning tree over vertices.
  std::vector<std::vector<std::pair<int, int>>> vadj(nv);
  for (int e = 0; e < ne; ++e) {
    vadj[mesh.edges[e].va].push_back({mesh.edges[e].vb, e});
    vadj[mesh.edges[e].vb].push_back({mesh.edges[e].va, e});
  }
  BfsTree primal = bfs_tree(nv, vadj, 0);
  std::vector<char> in_primal(ne, 0);
  for (int v = 0; v < nv; ++v)
    if (primal.parent_edge[v] >= 0) in_primal[primal.parent_edge[v]] = 1;

  // Dual spanning tree over faces, avoiding primal tree edges.
  std::vector<std::vector<std::pair<int, int>>> fadj(nf);
  for (int e = 0; e < ne; ++e) {
    if (in_primal[e]) continue;
    fadj[mesh.edges[e].t].push_back({mesh.edges[e].u, e});
    fadj[mesh.edges[e].u].push_back({mesh.edges[e].t, e});
  }
  BfsTree dual = bfs_tree(nf, fadj, 0);
  std::vector<char> in_dual(ne, 0);
  for (int f = 0; f < nf; ++f)
    if (dual.parent_edge[f] >= 0) in_dual[dual.parent_edge[f]] = 1;

  std::vector<int> generators;
  for (int e = 0; e < ne; ++e)
    if (!in_primal[e] && !in_dual[e]) generators.push_back(e);
  int n = static_cast<int>(generators.size());
  if (n != ne - (nv - 1) - (nf - 1))
    fail(ErrorCode::SolverFailure, "tree-cotree generator count mismatch");

  HarmonicBasis basis;
  if (n == 0) return basis;

  // Cotan Laplacian with vertex 0 pinned.
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(4 * ne);
  for (const auto& e : mesh.edges) {
    int a = e.va - 1, b = e.vb - 1;
    if (a >= 0) trips.push_back({a, a, e.weight});
    if (b >= 0) trips.push_back({b, b, e.weight});
    if (a >= 0 && b >= 0) {
      trips.push_back({a, b, -e.weight});
      trips.push_back({b, a, -e.weight});
    }
  }
  Eigen::SparseMatrix<double> lap(nv - 1, nv - 1);
  lap.setFromTriplets(trips.begin(), trips.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(lap);
  if (solver.info() != Eigen::Success)
    fail(ErrorCode::SolverFailure, "cotan Laplacian factorization failed");

  std::vector<Cochain1> raw(n);
  for (int j = 0; j < n; ++j) {
    int g = generators[j];
    // Dual loop: tree path owner -> neighbor, closed through the generator.
    Eigen::VectorXd z = Eigen::VectorXd::Zero(ne);
    std::vector<Crossing> crossings =
        dual_path(dual, mesh.edges[g].t, mesh.edges[g].u);
    crossings.push_back({g, mesh.edges[g].t});
    for (auto [e, target] : crossings)
      z[e] += (mesh.edges[e].t == target) ? 1.0 : -1.0;

    Eigen::VectorXd rhs = d0_transpose_w(mesh, z).tail(nv - 1);
    Eigen::VectorXd u_red = solver.solve(rhs);
    if (solver.info() != Eigen::Success)
      fail(ErrorCode::SolverFailure, "harmonic projection solve failed");
    Eigen::VectorXd u = Eigen::VectorXd::Zero(nv);
    u.tail(nv - 1) = u_red;

    Eigen::VectorXd h = z;
    for (int e = 0; e < ne; ++e)
      h[e] -= u[mesh.edges[e].vb] - u[mesh.edges[e].va];
    raw[j] = h;
  }

  // Ordered cycle loops, one per generator.
  basis.cycles.resize(n);
  for (int j = 0; j < n; ++j) {
    int g = generators[j];
    basis.cycles[j].push_back({g, 1});
    auto tail = primal_path(mesh, primal, mesh.edges[g].vb, mesh.edges[g].va);
    basis.cycles[j].insert(basis.cycles[j].end(), tail.begin(), tail.end());
  }

  // Normalize to the pairing-dual basis.
  Eigen::MatrixXd pairing(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      double p = 0.0;
      for (auto [e, s] : basis.cycles[k]) p += s * raw[i][e];
      pairing(i, k) = p;
    }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(pairing.transpose());
  if (!lu.isInvertible())
    fail(ErrorCode::SolverFailure, "degenerate period pairing");
  Eigen::MatrixXd coeff = lu.inverse();  // basis_new_j = sum_i coeff(j, i) raw_i
  basis.cochains.assign(n, Eigen::VectorXd::Zero(ne));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) basis.cochains[j] += coeff(j, i) * raw[i];

  basis.pairing.resize(n, n);
  double scale = 0.0;
  for (const auto& h : basis.cochains) scale = std::max(scale, h.cwiseAbs().maxCoeff());
  scale = std::max(scale, 1.0);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      double p = 0.0;
      for (auto [e, s] : basis.cycles[k]) p += s * basis.cochains[i][e];
      basis.pairing(i, k) = p;
    }

  for (const auto& h : basis.cochains) {
    for (int f = 0; f < nf; ++f) {
      double d1 = 0.0;
      for (int k = 0; k < 3; ++k) d1 += mesh.edge_sign[f][k] * h[mesh.edge_of[f][k]];
      basis.closed_residual = std::max(basis.closed_residual, std::abs(d1) / scale);
    }
    Eigen::VectorXd div = d0_transpose_w(mesh, h);
    basis.coclosed_residual =
        std::max(basis.coclosed_residual, div.cwiseAbs().maxCoeff() / scale);
  }
  return basis;
}

std::vector<Vec2> constant_form(const Mesh& mesh, const Cochain1& c) {
  std::vector<Vec2> form(mesh.tri.triangles.size());
  for (size_t t = 0; t < mesh.tri.triangles.size(); ++t) {
    const auto& tr = mesh.tri.triangles[t];
    if (!tr.alive) continue;
    Vec2 e0 = tr.corner[1] - tr.corner[0];
    Vec2 e1 = tr.corner[2] - tr.corner[1];
    double y0 = mesh.edge_sign[t][0] * c[mesh.edge_of[t][0]];
    double y1 = mesh.edge_sign[t][1] * c[mesh.edge_of[t][1]];
    double det = e0.cross(e1);
    form[t] = {(y0 * e1.y - y1 * e0.y) / det, (y1 * e0.x - y0 * e1.x) / det};
  }
  return form;
}

double hodge_inner(const Mesh& mesh, const Cochain1& a, const Cochain1& b) {
  std::vector<Vec2> fa = constant_form(mesh, a);
  std::vector<Vec2> fb = constant_form(mesh, b);
  double sum = 0.0;
  for (size_t t = 0; t < mesh.tri.triangles.size(); ++t)
    if (mesh.tri.triangles[t].alive)
      sum += mesh.tri.triangles[t].area() * fa[t].dot(fb[t]);
  return sum;
}

Eigen::MatrixXd hodge_gram(const Mesh& mesh, const std::vector<Cochain1>& basis) {
  int n = static_cast<int>(basis.size());
  std::vector<std::vector<Vec2>> forms(n);
  for (int i = 0; i < n; ++i) forms[i] = constant_form(mesh, basis[i]);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(n, n);
  for (size_t t = 0; t < mesh.tri.triangles.size(); ++t) {
    if (!mesh.tri.triangles[t].alive) continue;
    double area = mesh.tri.triangles[t].area();
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        double v = area * forms[i][t].dot(forms[j][t]);
        gram(i, j) += v;
        if (j != i) gram(j, i) += v;
      }
  }
  return gram;
}

Cochain1 hodge_star(const Mesh& mesh, const HarmonicBasis& basis,
                    const Cochain1& c) {
  int n = static_cast<int>(basis.cochains.size());
  if (n == 0) fail(ErrorCode::SolverFailure, "empty harmonic basis");
  std::vector<Vec2> alpha = constant_form(mesh, c);
  std::vector<std::vector<Vec2>> forms(n);
  for (int i = 0; i < n; ++i) forms[i] = constant_form(mesh, basis.cochains[i]);
  Eigen::VectorXd rhs(n);
  for (int i = 0; i < n; ++i) {
    double m = 0.0;
    for (size_t t = 0; t < mesh.tri.triangles.size(); ++t)
      if (mesh.tri.triangles[t].alive)
        m += mesh.tri.triangles[t].area() * forms[i][t].dot(alpha[t].perp());
    rhs[i] = m;
  }
  Eigen::MatrixXd gram = hodge_gram(mesh, basis.cochains);
  Eigen::VectorXd a = gram.ldlt().solve(rhs);
  Cochain1 out = Eigen::VectorXd::Zero(mesh.edge_count());
  for (int i = 0; i < n; ++i) out += a[i] * basis.cochains[i];
  return out;
}

Eigen::VectorXd cycle_periods(const HarmonicBasis& basis, const Cochain1& c) {
  int n = static_cast<int>(basis.cycles.size());
  Eigen::VectorXd out(n);
  for (int k = 0; k < n; ++k) {
    double p = 0.0;
    for (auto [e, s] : basis.cycles[k]) p += s * c[e];
    out[k] = p;
  }
  return out;
}

MeromorphicField holomorphic_field(const Mesh& mesh, const Cochain1& c) {
  std::vector<Vec2> alpha = constant_form(mesh, c);
  MeromorphicField field;
  field.value = Eigen::VectorXcd::Zero(mesh.triangle_count());
  for (int t = 0; t < mesh.triangle_count(); ++t)
    if (mesh.tri.triangles[t].alive)
      field.value[t] = std::complex<double>(alpha[t].x, -alpha[t].y);
  field.provenance = "holomorphic_partner";
  return field;
}

double field_log_derivative(const Mesh& mesh, const MeromorphicField& f,
                            const QuadratureParams& params) {
  std::vector<double> dist = triangle_singular_distance(mesh);
  double eps0 = base_exclusion_radius(mesh, params);
  auto ratio = [&](double eps) {
    double num = 0.0, den = 0.0;
    for (int t = 0; t < mesh.triangle_count(); ++t) {
      if (!mesh.tri.triangles[t].alive || dist[t] < eps) continue;
      double area = mesh.tri.triangles[t].area();
      std::complex<double> v = f.value[t];
      num += area * (v * v).real();
      den += area * std::norm(v);
    }
    if (den <= 0.0)
      fail(ErrorCode::QuadratureUnstable, "field vanishes on the quadrature domain");
    return -num / den;
  };
  double r1 = ratio(eps0), r2 = ratio(2 * eps0), r4 = ratio(4 * eps0);
  double extr_fine = 2 * r1 - r2;
  double extr_coarse = 2 * r2 - r4;
  if (std::abs(extr_fine - extr_coarse) >
      params.richardson_tol * std::max(1.0, std::abs(extr_fine)))
    fail(ErrorCode::QuadratureUnstable,
         "epsilon extrapolation disagrees beyond tolerance");
  return extr_fine;
}

double forni_derivative(const Mesh& mesh, const Cochain1& c,
                        const QuadratureParams& params) {
  return field_log_derivative(mesh, holomorphic_field(mesh, c), params);
}

SpectralGapResult spectral_gap(const Mesh& mesh) {
  return spectral_gap(mesh, harmonic_basis(mesh));
}

SpectralGapResult spectral_gap(const Mesh& mesh, const HarmonicBasis& basis) {
  int n = static_cast<int>(basis.cochains.size());
  if (n == 0)
    fail(ErrorCode::GramIllConditioned, "no harmonic forms on this surface");
  int nt = mesh.triangle_count();

  std::vector<Eigen::VectorXcd> fields(n);
  for (int i = 0; i < n; ++i)
    fields[i] = holomorphic_field(mesh, basis.cochains[i]).value;

  std::vector<double> dist = triangle_singular_distance(mesh);
  // Surface-intrinsic exclusion radius: tying it to the mesh size makes the
  // quadrature domain grow under refinement and the minimum drift with h; a
  // fixed fraction of the area scale keeps delta stable under h -> h/2.
  double surface_area = 0.0;
  for (int t = 0; t < nt; ++t)
    if (mesh.tri.triangles[t].alive)
      surface_area += mesh.tri.triangles[t].area();
  double eps0 = 0.02 * std::sqrt(surface_area);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(nt);
  double total = 0.0;
  for (int t = 0; t < nt; ++t) {
    if (!mesh.tri.triangles[t].alive || dist[t] < eps0) continue;
    w[t] = mesh.tri.triangles[t].area();
    total += w[t];
  }
  if (total <= 0.0)
    fail(ErrorCode::QuadratureUnstable, "exclusion removed the whole surface");

  // Real span of eta_i eta_j / omega^2 and i-multiples, constants projected out.
  std::vector<Eigen::VectorXcd> gens;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      Eigen::VectorXcd p = fields[i].cwiseProduct(fields[j]);
      gens.push_back(p);
      gens.push_back(std::complex<double>(0.0, 1.0) * p);
    }
  double raw_scale = 0.0;
  for (auto& g : gens) {
    double norm2 = 0.0;
    for (int t = 0; t < nt; ++t) norm2 += w[t] * std::norm(g[t]);
    raw_scale = std::max(raw_scale, norm2);
    std::complex<double> mean(0.0, 0.0);
    for (int t = 0; t < nt; ++t) mean += w[t] * g[t];
    mean /= total;
    for (int t = 0; t < nt; ++t) g[t] -= mean;
  }

  int m = static_cast<int>(gens.size());
  Eigen::MatrixXd gm(m, m), ga(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = a; b < m; ++b) {
      double full = 0.0, imag = 0.0;
      for (int t = 0; t < nt; ++t) {
        if (w[t] == 0.0) continue;
        full += w[t] * (gens[a][t] * std::conj(gens[b][t])).real();
        imag += w[t] * gens[a][t].imag() * gens[b][t].imag();
      }
      gm(a, b) = gm(b, a) = full;
      ga(a, b) = ga(b, a) = imag;
    }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gm);
  double lmax = es.eigenvalues().maxCoeff();
  if (!(lmax > 1e-10 * raw_scale))
    fail(ErrorCode::GramIllConditioned, "search space collapsed to constants");
  std::vector<int> kept;
  for (int i = 0; i < m; ++i)
    if (es.eigenvalues()[i] > 1e-10 * lmax) kept.push_back(i);
  if (kept.empty())
    fail(ErrorCode::GramIllConditioned, "search space collapsed to constants");

  Eigen::MatrixXd reduce(m, static_cast<int>(kept.size()));
  double lmin = lmax;
  for (size_t k = 0; k < kept.size(); ++k) {
    double lam = es.eigenvalues()[kept[k]];
    lmin = std::min(lmin, lam);
    reduce.col(k) = es.eigenvectors().col(kept[k]) / std::sqrt(lam);
  }
  Eigen::MatrixXd small = reduce.transpose() * ga * reduce;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es2((small + small.transpose()) / 2);

  SpectralGapResult out;
  double lam0 = std::max(0.0, es2.eigenvalues()[0]);
  out.delta = std::sqrt(lam0);
  out.gram_condition = lmax / lmin;
  Eigen::VectorXd coeff = reduce * es2.eigenvectors().col(0);
  out.argmin.value = Eigen::VectorXcd::Zero(nt);
  for (int a = 0; a < m; ++a) out.argmin.value += coeff[a] * gens[a];
  out.argmin.provenance = "spectral_gap_argmin";
  return out;
}

namespace {

Vec2 involution_point(const FlatSurface& surface, int polygon, Vec2 p,
                      int* out_polygon) {
  *out_polygon = surface.involution_polygon[polygon];
  return -p;
}

}  // namespace

std::vector<CyclePath> cycle_paths(const Mesh& mesh, const HarmonicBasis& basis) {
  std::vector<CyclePath> out;
  for (const auto& cycle : basis.cycles) {
    CyclePath path;
    for (auto [e, s] : cycle) {
      const MeshEdge& edge = mesh.edges[e];
      const auto& tr = mesh.tri.triangles[edge.t];
      ChartSegment seg;
      seg.polygon = tr.source_polygon;
      seg.a = tr.to_polygon(tr.corner[edge.e]);
      seg.b = tr.to_polygon(tr.corner[(edge.e + 1) % 3]);
      if (s < 0) std::swap(seg.a, seg.b);
      path.push_back(seg);
    }
    out.push_back(path);
  }
  return out;
}

double integrate_segment(const Mesh& mesh, const std::vector<Vec2>& form,
                         const ChartSegment& seg) {
  Vec2 d = seg.b - seg.a;
  double len = d.norm();
  if (len < 1e-14) return 0.0;
  Vec2 u = d * (1.0 / len);
  const FlatSurface& surface = *mesh.tri.surface;
  double probe = 1e-6 * len;  // direction probe, large enough to beat rounding

  // Endpoint nudges escalate when the fold near a polygon corner is
  // ambiguous; lateral offsets escape walks that run exactly along mesh
  // edges. Skipped end caps are re-added from the local constant form.
  const double nudges[3] = {1e-9, 1e-6, 4e-6};
  const double laterals[3] = {0.0, 1e-7, -1e-7};
  for (int attempt = 0; attempt < 9; ++attempt) {
    double delta = nudges[attempt / 3] * len;
    Vec2 shift = u.perp() * (laterals[attempt % 3] * len);
    Vec2 p1 = seg.a + u * delta + shift;
    Vec2 p2 = seg.a + u * (delta + probe) + shift;
    SurfacePoint s1 = canonicalize(surface, seg.polygon, p1);
    SurfacePoint s2 = canonicalize(surface, seg.polygon, p2);

    // Locating both probe points in one triangle recovers the direction in
    // that triangle's chart directly, independent of which polygon image the
    // fold picked (triangle charts may extend across gluings).
    auto [t0, q0] = locate(mesh.tri, s1);
    if (t0 < 0) continue;
    auto [t2, q2] = locate(mesh.tri, s2);
    if (t2 != t0) continue;
    Vec2 dq = q2 - q0;
    if (std::abs(dq.norm() / probe - 1.0) > 1e-5) continue;
    Vec2 dir_chart = dq * (1.0 / dq.norm());

    RayWalker walker(mesh.tri, t0, q0, dir_chart);
    double target = len - 2.0 * delta;
    double acc = form[t0].dot(dir_chart * delta);  // start cap
    bool ok = true;
    while (true) {
      double stop = std::min(walker.exit_param(), target);
      double step_len = stop - walker.traveled();
      if (step_len > 0) {
        Vec2 chart_vec = walker.direction() * (step_len * walker.dev().sign);
        acc += form[walker.triangle()].dot(chart_vec);
      }
      if (walker.exit_param() >= target) break;
      if (!walker.step()) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    Vec2 end_dir = walker.direction() * (delta * walker.dev().sign);
    acc += form[walker.triangle()].dot(end_dir);  // end cap
    return acc;
  }
  fail(ErrorCode::NoPathFound, "segment path integral failed to traverse");
}

OddEvenSplit odd_even_split(const Mesh& mesh, const HarmonicBasis& basis) {
  const FlatSurface& surface = *mesh.tri.surface;
  if (surface.involution_polygon.empty())
    fail(ErrorCode::InvolutionMismatch, "surface carries no deck involution");
  int n = static_cast<int>(basis.cochains.size());
  OddEvenSplit out;
  out.action = Eigen::MatrixXd::Zero(n, n);
  if (n == 0) return out;

  std::vector<CyclePath> paths = cycle_paths(mesh, basis);
  std::vector<std::vector<Vec2>> forms(n);
  for (int i = 0; i < n; ++i) forms[i] = constant_form(mesh, basis.cochains[i]);

  // Periods of h_j over the involuted cycles. With the pairing-dual
  // normalization these are directly the coefficients of iota^* h_j.
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      double p = 0.0;
      for (const ChartSegment& seg : paths[k]) {
        ChartSegment mapped;
        mapped.a = involution_point(surface, seg.polygon, seg.a, &mapped.polygon);
        int pb = -1;
        mapped.b = involution_point(surface, seg.polygon, seg.b, &pb);
        p += integrate_segment(mesh, forms[j], mapped);
      }
      out.action(j, k) = p;
    }

  Eigen::MatrixXd sq = out.action * out.action;
  out.residual = (sq - Eigen::MatrixXd::Identity(n, n)).norm();
  if (out.residual > 1e-6)
    fail(ErrorCode::InvolutionMismatch,
         "pullback does not square to the identity on cohomology");

  auto kernel_combos = [&](double sign_shift) {
    // Kernel of action + sign_shift * I via SVD.
    Eigen::MatrixXd m = out.action + sign_shift * Eigen::MatrixXd::Identity(n, n);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullV);
    std::vector<Cochain1> combos;
    for (int i = 0; i < n; ++i) {
      if (svd.singularValues()[i] > 1e-6) continue;
      Cochain1 c = Eigen::VectorXd::Zero(mesh.edge_count());
      for (int j = 0; j < n; ++j) c += svd.matrixV()(j, i) * basis.cochains[j];
      combos.push_back(c);
    }
    return combos;
  };
  out.odd = kernel_combos(1.0);
  out.even = kernel_combos(-1.0);
  if (static_cast<int>(out.odd.size() + out.even.size()) != n)
    fail(ErrorCode::InvolutionMismatch, "odd/even ranks do not fill the space");
  return out;
}

TransportFrame transport_frame(const FlatSurface& flowed, double t,
                               const std::vector<CyclePath>& base_cycles,
                               double h, const MeshParams& mesh_params) {
  TransportFrame frame;
  frame.mesh = refine_mesh(flowed, h, mesh_params);
  frame.basis = harmonic_basis(frame.mesh);
  int n = static_cast<int>(frame.basis.cochains.size());
  if (static_cast<int>(base_cycles.size()) != n)
    fail(ErrorCode::BadParams, "cycle count does not match the harmonic rank");
  double ex = std::exp(t), ey = std::exp(-t);
  frame.period_matrix.resize(n, n);
  for (int i = 0; i < n; ++i) {
    std::vector<Vec2> form = constant_form(frame.mesh, frame.basis.cochains[i]);
    for (int k = 0; k < n; ++k) {
      double p = 0.0;
      for (const ChartSegment& seg : base_cycles[k]) {
        ChartSegment scaled;
        scaled.polygon = seg.polygon;
        scaled.a = {seg.a.x * ex, seg.a.y * ey};
        scaled.b = {seg.b.x * ex, seg.b.y * ey};
        p += integrate_segment(frame.mesh, form, scaled);
      }
      frame.period_matrix(i, k) = p;
    }
  }
  frame.gram = hodge_gram(frame.mesh, frame.basis.cochains);
  return frame;
}

double frame_norm(const TransportFrame& frame, const Eigen::VectorXd& periods) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(frame.period_matrix.transpose());
  if (!lu.isInvertible())
    fail(ErrorCode::SolverFailure, "transported period matrix is singular");
  Eigen::VectorXd a = lu.solve(periods);
  double norm2 = a.dot(frame.gram * a);
  return std::sqrt(std::max(0.0, norm2));
}

double frame_log_derivative(const TransportFrame& frame,
                            const Eigen::VectorXd& periods,
                            const QuadratureParams& params) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(frame.period_matrix.transpose());
  if (!lu.isInvertible())
    fail(ErrorCode::SolverFailure, "transported period matrix is singular");
  Eigen::VectorXd a = lu.solve(periods);
  Cochain1 c = Cochain1::Zero(frame.mesh.edge_count());
  for (int i = 0; i < static_cast<int>(frame.basis.cochains.size()); ++i)
    c += a[i] * frame.basis.cochains[i];
  return forni_derivative(frame.mesh, c, params);
}

double transported_norm(const FlatSurface& base,
                        const std::vector<CyclePath>& cycles,
                        const Eigen::VectorXd& periods, double t, double h,
                        const MeshParams& mesh_params) {
  FlatSurface flowed = apply_flow(base, t);
  TransportFrame frame = transport_frame(flowed, t, cycles, h, mesh_params);
  return frame_norm(frame, periods);
}

double flow_derivative_fd(const FlatSurface& base,
                          const std::vector<CyclePath>& cycles,
                          const Eigen::VectorXd& periods, double dt, double h,
                          const MeshParams& mesh_params) {
  if (!(dt > 0.0)) fail(ErrorCode::BadParams, "dt must be positive");
  double np = transported_norm(base, cycles, periods, dt, h, mesh_params);
  double nm = transported_norm(base, cycles, periods, -dt, h, mesh_params);
  return (std::log(np) - std::log(nm)) / (2.0 * dt);
}

}  // namespace hourglass
