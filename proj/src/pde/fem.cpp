#include "kernelkit/pde/fem.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <cstdio>

#include "kernelkit/error.hpp"

namespace kernelkit::pde {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

constexpr double kResidualTolerance = 1e-10;

struct Geometry {
  std::array<std::array<double, 2>, 3> p;
  std::array<std::array<double, 2>, 3> grad;
  double area;
};

Geometry geometry(const MeshLevel& mesh, const std::array<std::size_t, 3>& tri) {
  Geometry g;
  for (int k = 0; k < 3; ++k) g.p[k] = mesh.node(tri[k]);
  const auto& [x0, y0] = g.p[0];
  const auto& [x1, y1] = g.p[1];
  const auto& [x2, y2] = g.p[2];
  const double det = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0);
  g.area = 0.5 * std::abs(det);
  g.grad[0] = {(y1 - y2) / det, (x2 - x1) / det};
  g.grad[1] = {(y2 - y0) / det, (x0 - x2) / det};
  g.grad[2] = {(y0 - y1) / det, (x1 - x0) / det};
  return g;
}

// 3-point Gauss on [0, 1].
constexpr std::array<double, 3> kEdgeS = {0.5 - 0.3872983346207417, 0.5, 0.5 + 0.3872983346207417};
constexpr std::array<double, 3> kEdgeW = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};

// Boundary edges as node pairs, walking each side of the square.
std::vector<std::array<std::size_t, 2>> boundary_edges(const MeshLevel& mesh) {
  std::vector<std::array<std::size_t, 2>> edges;
  const int m = mesh.cells_per_axis;
  for (int i = 0; i < m; ++i) {
    edges.push_back({mesh.node_index(i, 0), mesh.node_index(i + 1, 0)});
    edges.push_back({mesh.node_index(i, m), mesh.node_index(i + 1, m)});
    edges.push_back({mesh.node_index(0, i), mesh.node_index(0, i + 1)});
    edges.push_back({mesh.node_index(m, i), mesh.node_index(m, i + 1)});
  }
  return edges;
}

[[noreturn]] void fail(const EllipticProblem& problem, const MeshLevel& mesh, const std::string& what) {
  throw SolverError("FEM solve failed on a " + std::to_string(mesh.cells_per_axis) + "x" +
                    std::to_string(mesh.cells_per_axis) + " mesh" +
                    (problem.label.empty() ? std::string() : " (" + problem.label + ")") + ": " + what);
}

}  // namespace

std::vector<double> centroid_coefficients(const Field& diffusion, const MeshLevel& mesh) {
  std::vector<double> a(mesh.triangle_count());
  for (std::size_t t = 0; t < a.size(); ++t) {
    const auto g = geometry(mesh, mesh.triangle(t));
    a[t] = diffusion((g.p[0][0] + g.p[1][0] + g.p[2][0]) / 3.0, (g.p[0][1] + g.p[1][1] + g.p[2][1]) / 3.0);
  }
  return a;
}

FemSolution solve(const EllipticProblem& problem, const MeshLevel& mesh) {
  if (!problem.diffusion || !problem.source) fail(problem, mesh, "diffusion and source are required");
  const bool robin = problem.boundary != BoundaryKind::dirichlet_zero;
  const bool conormal = problem.boundary == BoundaryKind::conormal_robin;
  if (robin && !problem.boundary_data) fail(problem, mesh, "Robin boundary data missing");
  const std::size_t M = mesh.node_count();

  // Dirichlet nodes are eliminated; unknown[k] maps a node to its row or -1.
  std::vector<long> unknown(M, -1);
  long rows = 0;
  for (std::size_t k = 0; k < M; ++k) {
    if (robin || !mesh.on_boundary(k)) unknown[k] = rows++;
  }
  if (rows == 0) fail(problem, mesh, "mesh has no interior nodes");

  std::vector<Triplet> triplets;
  triplets.reserve(mesh.triangle_count() * 9);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(rows);
  const auto a = centroid_coefficients(problem.diffusion, mesh);
  const auto [zx, zy] = problem.velocity;

  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const auto tri = mesh.triangle(t);
    const auto g = geometry(mesh, tri);
    std::array<double, 3> fmid;  // f at the midpoint of the edge opposite vertex k
    for (int k = 0; k < 3; ++k) {
      const auto& p = g.p[(k + 1) % 3];
      const auto& q = g.p[(k + 2) % 3];
      fmid[k] = problem.source(0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1]));
    }
    for (int i = 0; i < 3; ++i) {
      const long row = unknown[tri[i]];
      if (row < 0) continue;
      // phi_i is 1/2 on the two edges through vertex i and 0 on the opposite one.
      rhs[row] += g.area / 3.0 * 0.5 * (fmid[(i + 1) % 3] + fmid[(i + 2) % 3]);
      for (int j = 0; j < 3; ++j) {
        const long col = unknown[tri[j]];
        if (col < 0) continue;
        const double stiff = a[t] * g.area * (g.grad[i][0] * g.grad[j][0] + g.grad[i][1] * g.grad[j][1]);
        const double adv = g.area / 3.0 * (zx * g.grad[j][0] + zy * g.grad[j][1]);
        triplets.emplace_back(row, col, stiff + adv);
      }
    }
  }

  if (robin) {
    for (const auto& e : boundary_edges(mesh)) {
      const auto p = mesh.node(e[0]), q = mesh.node(e[1]);
      const double len = std::hypot(q[0] - p[0], q[1] - p[1]);
      for (int g = 0; g < 3; ++g) {
        const double s = kEdgeS[g];
        const double x = p[0] + s * (q[0] - p[0]), y = p[1] + s * (q[1] - p[1]);
        const double w = len * kEdgeW[g] * (conormal ? 1.0 : problem.diffusion(x, y));
        const double phi[2] = {1.0 - s, s};
        const double ub = problem.boundary_data(x, y);
        for (int i = 0; i < 2; ++i) {
          rhs[unknown[e[i]]] += w * ub * phi[i];
          for (int j = 0; j < 2; ++j) triplets.emplace_back(unknown[e[i]], unknown[e[j]], w * phi[i] * phi[j]);
        }
      }
    }
  }

  SpMat A(rows, rows);
  A.setFromTriplets(triplets.begin(), triplets.end());
  A.makeCompressed();
  Eigen::VectorXd u;
  const bool symmetric = zx == 0.0 && zy == 0.0;
  if (symmetric) {
    Eigen::SimplicialLDLT<SpMat> ldlt(A);
    if (ldlt.info() != Eigen::Success) fail(problem, mesh, "sparse LDL^T factorization failed");
    u = ldlt.solve(rhs);
  } else {
    Eigen::SparseLU<SpMat> lu;
    lu.analyzePattern(A);
    lu.factorize(A);
    if (lu.info() != Eigen::Success) fail(problem, mesh, "sparse LU factorization failed");
    u = lu.solve(rhs);
  }
  const double bnorm = rhs.norm();
  const double res = (A * u - rhs).norm();
  if (!u.allFinite() || res > kResidualTolerance * std::max(bnorm, 1e-300)) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "relative residual %.3e exceeds %.0e", bnorm > 0 ? res / bnorm : res,
                  kResidualTolerance);
    fail(problem, mesh, buf);
  }

  FemSolution out{mesh, std::vector<double>(M, 0.0)};
  for (std::size_t k = 0; k < M; ++k) {
    if (unknown[k] >= 0) out.values[k] = u[unknown[k]];
  }
  return out;
}

double qoi(const FemSolution& u) {
  const auto& mesh = u.mesh;
  const double area = 0.5 * mesh.h() * mesh.h();
  double acc = 0.0;
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const auto tri = mesh.triangle(t);
    acc += area / 3.0 * (u.values[tri[0]] + u.values[tri[1]] + u.values[tri[2]]);
  }
  return acc;
}

double evaluate(const FemSolution& u, double x, double y) {
  const int m = u.mesh.cells_per_axis;
  const double sx = std::clamp(x, 0.0, 1.0) * m, sy = std::clamp(y, 0.0, 1.0) * m;
  const int i = std::min(m - 1, static_cast<int>(sx));
  const int j = std::min(m - 1, static_cast<int>(sy));
  const double s = sx - i, t = sy - j;
  const double ll = u.values[u.mesh.node_index(i, j)], lr = u.values[u.mesh.node_index(i + 1, j)];
  const double ul = u.values[u.mesh.node_index(i, j + 1)], ur = u.values[u.mesh.node_index(i + 1, j + 1)];
  if (t <= s) return ll * (1.0 - s) + lr * (s - t) + ur * t;
  return ll * (1.0 - t) + ur * s + ul * (t - s);
}

double l2_error(const FemSolution& u, const Field& exact) {
  // Barycentric points and weights of the 7-point degree-5 rule.
  struct Point {
    double l0, l1, l2, w;
  };
  constexpr double a1 = 0.059715871789770, b1 = 0.470142064105115, w1 = 0.132394152788506;
  constexpr double a2 = 0.797426985353087, b2 = 0.101286507323456, w2 = 0.125939180544827;
  static constexpr Point rule[7] = {{1.0 / 3, 1.0 / 3, 1.0 / 3, 0.225},
                                    {a1, b1, b1, w1}, {b1, a1, b1, w1}, {b1, b1, a1, w1},
                                    {a2, b2, b2, w2}, {b2, a2, b2, w2}, {b2, b2, a2, w2}};
  const auto& mesh = u.mesh;
  double acc = 0.0;
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const auto tri = mesh.triangle(t);
    const auto g = geometry(mesh, tri);
    for (const auto& q : rule) {
      const double x = q.l0 * g.p[0][0] + q.l1 * g.p[1][0] + q.l2 * g.p[2][0];
      const double y = q.l0 * g.p[0][1] + q.l1 * g.p[1][1] + q.l2 * g.p[2][1];
      const double uh = q.l0 * u.values[tri[0]] + q.l1 * u.values[tri[1]] + q.l2 * u.values[tri[2]];
      const double d = uh - exact(x, y);
      acc += g.area * q.w * d * d;
    }
  }
  return std::sqrt(acc);
}

double nodal_max_error(const FemSolution& u, const Field& exact) {
  double worst = 0.0;
  for (std::size_t k = 0; k < u.values.size(); ++k) {
    const auto p = u.mesh.node(k);
    worst = std::max(worst, std::abs(u.values[k] - exact(p[0], p[1])));
  }
  return worst;
}

std::string solution_csv(const FemSolution& u) {
  std::string out = "x,y,value\n";
  char line[96];
  for (std::size_t k = 0; k < u.values.size(); ++k) {
    const auto p = u.mesh.node(k);
    std::snprintf(line, sizeof line, "%.12e,%.12e,%.12e\n", p[0], p[1], u.values[k]);
    out += line;
  }
  return out;
}

}  // namespace kernelkit::pde
