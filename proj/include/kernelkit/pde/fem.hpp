#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "kernelkit/pde/mesh.hpp"

namespace kernelkit::pde {

using Field = std::function<double(double, double)>;

// robin: d_n u + u = u_b. conormal_robin: a d_n u + u = u_b.
enum class BoundaryKind { dirichlet_zero, robin, conormal_robin };

// -div(a grad u) + z . grad u = f in (0,1)^2 with u = 0 or a Robin condition
// on the boundary.
struct EllipticProblem {
  Field diffusion;
  Field source;
  std::array<double, 2> velocity{0.0, 0.0};
  BoundaryKind boundary = BoundaryKind::dirichlet_zero;
  Field boundary_data;  // u_b, Robin kinds only
  // Appended to solver diagnostics, e.g. the parameter values.
  std::string label;
};

struct FemSolution {
  MeshLevel mesh;
  std::vector<double> values;  // nodal values, mesh.node_index order
};

// P1 Galerkin solution. a is sampled at triangle centroids, f by the edge-midpoint
// rule, Robin terms by 3-point Gauss on each boundary edge. Throws SolverError when
// the relative residual exceeds 1e-10.
FemSolution solve(const EllipticProblem& problem, const MeshLevel& mesh);

// Diffusion coefficient values at triangle centroids, in triangle order.
std::vector<double> centroid_coefficients(const Field& diffusion, const MeshLevel& mesh);

// Exact integral of the P1 function over (0,1)^2.
double qoi(const FemSolution& u);

// Evaluates the P1 function at x (clamped to the unit square).
double evaluate(const FemSolution& u, double x, double y);

// L2 distance to an exact solution, 7-point degree-5 rule per triangle.
double l2_error(const FemSolution& u, const Field& exact);
double nodal_max_error(const FemSolution& u, const Field& exact);

// `x,y,value` rows for plotting.
std::string solution_csv(const FemSolution& u);

}  // namespace kernelkit::pde
