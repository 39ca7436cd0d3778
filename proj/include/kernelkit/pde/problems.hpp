#pragma once

#include <array>
#include <span>
#include <vector>

#include "kernelkit/kernel/points.hpp"
#include "kernelkit/pde/fem.hpp"

namespace kernelkit::pde {

// phi0(r) = int_0^{(1-r)_+} s^2 (1-s)^2 ds = s^3/3 - s^4/2 + s^5/5 at s = (1-r)_+.
double phi0(double r);

// -div(a_y grad u) = 1 with u = 0 on the boundary, where
// a_y(x) = 2 + sum_j phi0(|x - c_j| / R) and y = (c_1, ..., c_n).
struct BumpDiffusionProblem {
  int n_bumps = 1;
  double radius = 0.25;
  // Admissible centers of bump j. Supports of bumps centered in different boxes are disjoint.
  std::vector<kernelkit::kernel::Box> center_boxes;

  // n in {1, 2, 4}: R = 0.25 for one bump, 0.125 otherwise. Boxes: the central
  // square [0.25, 0.75]^2; the left/right halves; the four quadrants; each inset by R.
  static BumpDiffusionProblem make(int n_bumps);

  // centers holds (c_1x, c_1y, c_2x, ...). Throws std::invalid_argument if a center leaves its box.
  double coefficient(std::span<const double> centers, double x, double y) const;
  EllipticProblem elliptic(std::span<const double> centers) const;
};

FemSolution solve_bump(const BumpDiffusionProblem& problem, std::span<const double> centers, const MeshLevel& mesh);

// Manufactured solution u = sin(pi x) sin(pi y) of -div(a grad u) = f with
// a = 1 + x^2 and u = 0 on the boundary.
struct ManufacturedProblem {
  static double exact(double x, double y);
  static EllipticProblem elliptic();
};

// -div(a grad u) + z . grad u = f with a d_n u + u = u_b, a = 1 + exp(-m),
// f(x) = 20 exp(-|x - (0.5, 0.5)|^2).
struct AdvectionDiffusionProblem {
  static double source(double x, double y);
  // 1 on x=0, 0 on x=1, (1 + cos(pi x))/2 on y=0, exp(1 - 1/(1 - x)) on y=1 (0 at x=1).
  static double boundary_value(double x, double y);
  static EllipticProblem elliptic(std::array<double, 2> velocity, Field m);
};

// m is the random field; pass m == 0 for the deterministic problem.
FemSolution solve_advection_diffusion(std::array<double, 2> velocity, const Field& m, const MeshLevel& mesh);

}  // namespace kernelkit::pde
