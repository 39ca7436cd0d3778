#include "kernelkit/pde/problems.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>
#include <string>

namespace kernelkit::pde {

using kernelkit::kernel::Box;

double phi0(double r) {
  const double s = std::max(0.0, 1.0 - r);
  const double s3 = s * s * s;
  return s3 / 3.0 - s3 * s / 2.0 + s3 * s * s / 5.0;
}

BumpDiffusionProblem BumpDiffusionProblem::make(int n_bumps) {
  BumpDiffusionProblem p;
  p.n_bumps = n_bumps;
  switch (n_bumps) {
    case 1:
      p.radius = 0.25;
      p.center_boxes = {Box{{0.25, 0.25}, {0.75, 0.75}}};
      break;
    case 2:
      p.radius = 0.125;
      p.center_boxes = {Box{{0.125, 0.125}, {0.375, 0.875}}, Box{{0.625, 0.125}, {0.875, 0.875}}};
      break;
    case 4:
      p.radius = 0.125;
      p.center_boxes = {Box{{0.125, 0.125}, {0.375, 0.375}}, Box{{0.625, 0.125}, {0.875, 0.375}},
                        Box{{0.125, 0.625}, {0.375, 0.875}}, Box{{0.625, 0.625}, {0.875, 0.875}}};
      break;
    default:
      throw std::invalid_argument("bump problem: n_bumps must be 1, 2 or 4, got " + std::to_string(n_bumps));
  }
  return p;
}

double BumpDiffusionProblem::coefficient(std::span<const double> centers, double x, double y) const {
  double a = 2.0;
  for (int j = 0; j < n_bumps; ++j) {
    a += phi0(std::hypot(x - centers[2 * j], y - centers[2 * j + 1]) / radius);
  }
  return a;
}

EllipticProblem BumpDiffusionProblem::elliptic(std::span<const double> centers) const {
  if (centers.size() != 2 * static_cast<std::size_t>(n_bumps)) {
    throw std::invalid_argument("bump problem: expected " + std::to_string(2 * n_bumps) + " center coordinates");
  }
  std::string label = "centers";
  for (int j = 0; j < n_bumps; ++j) {
    if (!kernelkit::kernel::contains(center_boxes[j], centers.subspan(2 * j, 2), 1e-12)) {
      throw std::invalid_argument("bump problem: center " + std::to_string(j) + " outside its box");
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, " (%.6g,%.6g)", centers[2 * j], centers[2 * j + 1]);
    label += buf;
  }
  EllipticProblem p;
  p.diffusion = [self = *this, c = std::vector<double>(centers.begin(), centers.end())](double x, double y) {
    return self.coefficient(c, x, y);
  };
  p.source = [](double, double) { return 1.0; };
  p.boundary = BoundaryKind::dirichlet_zero;
  p.label = std::move(label);
  return p;
}

FemSolution solve_bump(const BumpDiffusionProblem& problem, std::span<const double> centers, const MeshLevel& mesh) {
  return solve(problem.elliptic(centers), mesh);
}

double ManufacturedProblem::exact(double x, double y) {
  return std::sin(std::numbers::pi * x) * std::sin(std::numbers::pi * y);
}

EllipticProblem ManufacturedProblem::elliptic() {
  EllipticProblem p;
  p.diffusion = [](double x, double) { return 1.0 + x * x; };
  // f = -a' u_x - a lap(u)
  p.source = [](double x, double y) {
    constexpr double pi = std::numbers::pi;
    const double ux = pi * std::cos(pi * x) * std::sin(pi * y);
    return -2.0 * x * ux + (1.0 + x * x) * 2.0 * pi * pi * exact(x, y);
  };
  p.label = "manufactured";
  return p;
}

double AdvectionDiffusionProblem::source(double x, double y) {
  const double dx = x - 0.5, dy = y - 0.5;
  return 20.0 * std::exp(-(dx * dx + dy * dy));
}

double AdvectionDiffusionProblem::boundary_value(double x, double y) {
  constexpr double eps = 1e-14;
  if (x <= eps) return 1.0;
  if (x >= 1.0 - eps) return 0.0;
  if (y <= eps) return 0.5 * (1.0 + std::cos(std::numbers::pi * x));
  if (y >= 1.0 - eps) return std::exp(1.0 - 1.0 / (1.0 - x));
  throw std::invalid_argument("boundary_value: point is not on the boundary");
}

EllipticProblem AdvectionDiffusionProblem::elliptic(std::array<double, 2> velocity, Field m) {
  if (std::hypot(velocity[0], velocity[1]) > 1.0 + 1e-12) {
    throw std::invalid_argument("advection-diffusion: velocity must lie in the unit disc");
  }
  EllipticProblem p;
  p.diffusion = [m = std::move(m)](double x, double y) { return 1.0 + std::exp(-m(x, y)); };
  p.source = &AdvectionDiffusionProblem::source;
  p.velocity = velocity;
  p.boundary = BoundaryKind::conormal_robin;
  p.boundary_data = &AdvectionDiffusionProblem::boundary_value;
  char buf[64];
  std::snprintf(buf, sizeof buf, "velocity (%.6g,%.6g)", velocity[0], velocity[1]);
  p.label = buf;
  return p;
}

FemSolution solve_advection_diffusion(std::array<double, 2> velocity, const Field& m, const MeshLevel& mesh) {
  return solve(AdvectionDiffusionProblem::elliptic(velocity, m), mesh);
}

}  // namespace kernelkit::pde
