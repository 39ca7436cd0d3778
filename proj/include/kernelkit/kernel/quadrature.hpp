#pragma once

#include <span>
#include <utility>
#include <vector>

#include "kernelkit/kernel/matern.hpp"
#include "kernelkit/kernel/points.hpp"

namespace kernelkit::kernel {

// Kernel quadrature: the exact integral of the interpolant of the data, Q f = w^T f
// with w = K^-1 c and c_i = int Phi(x_i, y) dpi(y).
struct QuadratureRule {
  PointSet nodes;
  std::vector<double> weights;
  std::vector<double> kernel_means;  // c

  double apply(std::span<const double> values) const;
};

// Rule for the uniform probability measure on the box domain of `nodes`. Each
// c_i uses 64 Gauss-Legendre points per axis on either side of the node
// coordinate, so the kink of the kernel at the node is never straddled.
// Throws std::invalid_argument for non-box domains and ConditioningError as fit does.
QuadratureRule quadrature_weights(const TensorKernel& kernel, const PointSet& nodes);

// Gauss-Legendre nodes and weights on [-1, 1].
std::vector<std::pair<double, double>> gauss_legendre(int n);

}  // namespace kernelkit::kernel
