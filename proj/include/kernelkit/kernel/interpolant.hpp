#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "kernelkit/kernel/matern.hpp"
#include "kernelkit/kernel/points.hpp"

namespace kernelkit::kernel {

// Minimum-norm interpolant s(x) = sum_i alpha_i Phi(x_i, x) of point data.
//
// Two layouts share one type. A scattered interpolant owns a single point set in
// the full dimension. A tensor interpolant owns one point set per kernel block and
// its nodes are their Cartesian product, flattened with the first block varying
// fastest; its Gram matrix is the Kronecker product of the block Gram matrices and
// is never formed.
class Interpolant {
 public:
  // Throws ConditioningError if the Gram matrix stays indefinite after jitter escalation.
  static Interpolant fit(TensorKernel kernel, PointSet nodes, std::span<const double> values);
  static Interpolant fit_tensor(TensorKernel kernel, std::vector<PointSet> factor_nodes,
                                std::span<const double> values);
  // Rebuilds an interpolant from stored coefficients without solving.
  static Interpolant from_coefficients(TensorKernel kernel, std::vector<PointSet> factor_nodes, bool tensor,
                                       std::vector<double> alpha);

  bool is_tensor() const { return tensor_; }
  const TensorKernel& kernel() const { return kernel_; }
  // One set per block for tensor layouts, a single set otherwise.
  const std::vector<PointSet>& factor_nodes() const { return factor_nodes_; }
  std::size_t size() const { return alpha_.size(); }
  std::size_t dim() const { return kernel_.dim(); }
  std::vector<double> node(std::size_t i) const;
  const std::vector<double>& coefficients() const { return alpha_; }
  double native_norm_sq() const { return native_norm_sq_; }
  // max_i |(K alpha)_i - f_i| / max_i |f_i| at fit time (0 for zero data).
  double relative_residual() const { return relative_residual_; }
  // Largest jitter used, relative to trace/N.
  double relative_jitter() const { return relative_jitter_; }
  bool in_domain(std::span<const double> x) const;

  double operator()(std::span<const double> x) const;
  // Reference route: sum over flattened nodes of alpha_i * Phi(x_i, x).
  double evaluate_direct(std::span<const double> x) const;

 private:
  Interpolant() = default;
  void validate_layout() const;

  TensorKernel kernel_{std::vector<KernelBlock>{{MaternKernel(1.0, 1), 0}}};
  std::vector<PointSet> factor_nodes_;
  bool tensor_ = false;
  std::vector<double> alpha_;
  double native_norm_sq_ = 0.0;
  double relative_residual_ = 0.0;
  double relative_jitter_ = 0.0;
};

// Dense Gram matrix K_ij = Phi(x_i, x_j) of a scattered set, row-major.
std::vector<double> gram_matrix(const TensorKernel& kernel, const PointSet& nodes);

}  // namespace kernelkit::kernel
