#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace kernelkit::kernel {

// Matern kernel of Sobolev order beta on R^d:
//   phi(r) = 2^(1-beta) / Gamma(beta) * r^nu K_nu(r),  nu = beta - d/2,
// evaluated at r = |x - y| / length_scale. Supported orders are nu in {1/2, 1, 3/2, ...}.
class MaternKernel {
 public:
  MaternKernel(double beta, int dim, double length_scale = 1.0);

  double beta() const { return beta_; }
  int dim() const { return dim_; }
  double nu() const { return nu_; }
  double length_scale() const { return length_scale_; }

  // phi(r / length_scale).
  double radial(double r) const;
  double radial_sq(double r2) const { return radial(std::sqrt(r2)); }
  // Overwrites squared distances with kernel values.
  void radial_sq_inplace(std::span<double> r2) const;
  double value_at_zero() const { return value_at_zero_; }

  double operator()(std::span<const double> x, std::span<const double> y) const;

  bool operator==(const MaternKernel& o) const {
    return beta_ == o.beta_ && dim_ == o.dim_ && length_scale_ == o.length_scale_;
  }

 private:
  double beta_;
  int dim_;
  double nu_;
  double length_scale_;
  int twice_nu_;
  double prefactor_;  // 2^(1-beta) / Gamma(beta)
  double value_at_zero_;
  std::vector<double> poly_;  // half-integer nu: coefficients of s^(n-k)
};

// One factor of a tensor-product kernel acting on coordinates [offset, offset + kernel.dim()).
struct KernelBlock {
  MaternKernel kernel;
  std::size_t offset = 0;
};

// Phi(x, y) = prod_j Phi_j(x_Dj, y_Dj) over a partition of the coordinates.
class TensorKernel {
 public:
  // Throws std::invalid_argument unless the blocks are disjoint and cover 0..dim-1.
  explicit TensorKernel(std::vector<KernelBlock> blocks);
  // Blocks laid out one after another in the given order.
  static TensorKernel stacked(const std::vector<MaternKernel>& factors);
  static TensorKernel single(const MaternKernel& kernel) { return stacked({kernel}); }

  std::size_t dim() const { return dim_; }
  const std::vector<KernelBlock>& blocks() const { return blocks_; }
  double value_at_zero() const;

  double operator()(std::span<const double> x, std::span<const double> y) const;

 private:
  std::vector<KernelBlock> blocks_;
  std::size_t dim_ = 0;
};

}  // namespace kernelkit::kernel
