#include "kernelkit/kernel/matern.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace kernelkit::kernel {

namespace {

double factorial(int n) { return std::tgamma(n + 1.0); }

}  // namespace

MaternKernel::MaternKernel(double beta, int dim, double length_scale)
    : beta_(beta), dim_(dim), nu_(beta - 0.5 * dim), length_scale_(length_scale) {
  if (dim < 1) throw std::invalid_argument("Matern kernel: dimension must be positive");
  if (!(length_scale > 0.0)) throw std::invalid_argument("Matern kernel: length_scale must be positive");
  if (!(nu_ > 0.0)) {
    throw std::invalid_argument("Matern kernel: need beta > d/2 (beta=" + std::to_string(beta) +
                                ", d=" + std::to_string(dim) + ")");
  }
  const double two_nu = 2.0 * nu_;
  twice_nu_ = static_cast<int>(std::lround(two_nu));
  if (std::abs(two_nu - twice_nu_) > 1e-12) {
    throw std::invalid_argument("Matern kernel: nu = beta - d/2 must be an integer or half-integer, got " +
                                std::to_string(nu_));
  }
  if (twice_nu_ > 40) throw std::invalid_argument("Matern kernel: order nu above 20 is not supported");
  prefactor_ = std::pow(2.0, 1.0 - beta_) / std::tgamma(beta_);
  value_at_zero_ = std::pow(2.0, -0.5 * dim_) * std::tgamma(nu_) / std::tgamma(beta_);

  if (twice_nu_ % 2 == 1) {
    // r^nu K_nu(r) = sqrt(pi/2) e^-r sum_k (n+k)! / (k! (n-k)!) 2^-k r^(n-k),  nu = n + 1/2.
    const int n = (twice_nu_ - 1) / 2;
    poly_.assign(n + 1, 0.0);
    for (int k = 0; k <= n; ++k) {
      poly_[k] = factorial(n + k) / (factorial(k) * factorial(n - k)) * std::ldexp(1.0, -k);
    }
  }
}

double MaternKernel::radial(double r) const {
  const double s = std::abs(r) / length_scale_;
  if (s == 0.0) return value_at_zero_;
  if (!poly_.empty()) {
    double acc = 0.0;
    for (double c : poly_) acc = acc * s + c;  // poly_[0] multiplies the highest power
    return prefactor_ * std::sqrt(std::numbers::pi / 2.0) * std::exp(-s) * acc;
  }
  if (s < 1e-8) return value_at_zero_;
  if (s > 700.0) return 0.0;
  const double scaled = std::pow(s, nu_) * std::cyl_bessel_k(nu_, s);
  return prefactor_ * scaled;
}

void MaternKernel::radial_sq_inplace(std::span<double> r2) const {
  for (double& v : r2) v = radial(std::sqrt(v));
}

double MaternKernel::operator()(std::span<const double> x, std::span<const double> y) const {
  double r2 = 0.0;
  for (int k = 0; k < dim_; ++k) {
    const double d = x[k] - y[k];
    r2 += d * d;
  }
  return radial(std::sqrt(r2));
}

TensorKernel::TensorKernel(std::vector<KernelBlock> blocks) : blocks_(std::move(blocks)) {
  if (blocks_.empty()) throw std::invalid_argument("tensor kernel: no blocks");
  for (const auto& b : blocks_) dim_ += static_cast<std::size_t>(b.kernel.dim());
  std::vector<int> owner(dim_, -1);
  for (std::size_t j = 0; j < blocks_.size(); ++j) {
    const auto& b = blocks_[j];
    for (int k = 0; k < b.kernel.dim(); ++k) {
      const std::size_t c = b.offset + static_cast<std::size_t>(k);
      if (c >= dim_ || owner[c] != -1) {
        throw std::invalid_argument("tensor kernel: coordinate slices must be disjoint and cover 0.." +
                                    std::to_string(dim_ - 1));
      }
      owner[c] = static_cast<int>(j);
    }
  }
}

TensorKernel TensorKernel::stacked(const std::vector<MaternKernel>& factors) {
  std::vector<KernelBlock> blocks;
  std::size_t offset = 0;
  for (const auto& k : factors) {
    blocks.push_back({k, offset});
    offset += static_cast<std::size_t>(k.dim());
  }
  return TensorKernel(std::move(blocks));
}

double TensorKernel::value_at_zero() const {
  double v = 1.0;
  for (const auto& b : blocks_) v *= b.kernel.value_at_zero();
  return v;
}

double TensorKernel::operator()(std::span<const double> x, std::span<const double> y) const {
  double v = 1.0;
  for (const auto& b : blocks_) {
    const auto w = static_cast<std::size_t>(b.kernel.dim());
    v *= b.kernel(x.subspan(b.offset, w), y.subspan(b.offset, w));
  }
  return v;
}

}  // namespace kernelkit::kernel
