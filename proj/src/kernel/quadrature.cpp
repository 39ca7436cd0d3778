#include "kernelkit/kernel/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "kernelkit/kernel/interpolant.hpp"

namespace kernelkit::kernel {

namespace {

constexpr int kPointsPerPiece = 64;

const std::vector<std::pair<double, double>>& reference_rule() {
  static const auto rule = gauss_legendre(kPointsPerPiece);
  return rule;
}

// Nodes and weights on [lo, hi] split at `cut` (if interior).
std::vector<std::pair<double, double>> split_rule(double lo, double hi, double cut) {
  std::vector<std::pair<double, double>> out;
  auto add = [&](double a, double b) {
    if (!(b > a)) return;
    for (auto [x, w] : reference_rule()) out.emplace_back(0.5 * (a + b) + 0.5 * (b - a) * x, 0.5 * (b - a) * w);
  };
  add(lo, std::clamp(cut, lo, hi));
  add(std::clamp(cut, lo, hi), hi);
  return out;
}

// Mean of phi(|x - y|) over y uniform in the box slice.
double block_mean(const MaternKernel& k, const Box& box, std::size_t offset, std::span<const double> x) {
  const auto w = static_cast<std::size_t>(k.dim());
  std::vector<std::vector<std::pair<double, double>>> axes;
  std::size_t total = 1;
  double volume = 1.0;
  for (std::size_t a = 0; a < w; ++a) {
    const double lo = box.lo[offset + a], hi = box.hi[offset + a];
    axes.push_back(split_rule(lo, hi, x[offset + a]));
    total *= axes.back().size();
    volume *= hi - lo;
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < total; ++i) {
    std::size_t rest = i;
    double r2 = 0.0, weight = 1.0;
    for (std::size_t a = 0; a < w; ++a) {
      const auto& [y, wy] = axes[a][rest % axes[a].size()];
      rest /= axes[a].size();
      const double d = x[offset + a] - y;
      r2 += d * d;
      weight *= wy;
    }
    acc += weight * k.radial_sq(r2);
  }
  return acc / volume;
}

}  // namespace

double QuadratureRule::apply(std::span<const double> values) const {
  if (values.size() != weights.size()) throw std::invalid_argument("quadrature: value count does not match nodes");
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) acc += weights[i] * values[i];
  return acc;
}

std::vector<std::pair<double, double>> gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  std::vector<std::pair<double, double>> rule(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule[static_cast<std::size_t>(n - 1 - i)] = {x, 2.0 / ((1.0 - x * x) * dp * dp)};
  }
  return rule;
}

QuadratureRule quadrature_weights(const TensorKernel& kernel, const PointSet& nodes) {
  const auto* box = std::get_if<Box>(&nodes.domain());
  if (!box) throw std::invalid_argument("quadrature_weights: only box domains are supported");
  if (nodes.dim() != kernel.dim()) throw std::invalid_argument("quadrature_weights: dimension mismatch");
  QuadratureRule rule{nodes, {}, std::vector<double>(nodes.size(), 1.0)};
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (const auto& b : kernel.blocks()) rule.kernel_means[i] *= block_mean(b.kernel, *box, b.offset, nodes.point(i));
  }
  rule.weights = Interpolant::fit(kernel, nodes, rule.kernel_means).coefficients();
  return rule;
}

}  // namespace kernelkit::kernel
