#include "kernelkit/pde/grf.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kernelkit/error.hpp"
#include "kernelkit/rng.hpp"

namespace kernelkit::pde {

namespace {

constexpr std::size_t kMaxReferenceNodes = 5000;

// Position of coordinate x on a grid with m cells: cell index and fraction, snapped
// to the node when x is within rounding of it.
std::pair<int, double> locate(double x, int m) {
  const double s = std::clamp(x, 0.0, 1.0) * m;
  const double r = std::round(s);
  if (std::abs(s - r) < 1e-9) {
    const int k = static_cast<int>(r);
    return k == m ? std::pair{m - 1, 1.0} : std::pair{k, 0.0};
  }
  const int k = std::min(m - 1, static_cast<int>(s));
  return {k, s - k};
}

}  // namespace

double GrfSample::value_at(double x, double y) const {
  const int m = reference.cells_per_axis;
  const auto [i, s] = locate(x, m);
  const auto [j, t] = locate(y, m);
  auto v = [&](int a, int b) { return values[reference.node_index(a, b)]; };
  if (s == 0.0 && t == 0.0) return v(i, j);
  return (1 - s) * (1 - t) * v(i, j) + s * (1 - t) * v(i + 1, j) + (1 - s) * t * v(i, j + 1) + s * t * v(i + 1, j + 1);
}

GrfSampler::GrfSampler(MeshLevel reference, double scale) : reference_(reference), scale_(scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("GRF: covariance scale must be positive");
  const std::size_t n = reference_.node_count();
  if (n > kMaxReferenceNodes) {
    throw std::invalid_argument("GRF: reference grid has " + std::to_string(n) + " nodes, limit is " +
                                std::to_string(kMaxReferenceNodes));
  }
  Eigen::MatrixXd K(n, n);
  for (std::size_t a = 0; a < n; ++a) {
    const auto p = reference_.node(a);
    for (std::size_t b = 0; b <= a; ++b) {
      const auto q = reference_.node(b);
      K(a, b) = K(b, a) = covariance(std::hypot(p[0] - q[0], p[1] - q[1]));
    }
  }
  for (double nugget : {1e-10, 1e-8}) {
    Eigen::MatrixXd A = K;
    A.diagonal().array() += nugget;
    Eigen::LLT<Eigen::MatrixXd> llt(A);
    if (llt.info() != Eigen::Success) continue;
    const Eigen::MatrixXd L = llt.matrixL();
    auto rows = std::make_shared<std::vector<double>>(n * n);
    Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(rows->data(), n, n) = L;
    factor_ = std::move(rows);
    nugget_ = nugget;
    return;
  }
  throw NumericalError("GRF: covariance factorization failed with nugget 1e-8 on " + std::to_string(n) + " nodes");
}

double GrfSampler::covariance(double r) const {
  const double s = scale_ * r;
  return std::exp(-s * s);
}

GrfSample GrfSampler::sample(std::uint64_t seed, std::uint64_t draw) const {
  const std::size_t n = reference_.node_count();
  const CounterRng rng(seed, draw);
  std::vector<double> xi(n);
  for (std::size_t i = 0; i < n; ++i) xi[i] = rng.normal(i);
  GrfSample out{reference_, std::vector<double>(n, 0.0), seed, draw};
  const double* L = factor_->data();
  for (std::size_t a = 0; a < n; ++a) {
    double acc = 0.0;
    for (std::size_t b = 0; b <= a; ++b) acc += L[a * n + b] * xi[b];
    out.values[a] = acc;
  }
  return out;
}

std::vector<double> restrict_field(const GrfSample& sample, const MeshLevel& coarse) {
  if (coarse.cells_per_axis > sample.reference.cells_per_axis) {
    throw std::invalid_argument("restrict_field: target mesh (" + std::to_string(coarse.cells_per_axis) +
                                " cells per axis) is finer than the reference grid (" +
                                std::to_string(sample.reference.cells_per_axis) + ")");
  }
  if (coarse == sample.reference) return sample.values;
  std::vector<double> out(coarse.node_count());
  for (std::size_t k = 0; k < out.size(); ++k) {
    const auto p = coarse.node(k);
    out[k] = sample.value_at(p[0], p[1]);
  }
  return out;
}

}  // namespace kernelkit::pde
