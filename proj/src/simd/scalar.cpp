#include <limits>

#include "kernelkit/simd/kernels.hpp"

namespace kernelkit::simd::scalar {

void squared_distances(std::span<const double> soa, std::span<const double> query, std::span<double> out) {
  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; ++i) out[i] = 0.0;
  for (std::size_t k = 0; k < query.size(); ++k) {
    const double* axis = soa.data() + k * n;
    const double q = query[k];
    for (std::size_t i = 0; i < n; ++i) {
      const double d = axis[i] - q;
      out[i] = out[i] + d * d;
    }
  }
}

double min_squared_distance(std::span<const double> soa, std::size_t n, std::span<const double> query) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < query.size(); ++k) {
      const double d = soa[k * n + i] - query[k];
      acc = acc + d * d;
    }
    if (acc < best) best = acc;
  }
  return best;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace kernelkit::simd::scalar
