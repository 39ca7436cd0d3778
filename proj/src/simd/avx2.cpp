#include "kernelkit/simd/kernels.hpp"

#if KERNELKIT_HAVE_AVX2_VARIANT

#include <immintrin.h>

#include <limits>

// Only "avx2" is enabled, not "fma": separate mul/add keeps the distance kernels
// bitwise identical to the scalar reference.
#define KK_AVX2 __attribute__((target("avx2")))

namespace kernelkit::simd::avx2 {

KK_AVX2 void squared_distances(std::span<const double> soa, std::span<const double> query,
                               std::span<double> out) {
  const std::size_t n = out.size();
  const std::size_t dim = query.size();
  double* dst = out.data();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t k = 0; k < dim; ++k) {
      const __m256d x = _mm256_loadu_pd(soa.data() + k * n + i);
      const __m256d d = _mm256_sub_pd(x, _mm256_set1_pd(query[k]));
      acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
    }
    _mm256_storeu_pd(dst + i, acc);
  }
  for (; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      const double d = soa[k * n + i] - query[k];
      acc = acc + d * d;
    }
    dst[i] = acc;
  }
}

KK_AVX2 double min_squared_distance(std::span<const double> soa, std::size_t n, std::span<const double> query) {
  const std::size_t dim = query.size();
  double best = std::numeric_limits<double>::infinity();
  std::size_t i = 0;
  if (n >= 4) {
    __m256d vbest = _mm256_set1_pd(best);
    for (; i + 4 <= n; i += 4) {
      __m256d acc = _mm256_setzero_pd();
      for (std::size_t k = 0; k < dim; ++k) {
        const __m256d x = _mm256_loadu_pd(soa.data() + k * n + i);
        const __m256d d = _mm256_sub_pd(x, _mm256_set1_pd(query[k]));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
      }
      vbest = _mm256_min_pd(vbest, acc);
    }
    alignas(32) double lanes[4];
    _mm256_store_pd(lanes, vbest);
    for (double v : lanes) {
      if (v < best) best = v;
    }
  }
  for (; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      const double d = soa[k * n + i] - query[k];
      acc = acc + d * d;
    }
    if (acc < best) best = acc;
  }
  return best;
}

KK_AVX2 double dot(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i)));
    acc1 = _mm256_add_pd(acc1,
                         _mm256_mul_pd(_mm256_loadu_pd(a.data() + i + 4), _mm256_loadu_pd(b.data() + i + 4)));
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a.data() + i), _mm256_loadu_pd(b.data() + i)));
  }
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, _mm256_add_pd(acc0, acc1));
  double sum = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

}  // namespace kernelkit::simd::avx2

#endif
