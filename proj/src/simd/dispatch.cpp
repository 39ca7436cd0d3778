#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string_view>

#include "kernelkit/simd/kernels.hpp"

namespace kernelkit::simd {

namespace {

bool cpu_has_avx2() {
#if KERNELKIT_HAVE_AVX2_VARIANT && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa initial_isa() {
  // KERNELKIT_ISA=scalar pins the reference kernels, e.g. for bisecting a mismatch.
  if (const char* env = std::getenv("KERNELKIT_ISA"); env && std::string_view(env) == "scalar") {
    return Isa::scalar;
  }
  return detected_isa();
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

const char* isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

Isa detected_isa() { return cpu_has_avx2() ? Isa::avx2 : Isa::scalar; }

Isa active_isa() { return active().load(std::memory_order_relaxed); }

void set_isa(Isa isa) {
  if (isa == Isa::avx2 && !cpu_has_avx2()) throw std::invalid_argument("AVX2 is not supported on this CPU");
  active().store(isa, std::memory_order_relaxed);
}

void squared_distances(std::span<const double> soa, std::span<const double> query, std::span<double> out) {
#if KERNELKIT_HAVE_AVX2_VARIANT
  if (active_isa() == Isa::avx2) return avx2::squared_distances(soa, query, out);
#endif
  scalar::squared_distances(soa, query, out);
}

double min_squared_distance(std::span<const double> soa, std::size_t n, std::span<const double> query) {
#if KERNELKIT_HAVE_AVX2_VARIANT
  if (active_isa() == Isa::avx2) return avx2::min_squared_distance(soa, n, query);
#endif
  return scalar::min_squared_distance(soa, n, query);
}

double dot(std::span<const double> a, std::span<const double> b) {
#if KERNELKIT_HAVE_AVX2_VARIANT
  if (active_isa() == Isa::avx2) return avx2::dot(a, b);
#endif
  return scalar::dot(a, b);
}

}  // namespace kernelkit::simd
