#pragma once

// Data-parallel inner loops shared by the kernel and GRF code. Point sets are
// stored structure-of-arrays: coordinate k of point i lives at soa[k * n + i].
//
// Each kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant chosen at runtime. squared_distances and min_squared_distance are
// bitwise identical across variants (same operation order per lane, no FMA);
// dot reassociates the sum and agrees to rounding.

#include <cstddef>
#include <span>

namespace kernelkit::simd {

enum class Isa { scalar, avx2 };

const char* isa_name(Isa isa);

// Best variant supported by this CPU.
Isa detected_isa();
// Variant used by the dispatching entry points below.
Isa active_isa();
// Forces a variant. Throws std::invalid_argument if the CPU lacks it.
void set_isa(Isa isa);

// out[i] = sum_k (soa[k*n + i] - query[k])^2 with n = out.size(), dim = query.size().
void squared_distances(std::span<const double> soa, std::span<const double> query, std::span<double> out);
// min_i of the above; +inf for an empty set.
double min_squared_distance(std::span<const double> soa, std::size_t n, std::span<const double> query);
double dot(std::span<const double> a, std::span<const double> b);

namespace scalar {
void squared_distances(std::span<const double> soa, std::span<const double> query, std::span<double> out);
double min_squared_distance(std::span<const double> soa, std::size_t n, std::span<const double> query);
double dot(std::span<const double> a, std::span<const double> b);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define KERNELKIT_HAVE_AVX2_VARIANT 1
namespace avx2 {
void squared_distances(std::span<const double> soa, std::span<const double> query, std::span<double> out);
double min_squared_distance(std::span<const double> soa, std::size_t n, std::span<const double> query);
double dot(std::span<const double> a, std::span<const double> b);
}  // namespace avx2
#else
#define KERNELKIT_HAVE_AVX2_VARIANT 0
#endif

}  // namespace kernelkit::simd
