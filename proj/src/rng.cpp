#include "kernelkit/rng.hpp"

#include <cmath>
#include <numbers>

#include "kernelkit/error.hpp"

namespace kernelkit {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
}

ConditioningError::ConditioningError(std::size_t node_count, double min_separation)
    : NumericalError("kernel matrix factorization failed for " + std::to_string(node_count) +
                     " nodes (minimum separation " + std::to_string(min_separation) + ")"),
      node_count_(node_count),
      min_separation_(min_separation) {}

std::uint64_t mix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t counter) {
  return mix64(mix64(seed) ^ mix64(counter + kGolden));
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(derive_seed(seed, stream)) {}

std::uint64_t CounterRng::bits(std::uint64_t index) const {
  return mix64(key_ + kGolden * (index + 1));
}

double CounterRng::uniform(std::uint64_t index) const {
  // 53 random mantissa bits, shifted off zero.
  return (static_cast<double>(bits(index) >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal(std::uint64_t index) const {
  const double u1 = uniform(2 * index);
  const double u2 = uniform(2 * index + 1);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace kernelkit
