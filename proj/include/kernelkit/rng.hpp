#pragma once

#include <cstdint>

namespace kernelkit {

// SplitMix64 finalizer. Bijective on 64-bit words.
std::uint64_t mix64(std::uint64_t x);

// Derives an independent 64-bit key from a parent key and a counter.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t counter);

// Counter-based generator: every draw is a pure function of (seed, stream, index),
// so parallel consumers see the same numbers regardless of scheduling.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t bits(std::uint64_t index) const;
  // Uniform on the open interval (0, 1).
  double uniform(std::uint64_t index) const;
  // Standard normal via Box-Muller on draws (2*index, 2*index+1).
  double normal(std::uint64_t index) const;

 private:
  std::uint64_t key_;
};

}  // namespace kernelkit
