#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "kernelkit/kernel/matern.hpp"
#include "kernelkit/kernel/points.hpp"
#include "kernelkit/rng.hpp"
#include "kernelkit/smolyak.hpp"

namespace kernelkit::uq {

// Quadrature rule for one block of variables: Q f = sum_i w_i f(y_i).
struct Rule {
  std::vector<std::vector<double>> nodes;
  std::vector<double> weights;
};

using RuleBuilder = std::function<Rule(std::size_t N)>;

struct QuadratureFactor {
  FactorSpec spec;
  RuleBuilder build;
};

// q_N(y): the discretized quantity of interest at resolution N.
using LevelSampler = std::function<double(std::span<const double> y, std::size_t N)>;

struct SamplerFactor {
  FactorSpec spec;
  LevelSampler sample;
};

// N-point midpoint rule on a 1-d interval, uniform probability measure.
Rule midpoint_rule(double lo, double hi, std::size_t N);
RuleBuilder midpoint_builder(double lo, double hi);

// Kernel quadrature on the first N Halton points of a box (uniform measure). Rules
// are computed once per N and cached inside the returned builder.
RuleBuilder kernel_rule_builder(kernel::MaternKernel kernel, kernel::Box box);

// (blocks..., sampler) as a scalar problem: a resolution tuple maps to the tensor
// product rule of the blocks applied to q_{N_last}.
ProblemSpec<double> expectation_problem(std::vector<QuadratureFactor> blocks, SamplerFactor sampler);

// Two-factor estimate sum_l Q_l Delta_{L-l} of E[q] through the combination rule. Needs L >= 2.
Estimate<double> multilevel_expectation(QuadratureFactor quadrature, SamplerFactor sampler, int L,
                                        EngineOptions options = {});

// (n+1)-factor estimate with one quadrature factor per block of variables.
Estimate<double> misc_expectation(std::vector<QuadratureFactor> blocks, SamplerFactor sampler, int L,
                                  EngineOptions options = {});

// (1/N) sum_{k<N} X(rng_k) with rng_k = CounterRng(seed, k).
double monte_carlo_mean(const std::function<double(const CounterRng&)>& sampler, std::size_t N, std::uint64_t seed);

}  // namespace kernelkit::uq
