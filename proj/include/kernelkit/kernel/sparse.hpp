#pragma once

#include <functional>
#include <span>
#include <vector>

#include "kernelkit/kernel/matern.hpp"
#include "kernelkit/kernel/points.hpp"
#include "kernelkit/kernel/surrogate.hpp"
#include "kernelkit/smolyak.hpp"

namespace kernelkit::kernel {

// One factor of a product domain: a Matern kernel on a d_j-dimensional domain
// and the Sobolev order alpha_j of the norm the error is measured in.
struct SparseFactor {
  MaternKernel kernel;
  Domain domain;
  double alpha = 0.0;
  double base_resolution = 1.0;
};

using Sampler = std::function<double(std::span<const double>)>;

// gamma_j = 1, beta_j = (beta - alpha) / d_j.
FactorSpec sparse_factor_spec(const SparseFactor& factor);

// The multilinear problem (Id^(1), ..., Id^(n)): a resolution tuple maps to the
// tensor interpolant of f on the product of nested Halton prefixes.
ProblemSpec<Surrogate> sparse_problem(std::vector<SparseFactor> factors, Sampler f);

Estimate<Surrogate> sparse_interpolate(std::vector<SparseFactor> factors, Sampler f, int L,
                                       EngineOptions options = {});

// Union of the tensor grids used by the combination rule at level L.
std::vector<std::vector<double>> sparse_grid_nodes(const std::vector<SparseFactor>& factors, int L);

}  // namespace kernelkit::kernel
