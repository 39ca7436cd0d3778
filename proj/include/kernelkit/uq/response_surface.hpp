#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kernelkit/kernel/sparse.hpp"
#include "kernelkit/kernel/surrogate.hpp"
#include "kernelkit/pde/problems.hpp"
#include "kernelkit/smolyak.hpp"
#include "kernelkit/uq/expectation.hpp"

namespace kernelkit::uq {

using kernel::SparseFactor;
using kernel::Surrogate;

// (blocks..., sampler): a resolution tuple maps to the tensor interpolant of
// q_{N_last} on the product of nested Halton prefixes of the blocks.
ProblemSpec<Surrogate> response_surface_problem(std::vector<SparseFactor> blocks, SamplerFactor sampler);

Estimate<Surrogate> response_surface(std::vector<SparseFactor> blocks, SamplerFactor sampler, int L,
                                     EngineOptions options = {});

// Distinct samples the combination rule at level L needs when every factor but
// the last contributes a nested index set of size N_j and the last factor is the
// solver resolution: the number of distinct (N_last, i_1, ..., i_{n-1}).
std::size_t distinct_solves(std::span<const FactorSpec> factors, int L);

// Base resolution M0 that puts the solver factor at `top_level` on a mesh with
// (2^mesh_level + 1)^2 nodes.
double base_resolution_for(const FactorSpec& pde, int top_level, int mesh_level);

struct BumpRsrSetup {
  pde::BumpDiffusionProblem problem;
  std::vector<SparseFactor> blocks;
  SamplerFactor sampler;
};

// Matern beta = 2 on each center box (rate (1, 1), 4 e^(t l) points at level l)
// and a FEM factor with work exponent 3/2 and rate 1 whose finest mesh at L_ref
// has (2^max_mesh_level + 1)^2 nodes. Solves are cached by (mesh, centers).
BumpRsrSetup bump_rsr_setup(int n_bumps, int max_mesh_level, int L_ref);

// Fixed-seed uniform points in the product of the domains.
std::vector<std::vector<double>> evaluation_points(const std::vector<kernel::Domain>& domains, std::size_t count,
                                                   std::uint64_t seed);

struct RsrRow {
  int L = 0;
  double work = 0.0;
  std::size_t pde_solves = 0;
  double error_l2 = 0.0;
  double error_linf = 0.0;
};

// Errors against the estimate at L_ref, measured at `eval_points` random points.
std::vector<RsrRow> rsr_study(const std::vector<SparseFactor>& blocks, const SamplerFactor& sampler, int L_min,
                              int L_max, int L_ref, std::size_t eval_points, std::uint64_t seed,
                              EngineOptions options = {});

// `L,work_units,pde_solves,error_l2,error_linf`.
std::string rsr_csv(std::span<const RsrRow> rows);

}  // namespace kernelkit::uq
