#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "kernelkit/kernel/surrogate.hpp"
#include "kernelkit/pde/grf.hpp"
#include "kernelkit/smolyak.hpp"

namespace kernelkit::uq {

// Factors of the optimization-under-uncertainty problem: a kernel interpolant in
// the velocity z over the unit disc, an empirical mean over field draws, and the
// FEM discretization.
struct OuuSetup {
  kernel::MaternKernel kernel{4.0, 2};
  kernel::Disc disc{0.0, 0.0, 1.0};
  FactorSpec interp{1.0, 1.5, "interp"};
  FactorSpec mc{1.0, 0.5, "mc"};
  FactorSpec fem{1.5, 1.0, "fem"};
  std::shared_ptr<const pde::GrfSampler> field;
  double penalty_weight = 0.1;
};

// Kernel beta = 4 on the disc (L-infinity rate (beta - d/2)/d = 3/2), mean rate
// 1/2, FEM rate 1 with work exponent 3/2. The interpolation factor starts from
// 4 e^(t l) points so the coarsest surrogates are not pure extrapolation. The FEM
// base resolution puts the finest mesh at L_ref on (2^max_mesh_level + 1)^2
// nodes; the field lives on the dyadic grid of field_level.
OuuSetup ouu_setup(int max_mesh_level, int L_ref, int field_level = 5);

// Q(u) for velocity z, field draw k and solver resolution M.
using OuuSampler = std::function<double(std::span<const double> z, std::uint64_t draw, std::size_t M)>;

// Advection-diffusion QoI with field draw (seed, k). Each draw is sampled once,
// restricted to each mesh once, and every (M, z, k) solve is cached.
OuuSampler advection_sampler(const OuuSetup& setup, std::uint64_t seed);

// Field draws used by each tensor evaluation, keyed by resolution tuple.
class DrawLog {
 public:
  void record(std::vector<std::size_t> resolutions, std::vector<std::uint64_t> draws);
  std::map<std::vector<std::size_t>, std::vector<std::uint64_t>> entries() const;

 private:
  mutable std::mutex mutex_;
  std::map<std::vector<std::size_t>, std::vector<std::uint64_t>> entries_;
};

// (N_z, N_mc, M) maps to the interpolant over the first N_z disc points of the
// mean of Q over draws 0..N_mc-1 at resolution M. Draw k is the same field in
// every term, so differences across mesh corners use identical draws.
ProblemSpec<kernel::Surrogate> ouu_problem(const OuuSetup& setup, OuuSampler sampler, DrawLog* log = nullptr);

// phi(z) = v(z) + w |z|^2 with v the surrogate of z -> E[Q].
struct OuuObjective {
  kernel::Surrogate surrogate;
  double penalty_weight = 0.1;

  double expected_qoi(std::span<const double> z) const { return surrogate(z); }
  double penalty(std::span<const double> z) const;
  double operator()(std::span<const double> z) const { return expected_qoi(z) + penalty(z); }
};

struct OuuResult {
  OuuObjective objective;
  WorkLedger ledger;
  std::uint64_t seed = 0;
  int L = 0;
};

OuuResult ouu_surrogate(const OuuSetup& setup, int L, std::uint64_t seed, EngineOptions options = {},
                        DrawLog* log = nullptr);

struct Minimum {
  std::array<double, 2> z{0.0, 0.0};
  double value = 0.0;
};

// Multi-start coordinate pattern search on the disc. Starts are the origin and
// `restarts` Halton points of the disc (offset by seed mod 64); the step shrinks
// from 0.25 to 1e-4 and trial points are projected onto the disc.
Minimum minimize_objective(const std::function<double(std::span<const double>)>& f, const kernel::Disc& disc,
                           int restarts, std::uint64_t seed);
Minimum minimize_objective(const OuuObjective& objective, const kernel::Disc& disc, int restarts,
                           std::uint64_t seed);

struct OuuRow {
  int L = 0;
  double work = 0.0;
  std::size_t pde_solves = 0;
  double mse_linf = 0.0;
  int replications = 0;
};

// Mean over replications of the squared L-infinity distance (at `eval_points`
// disc points) to the estimate at L_ref. Replication r uses seed derive_seed(seed, r)
// for both the estimate and its reference.
std::vector<OuuRow> ouu_study(const OuuSetup& setup, int L_min, int L_max, int L_ref, int replications,
                              std::size_t eval_points, std::uint64_t seed, EngineOptions options = {});

// `L,work_units,pde_solves,mse_linf,replications`.
std::string ouu_csv(std::span<const OuuRow> rows);

}  // namespace kernelkit::uq
