#include "kernelkit/uq/ouu.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <tuple>

#include "kernelkit/kernel/interpolant.hpp"
#include "kernelkit/pde/problems.hpp"
#include "kernelkit/rng.hpp"
#include "kernelkit/uq/response_surface.hpp"

namespace kernelkit::uq {

OuuSetup ouu_setup(int max_mesh_level, int L_ref, int field_level) {
  OuuSetup s;
  if (L_ref <= 3) throw std::invalid_argument("ouu_setup: L_ref must exceed the factor count 3");
  s.interp.base_resolution = 4.0;
  s.fem.base_resolution = base_resolution_for(s.fem, L_ref - 2, max_mesh_level);
  s.field = std::make_shared<const pde::GrfSampler>(pde::MeshLevel::dyadic(field_level));
  return s;
}

OuuSampler advection_sampler(const OuuSetup& setup, std::uint64_t seed) {
  if (!setup.field) throw std::invalid_argument("advection_sampler: setup has no field sampler");
  struct State {
    std::shared_ptr<const pde::GrfSampler> field;
    std::uint64_t seed;
    std::mutex mutex;
    std::map<std::uint64_t, std::shared_ptr<const pde::GrfSample>> draws;
    std::map<std::pair<std::uint64_t, int>, std::shared_ptr<const pde::GrfSample>> restricted;
    std::map<std::tuple<std::size_t, double, double, std::uint64_t>, double> qoi;
  };
  auto state = std::make_shared<State>();
  state->field = setup.field;
  state->seed = seed;

  auto field_on = [state](std::uint64_t k, const pde::MeshLevel& mesh) {
    std::shared_ptr<const pde::GrfSample> draw;
    {
      std::lock_guard lock(state->mutex);
      if (auto it = state->restricted.find({k, mesh.cells_per_axis}); it != state->restricted.end()) {
        return it->second;
      }
      if (auto it = state->draws.find(k); it != state->draws.end()) draw = it->second;
    }
    if (!draw) {
      draw = std::make_shared<const pde::GrfSample>(state->field->sample(state->seed, k));
      std::lock_guard lock(state->mutex);
      draw = state->draws.emplace(k, draw).first->second;
    }
    // Meshes no finer than the field grid see its bilinear restriction; finer meshes
    // evaluate the reference field directly.
    auto out = draw;
    if (mesh.cells_per_axis <= draw->reference.cells_per_axis) {
      out = std::make_shared<const pde::GrfSample>(
          pde::GrfSample{mesh, pde::restrict_field(*draw, mesh), draw->seed, draw->draw});
    }
    std::lock_guard lock(state->mutex);
    return state->restricted.emplace(std::make_pair(k, mesh.cells_per_axis), out).first->second;
  };

  return [state, field_on](std::span<const double> z, std::uint64_t k, std::size_t M) {
    const auto key = std::make_tuple(M, z[0], z[1], k);
    {
      std::lock_guard lock(state->mutex);
      if (auto it = state->qoi.find(key); it != state->qoi.end()) return it->second;
    }
    const auto mesh = pde::MeshLevel::for_node_count(M);
    const auto m = field_on(k, mesh);
    const double q = pde::qoi(pde::solve_advection_diffusion(
        {z[0], z[1]}, [m](double x, double y) { return m->value_at(x, y); }, mesh));
    std::lock_guard lock(state->mutex);
    state->qoi.emplace(key, q);
    return q;
  };
}

void DrawLog::record(std::vector<std::size_t> resolutions, std::vector<std::uint64_t> draws) {
  std::lock_guard lock(mutex_);
  entries_[std::move(resolutions)] = std::move(draws);
}

std::map<std::vector<std::size_t>, std::vector<std::uint64_t>> DrawLog::entries() const {
  std::lock_guard lock(mutex_);
  return entries_;
}

ProblemSpec<kernel::Surrogate> ouu_problem(const OuuSetup& setup, OuuSampler sampler, DrawLog* log) {
  ProblemSpec<kernel::Surrogate> problem;
  problem.factors = {setup.interp, setup.mc, setup.fem};
  const auto tk = kernel::TensorKernel::single(setup.kernel);
  const kernel::Disc disc = setup.disc;
  problem.tensor_evaluator = [tk, disc, sampler = std::move(sampler), log](std::span<const std::size_t> N) {
    const auto Z = kernel::generate_points(disc, N[0]);
    std::vector<double> means(Z.size());
    std::vector<std::uint64_t> draws;
    for (std::uint64_t k = 0; k < N[1]; ++k) draws.push_back(k);
    for (std::size_t i = 0; i < Z.size(); ++i) {
      double acc = 0.0;
      for (std::uint64_t k : draws) acc += sampler(Z.point(i), k, N[2]);
      means[i] = acc / static_cast<double>(draws.size());
    }
    if (log) log->record(std::vector<std::size_t>(N.begin(), N.end()), draws);
    kernel::Surrogate s(std::make_shared<const kernel::Interpolant>(kernel::Interpolant::fit(tk, Z, means)));
    s.set_domains({disc});
    return s;
  };
  return problem;
}

double OuuObjective::penalty(std::span<const double> z) const {
  double r2 = 0.0;
  for (double v : z) r2 += v * v;
  return penalty_weight * r2;
}

OuuResult ouu_surrogate(const OuuSetup& setup, int L, std::uint64_t seed, EngineOptions options, DrawLog* log) {
  auto est = smolyak_estimate(ouu_problem(setup, advection_sampler(setup, seed), log), L, options);
  est.value.set_domains({setup.disc});
  return {OuuObjective{std::move(est.value), setup.penalty_weight}, std::move(est.ledger), seed, L};
}

Minimum minimize_objective(const std::function<double(std::span<const double>)>& f, const kernel::Disc& disc,
                           int restarts, std::uint64_t seed) {
  if (restarts < 0) throw std::invalid_argument("minimize_objective: restarts must be nonnegative");
  std::vector<std::array<double, 2>> starts = {{disc.cx, disc.cy}};
  const std::size_t offset = seed % 64;
  if (restarts > 0) {
    const auto pts = kernel::generate_points(disc, offset + static_cast<std::size_t>(restarts));
    for (std::size_t i = offset; i < pts.size(); ++i) starts.push_back({pts.coord(i, 0), pts.coord(i, 1)});
  }
  const kernel::Domain domain = disc;
  Minimum best{{disc.cx, disc.cy}, std::numeric_limits<double>::infinity()};
  for (const auto& s : starts) {
    std::array<double, 2> z = s;
    double fz = f(z);
    for (double step = 0.25; step >= 1e-4; step *= 0.5) {
      for (int sweep = 0; sweep < 1000; ++sweep) {
        bool moved = false;
        for (int axis = 0; axis < 2; ++axis) {
          for (double dir : {1.0, -1.0}) {
            std::array<double, 2> trial = z;
            trial[axis] += dir * step;
            const auto p = kernel::project(domain, trial);
            trial = {p[0], p[1]};
            const double ft = f(trial);
            if (ft < fz) {
              z = trial;
              fz = ft;
              moved = true;
            }
          }
        }
        if (!moved) break;
      }
    }
    if (fz < best.value) best = {z, fz};
  }
  return best;
}

Minimum minimize_objective(const OuuObjective& objective, const kernel::Disc& disc, int restarts,
                           std::uint64_t seed) {
  return minimize_objective([&](std::span<const double> z) { return objective(z); }, disc, restarts, seed);
}

std::vector<OuuRow> ouu_study(const OuuSetup& setup, int L_min, int L_max, int L_ref, int replications,
                              std::size_t eval_points, std::uint64_t seed, EngineOptions options) {
  if (L_ref <= L_max) throw std::invalid_argument("ouu_study: the reference level must exceed L_max");
  if (replications < 1) throw std::invalid_argument("ouu_study: need at least one replication");
  const auto points = evaluation_points({setup.disc}, eval_points, seed);
  std::vector<OuuRow> rows;
  for (int L = L_min; L <= L_max; ++L) rows.push_back({L, 0.0, 0, 0.0, replications});

  for (int r = 0; r < replications; ++r) {
    const std::uint64_t rep_seed = derive_seed(seed, static_cast<std::uint64_t>(r));
    const auto problem = ouu_problem(setup, advection_sampler(setup, rep_seed));
    EvaluationCache<kernel::Surrogate> cache;
    const auto reference = smolyak_estimate(problem, L_ref, options, &cache).value;
    std::vector<double> ref_values(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) ref_values[i] = reference(points[i]);
    for (auto& row : rows) {
      const auto est = smolyak_estimate(problem, row.L, options, &cache);
      double worst = 0.0;
      for (std::size_t i = 0; i < points.size(); ++i) {
        worst = std::max(worst, std::abs(ref_values[i] - est.value(points[i])));
      }
      row.mse_linf += worst * worst / replications;
      row.work = est.ledger.total_work;
      row.pde_solves = distinct_solves(problem.factors, row.L);
    }
  }
  return rows;
}

std::string ouu_csv(std::span<const OuuRow> rows) {
  std::string out = "L,work_units,pde_solves,mse_linf,replications\n";
  char line[160];
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%d,%.12e,%zu,%.12e,%d\n", r.L, r.work, r.pde_solves, r.mse_linf,
                  r.replications);
    out += line;
  }
  return out;
}

}  // namespace kernelkit::uq
