#include "kernelkit/uq/response_surface.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <stdexcept>

#include "kernelkit/kernel/interpolant.hpp"
#include "kernelkit/pde/fem.hpp"

namespace kernelkit::uq {

namespace {

std::vector<double> grid_point(const std::vector<kernel::PointSet>& sets, std::size_t flat) {
  std::vector<double> x;
  for (const auto& X : sets) {
    auto p = X.point(flat % X.size());
    x.insert(x.end(), p.begin(), p.end());
    flat /= X.size();
  }
  return x;
}

}  // namespace

ProblemSpec<Surrogate> response_surface_problem(std::vector<SparseFactor> blocks, SamplerFactor sampler) {
  if (blocks.empty()) throw std::invalid_argument("response_surface: need at least one interpolation block");
  ProblemSpec<Surrogate> problem;
  std::vector<kernel::MaternKernel> kernels;
  std::vector<kernel::Domain> domains;
  for (const auto& b : blocks) {
    problem.factors.push_back(kernel::sparse_factor_spec(b));
    kernels.push_back(b.kernel);
    domains.push_back(b.domain);
  }
  problem.factors.push_back(sampler.spec);
  const auto tk = kernel::TensorKernel::stacked(kernels);
  problem.tensor_evaluator = [tk, domains, sample = std::move(sampler.sample)](std::span<const std::size_t> N) {
    const std::size_t n = domains.size();
    std::vector<kernel::PointSet> sets;
    std::size_t total = 1;
    for (std::size_t j = 0; j < n; ++j) {
      sets.push_back(kernel::generate_points(domains[j], N[j]));
      total *= N[j];
    }
    std::vector<double> values(total);
    for (std::size_t i = 0; i < total; ++i) values[i] = sample(grid_point(sets, i), N[n]);
    Surrogate s(std::make_shared<const kernel::Interpolant>(kernel::Interpolant::fit_tensor(tk, std::move(sets), values)));
    s.set_domains(domains);
    return s;
  };
  return problem;
}

Estimate<Surrogate> response_surface(std::vector<SparseFactor> blocks, SamplerFactor sampler, int L,
                                     EngineOptions options) {
  std::vector<kernel::Domain> domains;
  for (const auto& b : blocks) domains.push_back(b.domain);
  auto est = smolyak_estimate(response_surface_problem(std::move(blocks), std::move(sampler)), L, options);
  est.value.set_domains(std::move(domains));
  return est;
}

std::size_t distinct_solves(std::span<const FactorSpec> factors, int L) {
  const std::size_t n = factors.size();
  std::set<std::vector<std::size_t>> seen;
  for (const auto& t : combination_coefficients(static_cast<int>(n), L)) {
    const auto N = detail::resolutions_for(factors, t.index.levels());
    std::size_t total = 1;
    for (std::size_t j = 0; j + 1 < n; ++j) total *= N[j];
    for (std::size_t i = 0; i < total; ++i) {
      std::vector<std::size_t> key(n);
      key[0] = N[n - 1];
      std::size_t rest = i;
      for (std::size_t j = 0; j + 1 < n; ++j) {
        key[j + 1] = rest % N[j];
        rest /= N[j];
      }
      seen.insert(std::move(key));
    }
  }
  return seen.size();
}

double base_resolution_for(const FactorSpec& pde, int top_level, int mesh_level) {
  const double side = std::ldexp(1.0, mesh_level) + 1.0;
  return side * side / std::exp(pde.t() * top_level);
}

BumpRsrSetup bump_rsr_setup(int n_bumps, int max_mesh_level, int L_ref) {
  BumpRsrSetup setup{pde::BumpDiffusionProblem::make(n_bumps), {}, {}};
  for (const auto& box : setup.problem.center_boxes) {
    setup.blocks.push_back({kernel::MaternKernel(2.0, 2), box, 0.0, 4.0});
  }
  FactorSpec fem(1.5, 1.0, "fem");
  if (L_ref <= n_bumps) throw std::invalid_argument("bump_rsr_setup: L_ref must exceed the number of bumps");
  fem.base_resolution = base_resolution_for(fem, L_ref - n_bumps, max_mesh_level);
  setup.sampler.spec = fem;

  struct Cache {
    std::mutex mutex;
    std::map<std::pair<std::size_t, std::vector<double>>, double> values;
  };
  auto cache = std::make_shared<Cache>();
  setup.sampler.sample = [problem = setup.problem, cache](std::span<const double> y, std::size_t M) {
    auto key = std::make_pair(M, std::vector<double>(y.begin(), y.end()));
    {
      std::lock_guard lock(cache->mutex);
      if (auto it = cache->values.find(key); it != cache->values.end()) return it->second;
    }
    const double q = pde::qoi(pde::solve_bump(problem, y, pde::MeshLevel::for_node_count(M)));
    std::lock_guard lock(cache->mutex);
    cache->values.emplace(std::move(key), q);
    return q;
  };
  return setup;
}

std::vector<std::vector<double>> evaluation_points(const std::vector<kernel::Domain>& domains, std::size_t count,
                                                   std::uint64_t seed) {
  const CounterRng rng(seed, 0x65766170ULL);
  std::uint64_t next = 0;
  std::vector<std::vector<double>> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<double> x;
    for (const auto& d : domains) {
      if (const auto* b = std::get_if<kernel::Box>(&d)) {
        for (std::size_t k = 0; k < b->lo.size(); ++k) x.push_back(b->lo[k] + (b->hi[k] - b->lo[k]) * rng.uniform(next++));
      } else {
        const auto& c = std::get<kernel::Disc>(d);
        for (;;) {
          const double u = 2.0 * rng.uniform(next++) - 1.0;
          const double v = 2.0 * rng.uniform(next++) - 1.0;
          if (u * u + v * v <= 1.0) {
            x.push_back(c.cx + c.r * u);
            x.push_back(c.cy + c.r * v);
            break;
          }
        }
      }
    }
    out.push_back(std::move(x));
  }
  return out;
}

std::vector<RsrRow> rsr_study(const std::vector<SparseFactor>& blocks, const SamplerFactor& sampler, int L_min,
                              int L_max, int L_ref, std::size_t eval_points, std::uint64_t seed,
                              EngineOptions options) {
  if (L_ref <= L_max) throw std::invalid_argument("rsr_study: the reference level must exceed L_max");
  const auto problem = response_surface_problem(blocks, sampler);
  std::vector<kernel::Domain> domains;
  for (const auto& b : blocks) domains.push_back(b.domain);
  const auto points = evaluation_points(domains, eval_points, seed);

  EvaluationCache<Surrogate> cache;
  const auto reference = smolyak_estimate(problem, L_ref, options, &cache).value;
  std::vector<double> ref_values(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) ref_values[i] = reference(points[i]);

  std::vector<RsrRow> rows;
  for (int L = L_min; L <= L_max; ++L) {
    const auto est = smolyak_estimate(problem, L, options, &cache);
    double sum_sq = 0.0, worst = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double d = ref_values[i] - est.value(points[i]);
      sum_sq += d * d;
      worst = std::max(worst, std::abs(d));
    }
    rows.push_back({L, est.ledger.total_work, distinct_solves(problem.factors, L),
                    std::sqrt(sum_sq / static_cast<double>(points.size())), worst});
  }
  return rows;
}

std::string rsr_csv(std::span<const RsrRow> rows) {
  std::string out = "L,work_units,pde_solves,error_l2,error_linf\n";
  char line[192];
  for (const auto& r : rows) {
    std::snprintf(line, sizeof line, "%d,%.12e,%zu,%.12e,%.12e\n", r.L, r.work, r.pde_solves, r.error_l2,
                  r.error_linf);
    out += line;
  }
  return out;
}

}  // namespace kernelkit::uq
