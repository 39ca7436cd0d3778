#include "kernelkit/kernel/sparse.hpp"

#include <memory>
#include <set>
#include <stdexcept>

#include "kernelkit/kernel/interpolant.hpp"

namespace kernelkit::kernel {

namespace {

std::vector<FactorSpec> specs_for(const std::vector<SparseFactor>& factors) {
  std::vector<FactorSpec> specs;
  for (const auto& f : factors) specs.push_back(sparse_factor_spec(f));
  return specs;
}

std::vector<double> grid_point(const std::vector<PointSet>& sets, std::size_t flat) {
  std::vector<double> x;
  for (const auto& X : sets) {
    auto p = X.point(flat % X.size());
    x.insert(x.end(), p.begin(), p.end());
    flat /= X.size();
  }
  return x;
}

}  // namespace

FactorSpec sparse_factor_spec(const SparseFactor& factor) {
  const double d = factor.kernel.dim();
  if (domain_dim(factor.domain) != static_cast<std::size_t>(factor.kernel.dim())) {
    throw std::invalid_argument("sparse factor: kernel and domain dimensions differ");
  }
  if (!(factor.kernel.beta() > 0.5 * d)) throw std::invalid_argument("sparse factor: need beta > d/2");
  return FactorSpec(1.0, (factor.kernel.beta() - factor.alpha) / d, "interp", factor.base_resolution);
}

ProblemSpec<Surrogate> sparse_problem(std::vector<SparseFactor> factors, Sampler f) {
  if (factors.empty()) throw std::invalid_argument("sparse_problem: no factors");
  ProblemSpec<Surrogate> problem;
  problem.factors = specs_for(factors);
  std::vector<MaternKernel> kernels;
  std::vector<Domain> domains;
  for (const auto& fac : factors) {
    kernels.push_back(fac.kernel);
    domains.push_back(fac.domain);
  }
  const TensorKernel kernel = TensorKernel::stacked(kernels);
  problem.tensor_evaluator = [kernel, domains, f = std::move(f)](std::span<const std::size_t> N) {
    std::vector<PointSet> sets;
    std::size_t total = 1;
    for (std::size_t j = 0; j < N.size(); ++j) {
      sets.push_back(generate_points(domains[j], N[j]));
      total *= N[j];
    }
    std::vector<double> values(total);
    for (std::size_t i = 0; i < total; ++i) values[i] = f(grid_point(sets, i));
    Surrogate s(std::make_shared<const Interpolant>(Interpolant::fit_tensor(kernel, std::move(sets), values)));
    s.set_domains(domains);
    return s;
  };
  return problem;
}

Estimate<Surrogate> sparse_interpolate(std::vector<SparseFactor> factors, Sampler f, int L, EngineOptions options) {
  std::vector<Domain> domains;
  for (const auto& fac : factors) domains.push_back(fac.domain);
  auto est = smolyak_estimate(sparse_problem(std::move(factors), std::move(f)), L, options);
  est.value.set_domains(std::move(domains));
  return est;
}

std::vector<std::vector<double>> sparse_grid_nodes(const std::vector<SparseFactor>& factors, int L) {
  const auto specs = specs_for(factors);
  const auto terms = combination_coefficients(static_cast<int>(factors.size()), L);
  // Nested prefixes: a point is identified by its per-factor sequence indices.
  std::set<std::vector<std::size_t>> seen;
  std::vector<std::size_t> largest(factors.size(), 0);
  for (const auto& t : terms) {
    const auto N = detail::resolutions_for(specs, t.index.levels());
    std::size_t total = 1;
    for (std::size_t j = 0; j < N.size(); ++j) {
      total *= N[j];
      largest[j] = std::max(largest[j], N[j]);
    }
    for (std::size_t i = 0; i < total; ++i) {
      std::vector<std::size_t> key(N.size());
      std::size_t rest = i;
      for (std::size_t j = 0; j < N.size(); ++j) {
        key[j] = rest % N[j];
        rest /= N[j];
      }
      seen.insert(std::move(key));
    }
  }
  std::vector<PointSet> sets;
  for (std::size_t j = 0; j < factors.size(); ++j) sets.push_back(generate_points(factors[j].domain, largest[j]));
  std::vector<std::vector<double>> out;
  for (const auto& key : seen) {
    std::vector<double> x;
    for (std::size_t j = 0; j < key.size(); ++j) {
      auto p = sets[j].point(key[j]);
      x.insert(x.end(), p.begin(), p.end());
    }
    out.push_back(std::move(x));
  }
  return out;
}

}  // namespace kernelkit::kernel
