#include "kernelkit/uq/expectation.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

#include "kernelkit/kernel/quadrature.hpp"

namespace kernelkit::uq {

Rule midpoint_rule(double lo, double hi, std::size_t N) {
  if (N == 0) throw std::invalid_argument("midpoint_rule: N must be positive");
  if (!(hi > lo)) throw std::invalid_argument("midpoint_rule: need lo < hi");
  Rule r;
  const double h = (hi - lo) / static_cast<double>(N);
  for (std::size_t i = 0; i < N; ++i) {
    r.nodes.push_back({lo + (static_cast<double>(i) + 0.5) * h});
    r.weights.push_back(1.0 / static_cast<double>(N));
  }
  return r;
}

RuleBuilder midpoint_builder(double lo, double hi) {
  return [lo, hi](std::size_t N) { return midpoint_rule(lo, hi, N); };
}

RuleBuilder kernel_rule_builder(kernel::MaternKernel kernel, kernel::Box box) {
  struct Cache {
    std::mutex mutex;
    std::map<std::size_t, std::shared_ptr<const Rule>> rules;
  };
  auto cache = std::make_shared<Cache>();
  const auto tk = kernel::TensorKernel::single(kernel);
  return [cache, tk, box](std::size_t N) {
    {
      std::lock_guard lock(cache->mutex);
      if (auto it = cache->rules.find(N); it != cache->rules.end()) return *it->second;
    }
    const auto nodes = kernel::generate_points(box, N);
    const auto q = kernel::quadrature_weights(tk, nodes);
    auto rule = std::make_shared<Rule>();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      auto p = nodes.point(i);
      rule->nodes.emplace_back(p.begin(), p.end());
    }
    rule->weights = q.weights;
    std::lock_guard lock(cache->mutex);
    return *cache->rules.emplace(N, std::move(rule)).first->second;
  };
}

ProblemSpec<double> expectation_problem(std::vector<QuadratureFactor> blocks, SamplerFactor sampler) {
  if (blocks.empty()) throw std::invalid_argument("expectation_problem: need at least one quadrature block");
  ProblemSpec<double> problem;
  for (const auto& b : blocks) problem.factors.push_back(b.spec);
  problem.factors.push_back(sampler.spec);
  problem.tensor_evaluator = [blocks = std::move(blocks), sample = std::move(sampler.sample)](
                                 std::span<const std::size_t> N) {
    const std::size_t n = blocks.size();
    std::vector<Rule> rules;
    std::size_t total = 1;
    for (std::size_t j = 0; j < n; ++j) {
      rules.push_back(blocks[j].build(N[j]));
      total *= rules.back().weights.size();
    }
    double acc = 0.0;
    std::vector<double> y;
    for (std::size_t i = 0; i < total; ++i) {
      std::size_t rest = i;
      double w = 1.0;
      y.clear();
      for (const auto& r : rules) {
        const std::size_t k = rest % r.weights.size();
        rest /= r.weights.size();
        w *= r.weights[k];
        y.insert(y.end(), r.nodes[k].begin(), r.nodes[k].end());
      }
      acc += w * sample(y, N[n]);
    }
    return acc;
  };
  return problem;
}

Estimate<double> multilevel_expectation(QuadratureFactor quadrature, SamplerFactor sampler, int L,
                                        EngineOptions options) {
  return misc_expectation({std::move(quadrature)}, std::move(sampler), L, options);
}

Estimate<double> misc_expectation(std::vector<QuadratureFactor> blocks, SamplerFactor sampler, int L,
                                  EngineOptions options) {
  return smolyak_estimate(expectation_problem(std::move(blocks), std::move(sampler)), L, options);
}

double monte_carlo_mean(const std::function<double(const CounterRng&)>& sampler, std::size_t N, std::uint64_t seed) {
  if (N == 0) throw std::invalid_argument("monte_carlo_mean: N must be positive");
  double acc = 0.0;
  for (std::size_t k = 0; k < N; ++k) acc += sampler(CounterRng(seed, k));
  return acc / static_cast<double>(N);
}

}  // namespace kernelkit::uq
