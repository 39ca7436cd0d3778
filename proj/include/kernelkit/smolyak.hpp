#pragma once

#include <concepts>
#include <cstddef>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kernelkit/error.hpp"
#include "kernelkit/multiindex.hpp"
#include "kernelkit/parallel.hpp"

namespace kernelkit {

// Work and convergence exponents of one input approximation. Level l maps to the
// resolution ceil(base_resolution * exp(t l)) with t = 1 / (gamma + beta).
struct FactorSpec {
  double gamma = 1.0;
  double beta = 1.0;
  std::string label;
  double base_resolution = 1.0;

  FactorSpec() = default;
  FactorSpec(double gamma, double beta, std::string label = {}, double base_resolution = 1.0);

  double t() const { return 1.0 / (gamma + beta); }
};

// Level 0 is the auxiliary zero approximation and maps to resolution 0.
std::size_t level_to_resolution(const FactorSpec& factor, int level);

struct RatePrediction {
  double rho = 0.0;
  int n0 = 0;
  std::vector<double> g;
  std::vector<double> b;
  double g_max = 0.0;
  double b_min = 0.0;

  // Predicted log-log slope of error against work.
  double slope() const { return -1.0 / rho; }
};

RatePrediction predicted_rates(std::span<const FactorSpec> factors);

struct WorkLedger {
  double total_work = 0.0;
  // Distinct resolution tuples the estimate needs, i.e. evaluator calls on a cold cache.
  std::size_t evaluations = 0;
  // Evaluator calls actually made by this estimate (cache misses).
  std::size_t new_evaluations = 0;
  std::vector<std::pair<MultiIndex, double>> per_term;
};

// A value type closed under addition and real scaling. A default-constructed
// value is the zero element.
template <class V>
concept LinearValue = std::default_initializable<V> && std::copyable<V> &&
                      requires(V a, const V b, double c) {
                        { a += b };
                        { a *= c };
                      };

template <LinearValue V>
struct ProblemSpec {
  std::vector<FactorSpec> factors;
  // Maps a resolution tuple (N_1, ..., N_n) to the tensor value M(w_N1, ..., w_Nn).
  std::function<V(std::span<const std::size_t>)> tensor_evaluator;

  std::size_t n() const { return factors.size(); }
};

template <LinearValue V>
struct Estimate {
  V value{};
  WorkLedger ledger;
};

struct EngineOptions {
  unsigned workers = 1;
};

// Evaluator failure with the offending multi-index attached.
class EvaluationError : public NumericalError {
 public:
  EvaluationError(MultiIndex index, const std::string& what)
      : NumericalError("evaluation failed at multi-index " + index.to_string() + ": " + what),
        index_(std::move(index)) {}

  const MultiIndex& index() const { return index_; }

 private:
  MultiIndex index_;
};

// Memo of tensor evaluations keyed by resolution tuple. Concurrent callers asking
// for the same key block on a single evaluation.
template <LinearValue V>
class EvaluationCache {
 public:
  template <class Compute>
  V get_or_compute(const std::vector<std::size_t>& key, Compute&& compute) {
    std::shared_future<V> future;
    std::promise<V> promise;
    bool owner = false;
    {
      std::lock_guard lock(mutex_);
      auto it = entries_.find(key);
      if (it == entries_.end()) {
        future = promise.get_future().share();
        entries_.emplace(key, future);
        owner = true;
      } else {
        future = it->second;
      }
    }
    if (owner) {
      try {
        promise.set_value(compute());
      } catch (...) {
        promise.set_exception(std::current_exception());
      }
    }
    return future.get();
  }

  std::size_t size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
  }

 private:
  mutable std::mutex mutex_;
  std::map<std::vector<std::size_t>, std::shared_future<V>> entries_;
};

namespace detail {

std::vector<std::size_t> resolutions_for(std::span<const FactorSpec> factors, std::span<const int> levels);
double term_work(std::span<const FactorSpec> factors, std::span<const std::size_t> resolutions);
void require_levels(std::size_t n, int L);
std::size_t count_distinct(std::vector<std::vector<std::size_t>> tuples);

template <LinearValue V>
V evaluate_term(const ProblemSpec<V>& problem, const MultiIndex& index,
                const std::vector<std::size_t>& resolutions, EvaluationCache<V>& cache) {
  try {
    return cache.get_or_compute(resolutions,
                                [&] { return problem.tensor_evaluator(std::span<const std::size_t>(resolutions)); });
  } catch (const EvaluationError&) {
    throw;
  } catch (const std::exception& e) {
    throw EvaluationError(index, e.what());
  }
}

}  // namespace detail

// Combination-rule estimate sum c_l v_l over L-n+1 <= |l|_1 <= L. Every term with a
// nonzero coefficient is charged prod_j N_{l_j}^{gamma_j} work units. Terms are
// evaluated through `options.workers` threads and reduced in lexicographic order.
template <LinearValue V>
Estimate<V> smolyak_estimate(const ProblemSpec<V>& problem, int L, EngineOptions options = {},
                             EvaluationCache<V>* shared_cache = nullptr) {
  const std::size_t n = problem.n();
  detail::require_levels(n, L);
  EvaluationCache<V> local_cache;
  EvaluationCache<V>& cache = shared_cache ? *shared_cache : local_cache;
  const std::size_t cached_before = cache.size();

  const auto terms = combination_coefficients(static_cast<int>(n), L);
  std::vector<std::vector<std::size_t>> resolutions(terms.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    resolutions[i] = detail::resolutions_for(problem.factors, terms[i].index.levels());
  }
  std::vector<V> values(terms.size());
  parallel_for(terms.size(), options.workers, [&](std::size_t i) {
    values[i] = detail::evaluate_term(problem, terms[i].index, resolutions[i], cache);
  });

  Estimate<V> out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    V scaled = values[i];
    scaled *= static_cast<double>(terms[i].coefficient);
    out.value += scaled;
    const double work = detail::term_work(problem.factors, resolutions[i]);
    out.ledger.total_work += work;
    out.ledger.per_term.emplace_back(terms[i].index, work);
  }
  out.ledger.evaluations = detail::count_distinct(resolutions);
  out.ledger.new_evaluations = cache.size() - cached_before;
  return out;
}

// The same estimator as the plain delta sum over |l|_1 <= L, each delta expanded
// into its inclusion-exclusion corners. Zero-flagged corners cost nothing.
template <LinearValue V>
Estimate<V> smolyak_via_deltas(const ProblemSpec<V>& problem, int L, EngineOptions options = {},
                               EvaluationCache<V>* shared_cache = nullptr) {
  const std::size_t n = problem.n();
  detail::require_levels(n, L);
  EvaluationCache<V> local_cache;
  EvaluationCache<V>& cache = shared_cache ? *shared_cache : local_cache;
  const std::size_t cached_before = cache.size();

  struct Corner {
    MultiIndex owner;
    int sign;
    std::vector<std::size_t> resolutions;
  };
  std::vector<Corner> corners;
  for (const auto& index : enumerate_simplex(static_cast<int>(n), L)) {
    for (auto& c : delta_expand(index)) {
      if (c.zero) continue;
      corners.push_back({index, c.sign, detail::resolutions_for(problem.factors, c.levels)});
    }
  }
  std::vector<V> values(corners.size());
  parallel_for(corners.size(), options.workers, [&](std::size_t i) {
    values[i] = detail::evaluate_term(problem, corners[i].owner, corners[i].resolutions, cache);
  });

  Estimate<V> out;
  for (std::size_t i = 0; i < corners.size(); ++i) {
    V scaled = values[i];
    scaled *= static_cast<double>(corners[i].sign);
    out.value += scaled;
    const double work = detail::term_work(problem.factors, corners[i].resolutions);
    out.ledger.total_work += work;
    out.ledger.per_term.emplace_back(corners[i].owner, work);
  }
  std::vector<std::vector<std::size_t>> tuples;
  for (const auto& c : corners) tuples.push_back(c.resolutions);
  out.ledger.evaluations = detail::count_distinct(tuples);
  out.ledger.new_evaluations = cache.size() - cached_before;
  return out;
}

struct StudyRow {
  int L = 0;
  double work = 0.0;
  std::size_t evaluations = 0;
  double error = 0.0;
};

// One row per L in [L_min, L_max]. The norm receives reference - S_L. Without a
// reference the estimator at L_max + 2 is used. The evaluation cache is shared
// across the whole study.
template <LinearValue V>
std::vector<StudyRow> convergence_study(const ProblemSpec<V>& problem, int L_min, int L_max,
                                        std::optional<V> reference,
                                        const std::function<double(const V&)>& norm,
                                        EngineOptions options = {}) {
  detail::require_levels(problem.n(), L_min);
  if (L_max < L_min) throw std::invalid_argument("convergence_study: empty L range");
  EvaluationCache<V> cache;
  if (!reference) reference = smolyak_estimate(problem, L_max + 2, options, &cache).value;
  std::vector<StudyRow> rows;
  for (int L = L_min; L <= L_max; ++L) {
    auto est = smolyak_estimate(problem, L, options, &cache);
    V diff = *reference;
    V neg = est.value;
    neg *= -1.0;
    diff += neg;
    rows.push_back({L, est.ledger.total_work, est.ledger.evaluations, norm(diff)});
  }
  return rows;
}

// Least-squares slope of log y against log x over the trailing `window` fraction
// of the table. Throws on nonpositive values or fewer than 3 usable points.
double fit_loglog_slope(std::span<const std::pair<double, double>> table, double window = 1.0);

// Least-squares slope of log y against x (semi-log), same conventions.
double fit_semilog_slope(std::span<const std::pair<double, double>> table, double window = 1.0);

// `L,work_units,evaluations,error` with %.12e reals.
std::string study_csv(std::span<const StudyRow> rows);

}  // namespace kernelkit
