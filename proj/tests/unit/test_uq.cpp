#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstring>
#include <numbers>

#include "kernelkit/uq/expectation.hpp"
#include "kernelkit/uq/ouu.hpp"
#include "kernelkit/uq/response_surface.hpp"
#include "support.hpp"

using namespace kernelkit;
using namespace kernelkit::uq;

namespace {

// q_N(y) = y^2 + 1/N.
SamplerFactor synthetic_sampler(FactorSpec spec) {
  return {spec, [](std::span<const double> y, std::size_t N) { return y[0] * y[0] + 1.0 / static_cast<double>(N); }};
}

double rule_apply(const Rule& r, const std::function<double(double)>& f) {
  double s = 0.0;
  for (std::size_t i = 0; i < r.weights.size(); ++i) s += r.weights[i] * f(r.nodes[i][0]);
  return s;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("midpoint rule") {
  const auto r = midpoint_rule(0.0, 1.0, 4);
  CHECK(r.nodes[0][0] == 0.125);
  double w = 0.0;
  for (double x : r.weights) w += x;
  CHECK(w == doctest::Approx(1.0));
  // Midpoint error for y^2 is -1/(12 N^2).
  CHECK(rule_apply(r, [](double y) { return y * y; }) == doctest::Approx(1.0 / 3.0 - 1.0 / 192.0));
  CHECK_THROWS(midpoint_rule(0.0, 1.0, 0));
}

TEST_CASE("multilevel expectation equals the hand-written telescoped sum") {
  const FactorSpec fq(1.0, 2.0, "quad"), fs(1.0, 1.0, "pde");
  const QuadratureFactor quad{fq, midpoint_builder(0.0, 1.0)};
  const auto sampler = synthetic_sampler(fs);
  for (int L = 2; L <= 6; ++L) {
    // sum_{l=1}^{L-1} Q_l (q_{N_{L-l}} - q_{N_{L-l-1}}), with q_{N_0} = 0.
    double oracle = 0.0;
    for (int l = 1; l <= L - 1; ++l) {
      const auto rule = midpoint_rule(0.0, 1.0, level_to_resolution(fq, l));
      const int k = L - l;
      const auto Nk = level_to_resolution(fs, k);
      const auto Nkm = level_to_resolution(fs, k - 1);
      oracle += rule_apply(rule, [&](double y) {
        const double hi = y * y + 1.0 / static_cast<double>(Nk);
        const double lo = Nkm == 0 ? 0.0 : y * y + 1.0 / static_cast<double>(Nkm);
        return hi - lo;
      });
    }
    const auto est = multilevel_expectation(quad, sampler, L);
    CHECK(est.value == doctest::Approx(oracle).epsilon(1e-13));
    const auto generic = smolyak_estimate(expectation_problem({quad}, sampler), L);
    CHECK(std::abs(generic.value - est.value) <= 1e-12);
  }
}

TEST_CASE("multilevel expectation saturates with exact inputs") {
  // Quadrature exact for y^2 (three Gauss points) and a sampler exact from level 1.
  const QuadratureFactor exact{FactorSpec(1.0, 1.0), [](std::size_t) {
                                 Rule r;
                                 const double s = std::sqrt(0.6);
                                 r.nodes = {{0.5 - 0.5 * s}, {0.5}, {0.5 + 0.5 * s}};
                                 r.weights = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
                                 return r;
                               }};
  const SamplerFactor sampler{FactorSpec(1.0, 1.0), [](std::span<const double> y, std::size_t) { return y[0] * y[0]; }};
  for (int L = 2; L <= 7; ++L) CHECK(multilevel_expectation(exact, sampler, L).value == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("multilevel expectation error has a closed form") {
  // Midpoint is exact on constants, so the 1/N part telescopes to 1/N_s(L-1) and the
  // y^2 part survives only at quadrature level L-1 with midpoint error -1/(12 N_q^2).
  const FactorSpec fq(1.0, 2.0), fs(2.0, 1.0);
  const QuadratureFactor quad{fq, midpoint_builder(0.0, 1.0)};
  const auto sampler = synthetic_sampler(fs);
  for (int L = 2; L <= 14; ++L) {
    const double Ns = static_cast<double>(level_to_resolution(fs, L - 1));
    const double Nq = static_cast<double>(level_to_resolution(fq, L - 1));
    const double expected = 1.0 / Ns - 1.0 / (12.0 * Nq * Nq);
    CHECK(multilevel_expectation(quad, sampler, L).value - 1.0 / 3.0 == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("misc expectation") {
  const FactorSpec qspec(1.0, 2.0), pspec(1.0, 1.0);
  const auto kb = kernel_rule_builder(kernel::MaternKernel(2.0, 1), kernel::unit_box(1));

  SUBCASE("constant integrand, defect measured from the rules themselves") {
    const double c = 2.5;
    const SamplerFactor constant{pspec, [c](std::span<const double>, std::size_t) { return c; }};
    const std::vector<QuadratureFactor> blocks = {{qspec, kb}, {qspec, kb}};
    for (int L = 3; L <= 6; ++L) {
      // The engine applied to c reduces to c times the combination of prod_j (w_j^T 1).
      ProblemSpec<double> defect;
      defect.factors = {qspec, qspec, pspec};
      defect.tensor_evaluator = [&kb](std::span<const std::size_t> N) {
        double v = 1.0;
        for (std::size_t j = 0; j < 2; ++j) {
          double s = 0.0;
          for (double w : kb(N[j]).weights) s += w;
          v *= s;
        }
        return v;
      };
      const double mass = smolyak_estimate(defect, L).value;
      CHECK(misc_expectation(blocks, constant, L).value == doctest::Approx(c * mass).epsilon(1e-12));
    }
  }

  SUBCASE("single block equals multilevel") {
    const auto sampler = synthetic_sampler(pspec);
    for (int L = 2; L <= 6; ++L) {
      const double a = misc_expectation({{qspec, kb}}, sampler, L).value;
      const double b = multilevel_expectation({qspec, kb}, sampler, L).value;
      CHECK(same_bits(a, b));
    }
  }

  SUBCASE("two 1-d blocks, sin sin integrand against the exact value 0") {
    // Kernel-rule errors on sin(2 pi y) oscillate with N, so only the overall decay is checked.
    const SamplerFactor s{pspec, [](std::span<const double> y, std::size_t N) {
                            return std::sin(2.0 * std::numbers::pi * y[0]) * std::sin(2.0 * std::numbers::pi * y[1]) +
                                   1.0 / static_cast<double>(N);
                          }};
    const std::vector<QuadratureFactor> blocks = {{qspec, kb}, {qspec, kb}};
    const double coarse = std::abs(misc_expectation(blocks, s, 3).value);
    const double fine = std::abs(misc_expectation(blocks, s, 12).value);
    CHECK(fine < 1e-2);
    CHECK(fine < coarse / 100.0);
  }
}

TEST_CASE("Monte Carlo means") {
  CHECK(monte_carlo_mean([](const CounterRng&) { return 4.25; }, 17, 3) == 4.25);
  CHECK_THROWS(monte_carlo_mean([](const CounterRng&) { return 0.0; }, 0, 0));

  auto normal = [](const CounterRng& r) { return r.normal(0); };
  double mean_of_means = 0.0;
  for (std::uint64_t s = 0; s < 30; ++s) mean_of_means += monte_carlo_mean(normal, 10000, s) / 30.0;
  CHECK(std::abs(mean_of_means) < 4.0 / 100.0);

  auto var_of_means = [&](std::size_t N) {
    double m = 0.0, m2 = 0.0;
    for (std::uint64_t s = 0; s < 200; ++s) {
      const double x = monte_carlo_mean(normal, N, 1000 + s);
      m += x / 200.0;
      m2 += x * x / 200.0;
    }
    return m2 - m * m;
  };
  const double ratio = var_of_means(4096) / var_of_means(1024);
  CHECK(ratio >= 0.15);
  CHECK(ratio <= 0.35);

  // Same seed, same draws.
  CHECK(same_bits(monte_carlo_mean(normal, 100, 9), monte_carlo_mean(normal, 100, 9)));
}

TEST_CASE("response surface") {
  const kernel::Box box{{0.0, 0.0}, {1.0, 1.0}};
  const kernel::SparseFactor block{kernel::MaternKernel(2.0, 2), box, 0.0, 1.0};
  const auto spec = kernel::sparse_factor_spec(block);
  const auto X1 = kernel::generate_points(box, level_to_resolution(spec, 1));
  auto f = [&](std::span<const double> y) { return 1.5 * block.kernel(y, X1.point(0)); };

  SUBCASE("exact sampler and f in the span of level-1 translates") {
    const SamplerFactor exact{FactorSpec(1.5, 1.0), [&](std::span<const double> y, std::size_t) { return f(y); }};
    const auto est = response_surface({block}, exact, 5);
    testing::Gen gen(21);
    for (int rep = 0; rep < 100; ++rep) {
      const auto y = gen.uniforms(2);
      CHECK(est.value(y) == doctest::Approx(f(y)).epsilon(1e-7).scale(1.0));
    }
  }

  SUBCASE("serialization round trip") {
    const SamplerFactor s{FactorSpec(1.5, 1.0), [](std::span<const double> y, std::size_t N) {
                            return std::cos(y[0] + y[1]) + 1.0 / static_cast<double>(N);
                          }};
    const auto est = response_surface({block}, s, 5);
    const auto back = kernel::Surrogate::parse(est.value.serialize());
    testing::Gen gen(22);
    for (int rep = 0; rep < 100; ++rep) {
      const auto y = gen.uniforms(2);
      CHECK(std::abs(back(y) - est.value(y)) <= 1e-15 * std::max(1.0, std::abs(est.value(y))));
    }
  }

  SUBCASE("linearity in the sampled values") {
    auto make = [](double c) {
      return SamplerFactor{FactorSpec(1.5, 1.0), [c](std::span<const double> y, std::size_t N) {
                             return c * (y[0] * y[1] + 1.0 / static_cast<double>(N));
                           }};
    };
    const auto one = response_surface({block}, make(1.0), 5);
    const auto two = response_surface({block}, make(2.0), 5);
    testing::Gen gen(23);
    for (int rep = 0; rep < 50; ++rep) {
      const auto y = gen.uniforms(2);
      CHECK(two.value(y) == doctest::Approx(2.0 * one.value(y)).epsilon(1e-12));
    }
  }

  SUBCASE("distinct solves") {
    const std::vector<FactorSpec> factors = {spec, FactorSpec(1.5, 1.0)};
    // (N_pde, point index) pairs over the combination terms, counted by brute force.
    for (int L = 2; L <= 6; ++L) {
      std::set<std::pair<std::size_t, std::size_t>> seen;
      for (const auto& t : combination_coefficients(2, L)) {
        const auto n = level_to_resolution(factors[0], t.index[0]);
        const auto m = level_to_resolution(factors[1], t.index[1]);
        for (std::size_t i = 0; i < n; ++i) seen.insert({m, i});
      }
      CHECK(distinct_solves(factors, L) == seen.size());
    }
  }

  CHECK(base_resolution_for(FactorSpec(1.5, 1.0), 8, 6) == doctest::Approx(65.0 * 65.0 / std::exp(8.0 / 2.5)));
}

TEST_CASE("bump response surface at small scale") {
  const auto setup = bump_rsr_setup(1, 4, 6);
  const auto rows = rsr_study(setup.blocks, setup.sampler, 2, 4, 6, 256, 1);
  REQUIRE(rows.size() == 3);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].error_l2 < rows[i - 1].error_l2);
    CHECK(rows[i].pde_solves > rows[i - 1].pde_solves);
  }
  CHECK(rsr_csv(rows).rfind("L,work_units,pde_solves,error_l2,error_linf\n", 0) == 0);
}

TEST_CASE("evaluation points") {
  const auto pts = evaluation_points({kernel::Disc{0.0, 0.0, 1.0}, kernel::unit_box(1)}, 500, 4);
  REQUIRE(pts.size() == 500);
  for (const auto& p : pts) {
    REQUIRE(p.size() == 3);
    CHECK(p[0] * p[0] + p[1] * p[1] <= 1.0);
    CHECK(p[2] >= 0.0);
    CHECK(p[2] <= 1.0);
  }
  CHECK(evaluation_points({kernel::unit_box(2)}, 10, 4) == evaluation_points({kernel::unit_box(2)}, 10, 4));
}

TEST_CASE("OUU objective and minimizer") {
  const kernel::Disc disc{0.0, 0.0, 1.0};
  SUBCASE("quadratic stub") {
    auto f = [](std::span<const double> z) { return (z[0] - 0.3) * (z[0] - 0.3) + (z[1] - 0.2) * (z[1] - 0.2); };
    const auto m = minimize_objective(f, disc, 4, 0);
    CHECK(std::abs(m.z[0] - 0.3) < 1e-3);
    CHECK(std::abs(m.z[1] - 0.2) < 1e-3);
  }
  SUBCASE("pure penalty") {
    OuuObjective obj{kernel::Surrogate{}, 0.1};
    const auto m = minimize_objective(obj, disc, 4, 7);
    CHECK(std::hypot(m.z[0], m.z[1]) < 1e-3);
    const std::vector<double> z{0.6, 0.8};
    CHECK(obj.penalty(z) == doctest::Approx(0.1));
  }
  SUBCASE("constrained minimum on the boundary") {
    auto f = [](std::span<const double> z) { return z[0] + z[1]; };
    const auto m = minimize_objective(f, disc, 2, 1);
    CHECK(m.value == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-3));
  }
}

TEST_CASE("OUU with stub samplers") {
  auto setup = ouu_setup(3, 6, 3);
  auto g = [](std::span<const double> z) { return std::exp(0.3 * z[0] - 0.2 * z[1]); };

  SUBCASE("deterministic field and exact solver reduce to kernel interpolation") {
    DrawLog log;
    const auto problem = ouu_problem(setup, [&](std::span<const double> z, std::uint64_t, std::size_t) { return g(z); },
                                     &log);
    const auto est = smolyak_estimate(problem, 6);
    // The combination collapses to the interpolant on the top-level point set.
    const auto N = level_to_resolution(setup.interp, 4);
    const auto Z = kernel::generate_points(setup.disc, N);
    std::vector<double> v(N);
    for (std::size_t i = 0; i < N; ++i) v[i] = g(Z.point(i));
    const auto s = kernel::Interpolant::fit(kernel::TensorKernel::single(setup.kernel), Z, v);
    const OuuObjective obj{est.value, setup.penalty_weight};
    const std::vector<double> zero{0.0, 0.0};
    CHECK(obj(zero) == doctest::Approx(est.value(zero)));
    testing::Gen gen(31);
    for (int rep = 0; rep < 50; ++rep) {
      const double r = std::sqrt(gen.uniform()), t = gen.uniform(0.0, 2.0 * std::numbers::pi);
      const std::vector<double> z{r * std::cos(t), r * std::sin(t)};
      CHECK(est.value(z) == doctest::Approx(s(z)).epsilon(1e-9));
    }
  }

  SUBCASE("draws are shared across mesh corners") {
    DrawLog log;
    const auto problem =
        ouu_problem(setup, [&](std::span<const double> z, std::uint64_t k, std::size_t M) {
          return g(z) + 0.01 * static_cast<double>(k) + 1.0 / static_cast<double>(M);
        }, &log);
    smolyak_via_deltas(problem, 6);
    const auto entries = log.entries();
    CHECK(!entries.empty());
    for (const auto& [key, draws] : entries) {
      // Every mesh corner with the same (N_z, N_mc) used identical draw IDs 0..N_mc-1.
      CHECK(draws.size() == key[1]);
      for (const auto& [other, d2] : entries) {
        if (other[0] == key[0] && other[1] == key[1]) CHECK(d2 == draws);
      }
    }
  }

  SUBCASE("Monte Carlo factor is unbiased") {
    // E[Q] = g(z); the estimator mean over 100 seeds stays within 4 standard errors.
    const std::vector<double> z0{0.2, -0.4};
    std::vector<double> values;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      const auto problem = ouu_problem(setup, [&, seed](std::span<const double> z, std::uint64_t k, std::size_t) {
        return g(z) + CounterRng(seed, k).normal(0);
      });
      values.push_back(smolyak_estimate(problem, 4).value(z0));
    }
    const auto problem = ouu_problem(setup, [&](std::span<const double> z, std::uint64_t, std::size_t) { return g(z); });
    const double truth = smolyak_estimate(problem, 4).value(z0);
    double m = 0.0, v = 0.0;
    for (double x : values) m += x / 100.0;
    for (double x : values) v += (x - m) * (x - m) / 99.0;
    CHECK(std::abs(m - truth) <= 4.0 * std::sqrt(v / 100.0));
  }
}

TEST_CASE("OUU pipeline is deterministic across worker counts") {
  const auto setup = ouu_setup(3, 6, 3);
  const auto a = ouu_study(setup, 3, 4, 6, 2, 64, 5, {1});
  const auto b = ouu_study(setup, 3, 4, 6, 2, 64, 5, {3});
  CHECK(ouu_csv(a) == ouu_csv(b));
  const auto r1 = ouu_surrogate(setup, 4, 9, {1});
  const auto r2 = ouu_surrogate(setup, 4, 9, {2});
  const std::vector<double> z{0.1, 0.2};
  CHECK(same_bits(r1.objective(z), r2.objective(z)));
  CHECK(r1.ledger.total_work == r2.ledger.total_work);
  CHECK(ouu_csv(a).rfind("L,work_units,pde_solves,mse_linf,replications\n", 0) == 0);
}
