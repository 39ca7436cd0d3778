// Acceptance run: one PASS/FAIL line per criterion with the measured values.
// Exit status is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "kernelkit/kernel/interpolant.hpp"
#include "kernelkit/kernel/sparse.hpp"
#include "kernelkit/multiindex.hpp"
#include "kernelkit/pde/fem.hpp"
#include "kernelkit/pde/grf.hpp"
#include "kernelkit/pde/problems.hpp"
#include "kernelkit/smolyak.hpp"
#include "kernelkit/uq/expectation.hpp"
#include "kernelkit/uq/ouu.hpp"
#include "kernelkit/uq/response_surface.hpp"
#include "support.hpp"

using namespace kernelkit;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  std::printf("criterion %2d %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  failures += ok ? 0 : 1;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

// Plain least squares through (log x, log y).
double slope(const std::vector<std::pair<double, double>>& xy) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(xy.size());
  for (auto [x, y] : xy) {
    const double lx = std::log(x), ly = std::log(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Random product problem with per-factor geometric convergence; exact value known.
struct RandomProduct {
  std::vector<double> limits, rates, amps;
  double operator()(std::span<const std::size_t> N) const {
    double v = 1.0;
    for (std::size_t j = 0; j < N.size(); ++j)
      v *= N[j] == 0 ? 0.0 : limits[j] + amps[j] * std::pow(static_cast<double>(N[j]), -rates[j]);
    return v;
  }
};

void criterion_1() {
  testing::Gen gen(101);
  double worst = 0.0;
  int problems = 0;
  for (std::size_t n = 1; n <= 4; ++n) {
    for (int rep = 0; rep < 50; ++rep) {
      RandomProduct f;
      ProblemSpec<double> p;
      for (std::size_t j = 0; j < n; ++j) {
        f.limits.push_back(gen.uniform(0.5, 2.0));
        f.rates.push_back(gen.uniform(0.5, 3.0));
        f.amps.push_back(gen.uniform(-1.0, 1.0));
        p.factors.emplace_back(gen.uniform(0.5, 2.0), f.rates.back(), "f" + std::to_string(j));
      }
      p.tensor_evaluator = f;
      const int L = gen.integer(static_cast<int>(n), 10);
      const double a = smolyak_estimate(p, L).value;
      const double b = smolyak_via_deltas(p, L).value;
      worst = std::max(worst, std::abs(a - b) / std::max(std::abs(b), 1e-300));
      ++problems;
    }
  }
  report(1, worst <= 1e-10, fmt("combination == delta sum on %.0f problems, max rel diff %.3e", problems, worst));
}

void criterion_2() {
  bool ok = true;
  double worst = 0.0;
  for (int n = 1; n <= 5; ++n) {
    for (int L = n; L <= 12; ++L) {
      double sum = 0.0;
      for (const auto& t : combination_coefficients(n, L)) sum += static_cast<double>(t.coefficient);
      worst = std::max(worst, std::abs(sum - 1.0));
      // Pascal-rule binomial, independent of the library.
      std::vector<std::vector<double>> C(L + 1, std::vector<double>(L + 1, 0.0));
      for (int a = 0; a <= L; ++a) {
        C[a][0] = 1.0;
        for (int b = 1; b <= a; ++b) C[a][b] = C[a - 1][b - 1] + (b <= a - 1 ? C[a - 1][b] : 0.0);
      }
      ok = ok && static_cast<double>(enumerate_simplex(n, L).size()) == C[L][n];
    }
  }
  report(2, ok && worst == 0.0, fmt("sum of coefficients - 1 max %.1e; simplex sizes match binom(L, n): ", worst) +
                                    (ok ? "yes" : "no"));
}

double l2_error_1d(const kernel::Interpolant& s, const std::function<double(double)>& f) {
  const int M = 20000;
  double e = 0.0;
  for (int i = 0; i < M; ++i) {
    const std::vector<double> x{(i + 0.5) / M};
    const double d = s(x) - f(x[0]);
    e += d * d / M;
  }
  return std::sqrt(e);
}

void criterion_3() {
  const kernel::MaternKernel k(2.0, 1);
  // sum_j 4^-j cos(2^j pi x) sits just below H^2: no smoother than the native space, so the
  // worst-case rate is attained. Smooth functions superconverge near h^2.5.
  auto f = [](double x) {
    double s = 0.0;
    for (int j = 0; j <= 10; ++j) s += std::pow(4.0, -j) * std::cos(std::ldexp(std::numbers::pi, j) * x);
    return s;
  };
  std::vector<std::pair<double, double>> rows;
  std::string detail;
  for (std::size_t N : {9, 17, 33, 65, 129}) {
    const auto X = kernel::generate_points(kernel::unit_box(1), N);
    std::vector<double> v(N);
    for (std::size_t i = 0; i < N; ++i) v[i] = f(X.coord(i, 0));
    const auto s = kernel::Interpolant::fit(kernel::TensorKernel::single(k), X, v);
    rows.emplace_back(static_cast<double>(N), l2_error_1d(s, f));
    detail += fmt("N=%.0f e=%.2e ", static_cast<double>(N), rows.back().second);
  }
  const double m = slope(rows);
  report(3, m >= -2.4 && m <= -1.6, fmt("L2 slope vs N %.3f in [-2.4, -1.6]; ", m) + detail);
}

void criterion_4() {
  // Same 4 e^(t l) starting sets as the response-surface and OUU interpolation factors.
  const kernel::SparseFactor block{kernel::MaternKernel(2.0, 1), kernel::unit_box(1), 0.0, 4.0};
  auto f = [](std::span<const double> y) { return std::exp(y[0]) * std::sin(2.0 * y[1] + 0.3); };
  const int M = 200;
  std::vector<std::pair<double, double>> rows;
  bool monotone = true;
  std::string detail;
  for (int L = 4; L <= 8; ++L) {
    const auto est = kernel::sparse_interpolate({block, block}, f, L);
    double e = 0.0;
    for (int i = 0; i < M; ++i)
      for (int j = 0; j < M; ++j) {
        const std::vector<double> y{(i + 0.5) / M, (j + 0.5) / M};
        const double d = est.value(y) - f(y);
        e += d * d / (M * M);
      }
    e = std::sqrt(e);
    const double points = static_cast<double>(kernel::sparse_grid_nodes({block, block}, L).size());
    if (!rows.empty() && e >= rows.back().second) monotone = false;
    rows.emplace_back(points, e);
    detail += fmt("L=%.0f pts=%.0f e=%.2e ", L, points, e);
  }
  const double m = slope(rows);
  report(4, monotone && m <= -1.3,
         std::string("monotone ") + (monotone ? "yes" : "no") + fmt(", L2 slope vs points %.3f <= -1.3; ", m) + detail);
}

void criterion_5() {
  const auto problem = pde::ManufacturedProblem::elliptic();
  std::vector<std::pair<double, double>> rows;
  for (int level = 3; level <= 6; ++level) {
    const auto mesh = pde::MeshLevel::dyadic(level);
    rows.emplace_back(mesh.h(), pde::l2_error(pde::solve(problem, mesh), pde::ManufacturedProblem::exact));
  }
  const double m = slope(rows);
  report(5, m >= 1.8 && m <= 2.2, fmt("FEM L2 slope vs h %.3f in [1.8, 2.2]", m));
}

// Midpoint quadrature of q_N(y) = y^2 + 1/N over [0, 1]; the limit is 1/3.
ProblemSpec<double> multilevel_problem() {
  const uq::QuadratureFactor quad{FactorSpec(1.0, 2.0, "quad"), uq::midpoint_builder(0.0, 1.0)};
  const uq::SamplerFactor sampler{FactorSpec(2.0, 1.0, "sampler"), [](std::span<const double> y, std::size_t N) {
                                    return y[0] * y[0] + 1.0 / static_cast<double>(N);
                                  }};
  return uq::expectation_problem({quad}, sampler);
}

std::string multilevel_csv(unsigned workers, double* fitted) {
  const auto problem = multilevel_problem();
  const auto rows = convergence_study<double>(problem, 6, 16, 1.0 / 3.0,
                                              [](const double& d) { return std::abs(d); }, {workers});
  std::vector<std::pair<double, double>> xy;
  for (const auto& r : rows) xy.emplace_back(r.work, r.error);
  if (fitted) *fitted = slope(xy);
  return study_csv(rows);
}

void criterion_6() {
  double m = 0.0;
  multilevel_csv(1, &m);
  const auto factors = multilevel_problem().factors;
  const double predicted = predicted_rates(factors).slope();
  const double rel = std::abs(m - predicted) / std::abs(predicted);
  report(6, rel <= 0.3, fmt("multilevel error-vs-work slope %.3f, predicted %.3f, relative gap %.2f <= 0.30", m,
                            predicted, rel));
}

std::string rsr_csv(unsigned workers, double* fitted) {
  const auto setup = uq::bump_rsr_setup(1, 6, 9);
  const auto rows = uq::rsr_study(setup.blocks, setup.sampler, 2, 7, 9, 2048, 0, {workers});
  std::vector<std::pair<double, double>> xy;
  for (const auto& r : rows) xy.emplace_back(r.work, r.error_l2);
  if (fitted) *fitted = slope(xy);
  return uq::rsr_csv(rows);
}

void criterion_7() {
  double m = 0.0;
  rsr_csv(1, &m);
  report(7, m >= -0.95 && m <= -0.45, fmt("response surface L2 error-vs-work slope %.3f in [-0.95, -0.45]", m));
}

std::string ouu_csv(unsigned workers, double* fitted) {
  const auto setup = uq::ouu_setup(5, 9, 5);
  const auto rows = uq::ouu_study(setup, 3, 7, 9, 5, 2048, 0, {workers});
  std::vector<std::pair<double, double>> xy;
  for (const auto& r : rows) xy.emplace_back(r.work, std::sqrt(r.mse_linf));
  if (fitted) *fitted = slope(xy);
  return uq::ouu_csv(rows);
}

void criterion_8() {
  double m = 0.0;
  ouu_csv(1, &m);
  const auto setup = uq::ouu_setup(5, 9, 5);
  const auto result = uq::ouu_surrogate(setup, 9, 0);
  const auto best = uq::minimize_objective(result.objective, setup.disc, 8, 0);
  std::printf("  info: z* = (%.4f, %.4f), E[Q(z*)] = %.4f, objective %.4f\n", best.z[0], best.z[1],
              result.objective.expected_qoi(best.z), best.value);
  report(8, m >= -0.8 && m <= -0.25, fmt("OUU root-MSE (sup over z) vs work slope %.3f in [-0.8, -0.25]", m));
}

void criterion_9() {
  const bool a = multilevel_csv(1, nullptr) == multilevel_csv(4, nullptr);
  const bool b = rsr_csv(1, nullptr) == rsr_csv(4, nullptr);
  const bool c = ouu_csv(1, nullptr) == ouu_csv(4, nullptr);
  report(9, a && b && c, std::string("1 vs 4 workers byte-identical: multilevel ") + (a ? "yes" : "no") +
                             ", response surface " + (b ? "yes" : "no") + ", OUU " + (c ? "yes" : "no"));
}

void criterion_10() {
  pde::MeshLevel grid;
  grid.cells_per_axis = 30;
  const pde::GrfSampler g(grid);
  const int samples = 2000, shift = 3;  // 3 cells = distance 0.1
  const int n = grid.nodes_per_axis();
  double var = 0.0, cov = 0.0;
  std::size_t pairs = 0;
  for (int s = 0; s < samples; ++s) {
    const auto f = g.sample(12345, static_cast<std::uint64_t>(s));
    for (double v : f.values) var += v * v;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i + shift < n; ++i) {
        cov += f.values[grid.node_index(i, j)] * f.values[grid.node_index(i + shift, j)];
        cov += f.values[grid.node_index(j, i)] * f.values[grid.node_index(j, i + shift)];
        pairs += 2;
      }
  }
  var /= static_cast<double>(samples) * static_cast<double>(grid.node_count());
  cov /= static_cast<double>(pairs);
  const bool ok = var >= 0.85 && var <= 1.15 && std::abs(cov - std::exp(-1.0)) <= 0.08;
  report(10, ok, fmt("pointwise variance %.4f in [0.85, 1.15]; covariance at 0.1 %.4f vs %.4f +- 0.08", var, cov,
                     std::exp(-1.0)));
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> criteria = {criterion_1, criterion_2, criterion_3, criterion_4,
                                                      criterion_5, criterion_6, criterion_7, criterion_8,
                                                      criterion_9, criterion_10};
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c();
    } catch (const std::exception& e) {
      report(static_cast<int>(&c - criteria.data()) + 1, false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("  (%.1f s)\n", secs);
  }
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
