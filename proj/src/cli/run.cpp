#include "kernelkit/cli/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <utility>

#include "kernelkit/kernel/sparse.hpp"
#include "kernelkit/pde/fem.hpp"
#include "kernelkit/pde/problems.hpp"
#include "kernelkit/uq/expectation.hpp"
#include "kernelkit/uq/ouu.hpp"
#include "kernelkit/uq/response_surface.hpp"

#ifndef KERNELKIT_VERSION
#define KERNELKIT_VERSION "0.1.0-unknown"
#endif

namespace kernelkit::cli {

namespace fs = std::filesystem;

namespace {

struct Artifacts {
  std::string csv;
  std::vector<std::pair<double, double>> fit;  // (x, error) pairs for the slope
  double predicted_slope = 0.0;
  std::optional<RatePrediction> rates;
  std::string surrogate;
  std::string optimum;
};

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  out.close();
  if (!out) throw ConfigError(0, "run.output", "cannot write " + path.string());
}

std::string hex64(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

std::vector<FactorSpec> factor_specs(const RunConfig& c) {
  std::vector<FactorSpec> out;
  for (std::size_t j = 0; j < c.factors.size(); ++j) {
    out.emplace_back(c.factors[j].gamma, c.factors[j].beta, "f" + std::to_string(j + 1),
                     c.factors[j].base_resolution);
  }
  return out;
}

// Product of n inputs with w_N = 1 - N^(-beta) approximating 1; the exact value is 1.
// Every delta is nonnegative, so the error is the sum of the omitted terms.
Artifacts run_rates(const RunConfig& c, EngineOptions opts) {
  ProblemSpec<double> problem;
  problem.factors = factor_specs(c);
  problem.tensor_evaluator = [betas = c.factors](std::span<const std::size_t> N) {
    double v = 1.0;
    for (std::size_t j = 0; j < N.size(); ++j) {
      v *= N[j] == 0 ? 0.0 : 1.0 - std::pow(static_cast<double>(N[j]), -betas[j].beta);
    }
    return v;
  };
  const auto rows = convergence_study<double>(problem, c.L_min, c.L_max, 1.0,
                                              [](const double& d) { return std::abs(d); }, opts);
  Artifacts a;
  a.csv = study_csv(rows);
  for (const auto& r : rows) a.fit.emplace_back(r.work, r.error);
  a.rates = predicted_rates(problem.factors);
  a.predicted_slope = a.rates->slope();
  return a;
}

double interp_test_function(std::span<const double> x) {
  double v = 1.0;
  for (double xi : x) v *= 1.0 / (1.0 + (xi - 0.4) * (xi - 0.4));
  return v;
}

std::string error_csv_header() { return "L,work_units,pde_solves,error_l2,error_linf\n"; }

std::string error_csv_row(int L, double work, std::size_t solves, double l2, double linf) {
  return std::to_string(L) + "," + num(work) + "," + std::to_string(solves) + "," + num(l2) + "," + num(linf) + "\n";
}

Artifacts run_interp(const RunConfig& c, EngineOptions opts) {
  std::vector<kernel::SparseFactor> factors;
  std::vector<kernel::Domain> domains;
  for (int j = 0; j < c.blocks; ++j) {
    const auto box = kernel::unit_box(static_cast<std::size_t>(c.kernel_dim));
    factors.push_back({kernel::MaternKernel(c.kernel_beta, c.kernel_dim, c.length_scale), box, 0.0, 1.0});
    domains.push_back(box);
  }
  const auto problem = kernel::sparse_problem(factors, interp_test_function);
  const auto points = uq::evaluation_points(domains, c.eval_points, c.seed);
  std::vector<double> exact;
  for (const auto& p : points) exact.push_back(interp_test_function(p));

  Artifacts a;
  a.csv = error_csv_header();
  EvaluationCache<kernel::Surrogate> cache;
  for (int L = c.L_min; L <= c.L_max; ++L) {
    auto est = smolyak_estimate(problem, L, opts, &cache);
    double sum_sq = 0.0, worst = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const double d = exact[i] - est.value(points[i]);
      sum_sq += d * d;
      worst = std::max(worst, std::abs(d));
    }
    const double l2 = std::sqrt(sum_sq / static_cast<double>(points.size()));
    a.csv += error_csv_row(L, est.ledger.total_work, kernel::sparse_grid_nodes(factors, L).size(), l2, worst);
    a.fit.emplace_back(est.ledger.total_work, l2);
    if (L == c.L_max) {
      est.value.set_domains(domains);
      a.surrogate = est.value.serialize();
    }
  }
  a.rates = predicted_rates(problem.factors);
  a.predicted_slope = a.rates->slope();
  return a;
}

// q_N(y) = prod_j y_j^2 + N^(-kappa) on [0,1]^blocks; E = 3^(-blocks) in the limit.
Artifacts run_misc(const RunConfig& c, EngineOptions opts) {
  const auto specs = factor_specs(c);
  std::vector<uq::QuadratureFactor> blocks;
  for (int j = 0; j < c.blocks; ++j) {
    uq::RuleBuilder build = c.rule == "kernel"
                                ? uq::kernel_rule_builder(kernel::MaternKernel(c.kernel_beta, 1, c.length_scale),
                                                          kernel::unit_box(1))
                                : uq::midpoint_builder(0.0, 1.0);
    blocks.push_back({specs[static_cast<std::size_t>(j)], std::move(build)});
  }
  const double kappa = specs.back().beta;
  uq::SamplerFactor sampler{specs.back(), [kappa](std::span<const double> y, std::size_t N) {
                              double v = 1.0;
                              for (double yi : y) v *= yi * yi;
                              return v + std::pow(static_cast<double>(N), -kappa);
                            }};

  // Distinct (N, y) samples, counted from the same rules the estimator uses.
  auto count_samples = [&blocks, &specs](int L) {
    std::set<std::vector<double>> seen;
    std::map<std::pair<std::size_t, std::size_t>, uq::Rule> rules;
    const std::size_t n = specs.size();
    for (const auto& t : combination_coefficients(static_cast<int>(n), L)) {
      const auto N = detail::resolutions_for(specs, t.index.levels());
      std::vector<const uq::Rule*> rs;
      std::size_t total = 1;
      for (std::size_t j = 0; j + 1 < n; ++j) {
        const auto key = std::make_pair(j, N[j]);
        auto it = rules.find(key);
        if (it == rules.end()) it = rules.emplace(key, blocks[j].build(N[j])).first;
        rs.push_back(&it->second);
        total *= it->second.weights.size();
      }
      for (std::size_t i = 0; i < total; ++i) {
        std::vector<double> key(1, static_cast<double>(N[n - 1]));
        std::size_t rest = i;
        for (const auto* r : rs) {
          const auto& y = r->nodes[rest % r->weights.size()];
          key.insert(key.end(), y.begin(), y.end());
          rest /= r->weights.size();
        }
        seen.insert(std::move(key));
      }
    }
    return seen.size();
  };

  const auto problem = uq::expectation_problem(blocks, sampler);
  const double exact = std::pow(3.0, -c.blocks);
  Artifacts a;
  a.csv = error_csv_header();
  EvaluationCache<double> cache;
  for (int L = c.L_min; L <= c.L_max; ++L) {
    const auto est = smolyak_estimate(problem, L, opts, &cache);
    const double err = std::abs(est.value - exact);
    a.csv += error_csv_row(L, est.ledger.total_work, count_samples(L), err, err);
    a.fit.emplace_back(est.ledger.total_work, err);
  }
  a.rates = predicted_rates(problem.factors);
  a.predicted_slope = a.rates->slope();
  return a;
}

Artifacts run_rsr(const RunConfig& c, EngineOptions opts) {
  const int L_ref = c.reference_level();
  const auto setup = uq::bump_rsr_setup(c.bumps, c.mesh_max, L_ref);
  const auto rows = uq::rsr_study(setup.blocks, setup.sampler, c.L_min, c.L_max, L_ref, c.eval_points, c.seed, opts);
  Artifacts a;
  a.csv = uq::rsr_csv(rows);
  for (const auto& r : rows) a.fit.emplace_back(r.work, r.error_l2);
  auto est = uq::response_surface(setup.blocks, setup.sampler, c.L_max, opts);
  a.surrogate = est.value.serialize();
  const auto problem = uq::response_surface_problem(setup.blocks, setup.sampler);
  a.rates = predicted_rates(problem.factors);
  a.predicted_slope = a.rates->slope();
  return a;
}

Artifacts run_ouu(const RunConfig& c, EngineOptions opts) {
  const int L_ref = c.reference_level();
  const auto setup = uq::ouu_setup(c.mesh_max, L_ref, c.field_level);
  const auto rows = uq::ouu_study(setup, c.L_min, c.L_max, L_ref, c.replications, c.eval_points, c.seed, opts);
  Artifacts a;
  a.csv = uq::ouu_csv(rows);
  for (const auto& r : rows) a.fit.emplace_back(r.work, std::sqrt(r.mse_linf));

  const auto result = uq::ouu_surrogate(setup, L_ref, c.seed, opts);
  a.surrogate = result.objective.surrogate.serialize();
  const auto best = uq::minimize_objective(result.objective, setup.disc, c.restarts, c.seed);
  a.optimum = "z " + num(best.z[0]) + " " + num(best.z[1]) + "\n";
  a.optimum += "objective " + num(best.value) + "\n";
  a.optimum += "expected_qoi " + num(result.objective.expected_qoi(best.z)) + "\n";
  a.optimum += "penalty " + num(result.objective.penalty(best.z)) + "\n";
  a.optimum += "# reference values for comparison only: z -0.451 -0.062, expected_qoi 5.038, objective 5.059\n";

  const std::vector<FactorSpec> factors = {setup.interp, setup.mc, setup.fem};
  a.rates = predicted_rates(factors);
  a.predicted_slope = a.rates->slope();
  return a;
}

Artifacts run_fem_check(const RunConfig& c) {
  const auto problem = pde::ManufacturedProblem::elliptic();
  Artifacts a;
  a.csv = "level,h,nodes,error_l2\n";
  for (int level = c.mesh_min; level <= c.mesh_max; ++level) {
    const auto mesh = pde::MeshLevel::dyadic(level);
    const double err = pde::l2_error(pde::solve(problem, mesh), pde::ManufacturedProblem::exact);
    a.csv += std::to_string(level) + "," + num(mesh.h()) + "," + std::to_string(mesh.node_count()) + "," +
             num(err) + "\n";
    a.fit.emplace_back(mesh.h(), err);
  }
  a.predicted_slope = 2.0;
  return a;
}

std::string slope_text(const Artifacts& a) {
  std::string out = "fitted_slope " + num(fit_loglog_slope(a.fit)) + "\n";
  out += "predicted_slope " + num(a.predicted_slope) + "\n";
  if (a.rates) {
    out += "rho " + num(a.rates->rho) + "\n";
    out += "n0 " + std::to_string(a.rates->n0) + "\n";
  }
  return out;
}

std::string manifest_text(const RunConfig& c) {
  std::string out = "kernelkit run manifest\n";
  out += "version " + version_string() + "\n";
  out += "config_hash " + hex64(config_hash(c)) + "\n";
  out += "seed " + std::to_string(c.seed) + "\n";
  out += "pipeline " + std::string(pipeline_name(c.pipeline)) + "\n";
  if (c.pipeline == Pipeline::rsr || c.pipeline == Pipeline::ouu || c.pipeline == Pipeline::interp) {
    out += "note errors estimated at " + std::to_string(c.eval_points) + " random points against ";
    out += c.pipeline == Pipeline::interp ? std::string("the exact function")
                                          : "the level " + std::to_string(c.reference_level()) + " estimate";
    if (c.pipeline == Pipeline::ouu) out += ", " + std::to_string(c.replications) + " replications";
    out += "; sample sizes scaled down from 10000 points";
    if (c.pipeline == Pipeline::ouu) out += " and 20 replications";
    out += ", slope bands widened to match\n";
  }
  out += "config\n" + serialize(c);
  return out;
}

}  // namespace

std::string version_string() { return KERNELKIT_VERSION; }

int run(const RunConfig& config, const RunOptions& options, std::ostream& log) {
  if (config.output.empty()) {
    log << "config error (run.output): no output directory; set [run] output or pass --out\n";
    return 2;
  }
  const fs::path dir(config.output);
  try {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError(0, "run.output", "cannot create " + dir.string() + ": " + ec.message());
    write_file(dir / "manifest.txt", manifest_text(config));

    const EngineOptions opts{std::max(1u, options.workers)};
    Artifacts a;
    switch (config.pipeline) {
      case Pipeline::rates: a = run_rates(config, opts); break;
      case Pipeline::interp: a = run_interp(config, opts); break;
      case Pipeline::misc: a = run_misc(config, opts); break;
      case Pipeline::rsr: a = run_rsr(config, opts); break;
      case Pipeline::ouu: a = run_ouu(config, opts); break;
      case Pipeline::fem_check: a = run_fem_check(config); break;
    }
    write_file(dir / "study.csv", a.csv);
    write_file(dir / "slope.txt", slope_text(a));
    if (!a.surrogate.empty()) write_file(dir / "surrogate.txt", a.surrogate);
    if (!a.optimum.empty()) write_file(dir / "optimum.txt", a.optimum);
    if (!options.quiet) {
      log << "pipeline " << pipeline_name(config.pipeline) << " finished; outputs in " << dir.string() << "\n";
      log << slope_text(a);
    }
    return 0;
  } catch (const ConfigError& e) {
    log << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    log << "numerical failure: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    log << "numerical failure: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace kernelkit::cli
