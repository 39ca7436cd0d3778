#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "kernelkit/error.hpp"
#include "kernelkit/kernel/interpolant.hpp"
#include "kernelkit/kernel/quadrature.hpp"
#include "kernelkit/kernel/sparse.hpp"
#include "kernelkit/kernel/surrogate.hpp"
#include "support.hpp"

using namespace kernelkit;
using namespace kernelkit::kernel;

namespace {

// 2^(1-beta)/Gamma(beta) r^nu K_nu(r) through the library Bessel function.
double matern_oracle(double beta, int d, double r) {
  const double nu = beta - d / 2.0;
  return std::pow(2.0, 1.0 - beta) / std::tgamma(beta) * std::pow(r, nu) * std::cyl_bessel_k(nu, r);
}

PointSet random_points(testing::Gen& gen, std::size_t n, std::size_t d) {
  return PointSet(unit_box(d), d, gen.uniforms(n * d));
}

}  // namespace

TEST_CASE("Matern radial function") {
  for (double beta : {1.0, 1.5, 2.0, 2.5, 3.0, 4.0}) {
    for (int d : {1, 2, 3}) {
      if (beta - d / 2.0 <= 0.0) continue;
      const MaternKernel k(beta, d);
      const double nu = beta - d / 2.0;
      CHECK(k.value_at_zero() ==
            doctest::Approx(std::pow(2.0, -d / 2.0) * std::tgamma(nu) / std::tgamma(beta)).epsilon(1e-13));
      for (double r : {1e-3, 0.1, 0.5, 1.0, 2.7, 10.0, 40.0}) {
        CHECK(k.radial(r) == doctest::Approx(matern_oracle(beta, d, r)).epsilon(1e-10));
      }
      // Continuous at the origin.
      CHECK(k.radial(1e-9) == doctest::Approx(k.value_at_zero()).epsilon(1e-6));
      CHECK(k.radial(0.0) == k.value_at_zero());
      CHECK(k.radial(1e4) == 0.0);
    }
  }
  // nu = 1/2 in one dimension is the exponential kernel.
  const MaternKernel e(1.0, 1);
  CHECK(e.radial(0.7) == doctest::Approx(std::sqrt(std::numbers::pi / 2.0) * std::exp(-0.7)).epsilon(1e-14));
  const MaternKernel scaled(2.0, 1, 0.5);
  CHECK(scaled.radial(0.3) == doctest::Approx(MaternKernel(2.0, 1).radial(0.6)).epsilon(1e-14));
  CHECK_THROWS(MaternKernel(0.5, 1));
  CHECK_THROWS(MaternKernel(1.3, 1));
}

TEST_CASE("Gram matrices are symmetric positive definite") {
  testing::Gen gen(4);
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t d = static_cast<std::size_t>(gen.integer(1, 3));
    const auto X = random_points(gen, 30, d);
    const auto tk = TensorKernel::single(MaternKernel(d / 2.0 + 1.5, static_cast<int>(d)));
    const auto g = gram_matrix(tk, X);
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> K(g.data(), 30, 30);
    CHECK((K - K.transpose()).norm() == 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(K);
    CHECK(eig.eigenvalues().minCoeff() > 0.0);
  }
}

TEST_CASE("tensor kernels validate their blocks") {
  const MaternKernel a(2.0, 1), b(2.0, 2);
  CHECK_NOTHROW(TensorKernel({{a, 0}, {b, 1}}));
  CHECK_THROWS(TensorKernel({{a, 0}, {b, 0}}));
  CHECK_THROWS(TensorKernel({{a, 1}}));
  const auto t = TensorKernel::stacked({a, b});
  const std::vector<double> x{0.1, 0.2, 0.3}, y{0.4, 0.0, 0.9};
  CHECK(t(x, y) == doctest::Approx(a(std::span(x).first(1), std::span(y).first(1)) *
                                   b(std::span(x).subspan(1), std::span(y).subspan(1))));
}

TEST_CASE("points: Halton, nesting, domains") {
  CHECK(radical_inverse(1, 2) == 0.5);
  CHECK(radical_inverse(2, 2) == 0.25);
  CHECK(radical_inverse(3, 2) == 0.75);
  CHECK(radical_inverse(1, 3) == doctest::Approx(1.0 / 3.0));
  CHECK(radical_inverse(4, 3) == doctest::Approx(4.0 / 9.0));

  const Box box{{-1.0, 2.0}, {1.0, 3.0}};
  const auto big = generate_points(box, 50);
  const auto small = generate_points(box, 20);
  for (std::size_t i = 0; i < 20; ++i) {
    for (std::size_t k = 0; k < 2; ++k) CHECK(small.coord(i, k) == big.coord(i, k));
  }
  CHECK(big.coord(0, 0) == doctest::Approx(0.0));       // -1 + 2 * 1/2
  CHECK(big.coord(0, 1) == doctest::Approx(2.0 + 1.0 / 3.0));

  const Disc disc{0.2, -0.1, 0.5};
  const auto dp = generate_points(disc, 100);
  for (std::size_t i = 0; i < dp.size(); ++i) CHECK(contains(disc, dp.point(i)));
  CHECK(generate_points(disc, 40).coord(39, 0) == dp.coord(39, 0));

  // Fill distance decreases roughly like N^(-1/d).
  const double h1 = fill_distance(generate_points(unit_box(2), 64), 64);
  const double h2 = fill_distance(generate_points(unit_box(2), 1024), 64);
  CHECK(h2 < h1);
  CHECK(h2 < 4.0 * h1 / std::sqrt(16.0));

  CHECK_THROWS(PointSet(unit_box(1), 1, {1.5}));
  const std::vector<double> outside{2.0, 0.0};
  const auto p = project(disc, outside);
  CHECK(contains(disc, p, 1e-12));
  CHECK(std::hypot(p[0] - 0.2, p[1] + 0.1) == doctest::Approx(0.5));
  CHECK(domain_volume(disc) == doctest::Approx(std::numbers::pi * 0.25));
  CHECK(uniform_grid(unit_box(2), 5).size() == 25);
}

TEST_CASE("interpolants reproduce data and agree across evaluation routes") {
  testing::Gen gen(8);
  for (std::size_t d : {1u, 2u, 3u}) {
    const auto tk = TensorKernel::single(MaternKernel(d / 2.0 + 1.5, static_cast<int>(d)));
    const auto X = generate_points(unit_box(d), 40);
    std::vector<double> f(X.size());
    for (std::size_t i = 0; i < X.size(); ++i) f[i] = std::sin(3.0 * X.coord(i, 0)) + X.coord(i, d - 1);
    const auto s = Interpolant::fit(tk, X, f);
    CHECK(s.relative_residual() < 1e-10);
    for (std::size_t i = 0; i < X.size(); ++i) CHECK(s(X.point(i)) == doctest::Approx(f[i]).epsilon(1e-8));
    for (int rep = 0; rep < 20; ++rep) {
      const auto x = gen.uniforms(d);
      CHECK(s(x) == doctest::Approx(s.evaluate_direct(x)).epsilon(1e-12));
    }
    // Native norm squared equals alpha^T K alpha = alpha^T f.
    double af = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) af += s.coefficients()[i] * f[i];
    CHECK(s.native_norm_sq() == doctest::Approx(af).epsilon(1e-12));
  }
}

TEST_CASE("kernel translates are reproduced exactly") {
  const MaternKernel k(2.0, 2);
  const auto tk = TensorKernel::single(k);
  const auto X = generate_points(unit_box(2), 30);
  const std::vector<std::vector<double>> centers = {{0.2, 0.3}, {0.7, 0.9}};
  auto f = [&](std::span<const double> x) { return 2.0 * k(x, centers[0]) - 0.5 * k(x, centers[1]); };
  std::vector<std::vector<double>> pts(X.size());
  for (std::size_t i = 0; i < X.size(); ++i) pts[i].assign(X.point(i).begin(), X.point(i).end());
  pts.push_back(centers[0]);
  pts.push_back(centers[1]);
  const PointSet Y(unit_box(2), pts);
  std::vector<double> v(Y.size());
  for (std::size_t i = 0; i < Y.size(); ++i) v[i] = f(Y.point(i));
  const auto s = Interpolant::fit(tk, Y, v);
  testing::Gen gen(9);
  for (int rep = 0; rep < 50; ++rep) {
    const auto x = gen.uniforms(2);
    CHECK(s(x) == doctest::Approx(f(x)).epsilon(1e-8));
  }
}

TEST_CASE("tensor and scattered fits coincide on a product grid") {
  const auto ka = MaternKernel(2.0, 1), kb = MaternKernel(2.5, 2);
  const auto tk = TensorKernel::stacked({ka, kb});
  const auto A = generate_points(unit_box(1), 5);
  const auto B = generate_points(unit_box(2), 7);
  std::vector<std::vector<double>> grid;
  std::vector<double> f;
  for (std::size_t j = 0; j < B.size(); ++j) {
    for (std::size_t i = 0; i < A.size(); ++i) {
      grid.push_back({A.coord(i, 0), B.coord(j, 0), B.coord(j, 1)});
      f.push_back(std::cos(grid.back()[0] + 2.0 * grid.back()[1]) * grid.back()[2]);
    }
  }
  const auto t = Interpolant::fit_tensor(tk, {A, B}, f);
  const auto s = Interpolant::fit(tk, PointSet(unit_box(3), grid), f);
  CHECK(t.is_tensor());
  CHECK(t.size() == 35);
  testing::Gen gen(10);
  for (int rep = 0; rep < 30; ++rep) {
    const auto x = gen.uniforms(3);
    CHECK(t(x) == doctest::Approx(s(x)).epsilon(1e-9));
    CHECK(t(x) == doctest::Approx(t.evaluate_direct(x)).epsilon(1e-12));
  }
  CHECK(t.native_norm_sq() == doctest::Approx(s.native_norm_sq()).epsilon(1e-8));
}

TEST_CASE("coincident nodes raise ConditioningError") {
  const auto tk = TensorKernel::single(MaternKernel(2.0, 1));
  const PointSet X(unit_box(1), 1, {0.3, 0.3, 0.6});
  const std::vector<double> f{1.0, 2.0, 3.0};
  CHECK_THROWS_AS(Interpolant::fit(tk, X, f), ConditioningError);
}

TEST_CASE("Gauss-Legendre integrates polynomials of degree 2n-1") {
  for (int n : {1, 2, 5, 16, 64}) {
    const auto rule = gauss_legendre(n);
    REQUIRE(rule.size() == static_cast<std::size_t>(n));
    for (int p = 0; p <= 2 * n - 1; ++p) {
      double q = 0.0;
      for (auto [x, w] : rule) q += w * std::pow(x, p);
      const double exact = p % 2 ? 0.0 : 2.0 / (p + 1);
      CHECK(q == doctest::Approx(exact).epsilon(1e-13).scale(1.0));
    }
  }
}

TEST_CASE("kernel quadrature: kernel means and exactness on translates") {
  // Exponential kernel: int_0^1 sqrt(pi/2) e^{-|x-y|} dy = sqrt(pi/2) (2 - e^{-x} - e^{x-1}).
  const MaternKernel k(1.0, 1);
  const auto X = generate_points(unit_box(1), 9);
  const auto rule = quadrature_weights(TensorKernel::single(k), X);
  for (std::size_t i = 0; i < X.size(); ++i) {
    const double x = X.coord(i, 0);
    const double exact = std::sqrt(std::numbers::pi / 2.0) * (2.0 - std::exp(-x) - std::exp(x - 1.0));
    CHECK(rule.kernel_means[i] == doctest::Approx(exact).epsilon(1e-13));
    std::vector<double> translate(X.size());
    for (std::size_t j = 0; j < X.size(); ++j) translate[j] = k(X.point(j), X.point(i));
    CHECK(rule.apply(translate) == doctest::Approx(exact).epsilon(1e-10));
  }
  // Smooth integrand in 2-d.
  const auto Y = generate_points(unit_box(2), 200);
  const auto r2 = quadrature_weights(TensorKernel::single(MaternKernel(2.5, 2)), Y);
  std::vector<double> f(Y.size());
  for (std::size_t i = 0; i < Y.size(); ++i) f[i] = std::exp(Y.coord(i, 0)) * Y.coord(i, 1);
  CHECK(r2.apply(f) == doctest::Approx((std::numbers::e - 1.0) / 2.0).epsilon(2e-3));
  CHECK_THROWS_AS(quadrature_weights(TensorKernel::single(MaternKernel(2.0, 2)), generate_points(Disc{}, 5)),
                  std::invalid_argument);
}

TEST_CASE("surrogates: linearity and text round trip") {
  const auto tk = TensorKernel::stacked({MaternKernel(2.0, 1), MaternKernel(2.0, 1)});
  const auto A = generate_points(unit_box(1), 4), B = generate_points(unit_box(1), 3);
  std::vector<double> f(12);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::sin(static_cast<double>(i));
  auto s1 = std::make_shared<const Interpolant>(Interpolant::fit_tensor(tk, {A, B}, f));
  const auto X = generate_points(Disc{0.5, 0.5, 0.5}, 6);
  std::vector<double> g(6, 1.0);
  auto s2 = std::make_shared<const Interpolant>(Interpolant::fit(TensorKernel::single(MaternKernel(2.0, 2)), X, g));

  Surrogate sum(s1, 2.0);
  sum += Surrogate(s2, -1.0);
  sum.set_domains({unit_box(1), unit_box(1)});
  const std::vector<double> x{0.3, 0.6};
  CHECK(sum(x) == doctest::Approx(2.0 * (*s1)(x) - (*s2)(x)).epsilon(1e-14));
  Surrogate scaled = sum;
  scaled *= 3.0;
  CHECK(scaled(x) == doctest::Approx(3.0 * sum(x)).epsilon(1e-14));
  CHECK(Surrogate{}(x) == 0.0);

  const auto text = sum.serialize();
  const auto back = Surrogate::parse(text);
  testing::Gen gen(12);
  for (int rep = 0; rep < 100; ++rep) {
    const auto y = gen.uniforms(2);
    CHECK(std::abs(back(y) - sum(y)) <= 1e-15 * std::max(1.0, std::abs(sum(y))));
  }
  CHECK(back.serialize() == text);
  CHECK(back.domains() == sum.domains());

  std::string broken = text;
  broken.replace(broken.find("layout tensor"), 13, "layout fancy");
  try {
    Surrogate::parse(broken);
    FAIL("expected a parse error");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("line") != std::string::npos);
  }
  CHECK_THROWS(Surrogate::parse("kernelkit-surrogate v9\n"));
}

TEST_CASE("sparse interpolation") {
  const SparseFactor f1{MaternKernel(2.0, 1), unit_box(1), 0.0, 1.0};
  CHECK(sparse_factor_spec(f1).beta == doctest::Approx(2.0));
  CHECK(sparse_factor_spec(SparseFactor{MaternKernel(2.0, 1), unit_box(1), 0.5, 1.0}).beta == doctest::Approx(1.5));

  SUBCASE("one factor is plain interpolation at the top level") {
    auto f = [](std::span<const double> x) { return std::exp(x[0]); };
    for (int L = 1; L <= 6; ++L) {
      const auto est = sparse_interpolate({f1}, f, L);
      const auto N = level_to_resolution(sparse_factor_spec(f1), L);
      const auto X = generate_points(unit_box(1), N);
      std::vector<double> v(N);
      for (std::size_t i = 0; i < N; ++i) v[i] = f(X.point(i));
      const auto s = Interpolant::fit(TensorKernel::single(f1.kernel), X, v);
      for (double x : {0.05, 0.33, 0.71, 0.99}) {
        const std::vector<double> p{x};
        CHECK(est.value(p) == doctest::Approx(s(p)).epsilon(1e-12));
      }
    }
  }

  SUBCASE("products of level-1 translates are reproduced") {
    const auto X1 = generate_points(unit_box(1), level_to_resolution(sparse_factor_spec(f1), 1));
    auto f = [&](std::span<const double> x) {
      return f1.kernel(x.first(1), X1.point(0)) * f1.kernel(x.subspan(1), X1.point(X1.size() - 1));
    };
    const auto est = sparse_interpolate({f1, f1}, f, 5);
    testing::Gen gen(13);
    for (int rep = 0; rep < 100; ++rep) {
      const auto x = gen.uniforms(2);
      CHECK(est.value(x) == doctest::Approx(f(x)).epsilon(1e-7));
    }
  }

  SUBCASE("sparse grid nodes are a union of nested tensor grids") {
    const auto nodes = sparse_grid_nodes({f1, f1}, 4);
    std::size_t expected = 0;
    for (int l1 = 1; l1 <= 3; ++l1) {
      const int l2 = 4 - l1;
      const auto n1 = level_to_resolution(sparse_factor_spec(f1), l1);
      const auto n1m = level_to_resolution(sparse_factor_spec(f1), l1 - 1);
      const auto n2 = level_to_resolution(sparse_factor_spec(f1), l2);
      expected += (n1 - n1m) * n2;
    }
    CHECK(nodes.size() == expected);
  }
}
