#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "kylepen/errors.hpp"
#include "kylepen/grid_function.hpp"
#include "kylepen/model.hpp"
#include "kylepen/quadrature.hpp"

using namespace kylepen;

TEST_CASE("gauss_hermite integrates moments of N(0, sigma^2)") {
  auto q5 = gauss_hermite(5, 1.0);
  CHECK(q5.integrate([](double y) { return y * y; }) == doctest::Approx(1.0).epsilon(1e-14));
  auto q5b = gauss_hermite(5, 2.0);
  CHECK(q5b.integrate([](double y) { return y * y; }) == doctest::Approx(4.0).epsilon(1e-13));
  auto q40 = gauss_hermite(40, 1.0);
  CHECK(q40.integrate([](double y) { return std::exp(y); }) ==
        doctest::Approx(std::exp(0.5)).epsilon(1e-12));
}

TEST_CASE("quadrature rules normalize and reject bad input") {
  for (int n : {2, 7, 40, 120, 200}) {
    auto q = gauss_hermite(n, 0.7);
    double wsum = 0.0;
    for (double w : q.weights) {
      CHECK(w > 0.0);
      wsum += w;
    }
    CHECK(std::abs(wsum - 1.0) <= 1e-12);
    CHECK(q.integrate([](double) { return 1.0; }) == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK_THROWS_AS(gauss_hermite(1, 1.0), InvalidArgument);
  CHECK_THROWS_AS(gauss_hermite(10, 0.0), InvalidArgument);
  CHECK_THROWS_AS(discrete_rule({0.0, 1.0}, {0.5, 0.6}), InvalidArgument);
  CHECK_THROWS_AS(discrete_rule({0.0}, {-1.0}), InvalidArgument);
}

TEST_CASE("ModelParams derives chat and validates") {
  ModelParams p(2.0, 1.5, 0.3);
  CHECK(p.chat == 1.5 * 2.0 * 2.0);
  CHECK(p.mu_bar == 0.3);
  CHECK_THROWS_AS(ModelParams(0.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(ModelParams(1.0, -2.0), InvalidArgument);
}

TEST_CASE("mgf examples") {
  auto bern = ValueDistribution::discrete({{0.0, 0.5}, {1.0, 0.5}});
  CHECK(bern.mgf(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  // Direct two-term sum as the oracle.
  CHECK(bern.mgf(1.0) == doctest::Approx(0.5 * (1.0 + std::exp(1.0))).epsilon(1e-15));
  auto gauss = ValueDistribution::gaussian(0.0, 1.0);
  CHECK(gauss.mgf(2.0) == doctest::Approx(std::exp(2.0)).epsilon(1e-14));
  CHECK_THROWS_AS(gauss.mgf(1e6), NumericalError);
  CHECK_THROWS_AS(bern.mgf(1e4), NumericalError);
}

TEST_CASE("mgf is log-convex on random triples") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> ur(-3.0, 3.0);
  std::uniform_real_distribution<double> ut(0.01, 0.99);
  auto dists = std::vector<ValueDistribution>{
      ValueDistribution::discrete({{-1.0, 0.25}, {0.2, 0.5}, {2.0, 0.25}}),
      ValueDistribution::gaussian(0.3, 0.8),
      ValueDistribution::quantile_map([](double x) { return std::tanh(x); }, 80)};
  for (const auto& dist : dists) {
    for (int i = 0; i < 50; ++i) {
      double r1 = ur(rng), r2 = ur(rng), t = ut(rng);
      if (r1 > r2) std::swap(r1, r2);
      const double lhs = dist.mgf(t * r1 + (1.0 - t) * r2);
      const double rhs = std::pow(dist.mgf(r1), t) * std::pow(dist.mgf(r2), 1.0 - t);
      CHECK(lhs <= rhs * (1.0 + 1e-10));
    }
  }
}

TEST_CASE("distribution validation and moments") {
  CHECK_THROWS_AS(ValueDistribution::discrete({{0.0, 0.5}, {0.0, 0.5}}), InvalidArgument);
  CHECK_THROWS_AS(ValueDistribution::discrete({{0.0, 0.6}, {1.0, 0.5}}), InvalidArgument);
  CHECK_THROWS_AS(ValueDistribution::gaussian(0.0, -1.0), InvalidArgument);
  CHECK_THROWS_AS(
      ValueDistribution::quantile_map([](double x) { return -x; }, 60), InvalidArgument);

  auto d = ValueDistribution::discrete({{-1.0, 0.25}, {1.0, 0.75}});
  CHECK(d.mean() == doctest::Approx(0.5));
  CHECK(d.variance() == doctest::Approx(0.75));
  CHECK(d.support_bound().value() == 1.0);

  auto g = ValueDistribution::gaussian(0.4, 2.0);
  CHECK(!g.support_bound().has_value());
  auto atoms = g.atoms(120);
  CHECK(atoms.integrate([](double v) { return v; }) == doctest::Approx(0.4).epsilon(1e-13));
  CHECK(atoms.integrate([](double v) { return (v - 0.4) * (v - 0.4); }) ==
        doctest::Approx(4.0).epsilon(1e-13));

  auto qm = ValueDistribution::quantile_map([](double x) { return std::tanh(x); }, 80);
  CHECK(qm.mean() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(qm.support_bound().value() <= 1.0);
}

TEST_CASE("GridFunction evaluation on a tabulated quadratic") {
  auto gf = GridFunction::tabulate([](double y) { return 0.25 * y * y; }, -8.0, 8.0, 1601);
  const double h = gf.step();
  // y = 2 is a node: exact there; mid-segment error bounded by h^2/8 max|f''|.
  CHECK(gf.eval(2.0, 0) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(std::abs(gf.eval(2.0 + 0.5 * h, 0) - 0.25 * std::pow(2.0 + 0.5 * h, 2)) <=
        h * h / 8.0 * 0.5 + 1e-15);
  CHECK(gf.eval(2.0, 1) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(gf.eval(0.0, 2) == doctest::Approx(0.5).epsilon(1e-8));
  // Outside the grid: linear tails, zero curvature.
  CHECK(gf.eval(10.0, 2) == 0.0);
  CHECK(gf.eval(-10.0, 1) == doctest::Approx(gf.left_slope()));
}

TEST_CASE("convexity check accepts convex tabulations and rejects -y^2") {
  for (auto f : {+[](double y) { return y * y; }, +[](double y) { return std::abs(y); },
                 +[](double y) { return std::exp(y); }}) {
    CHECK_NOTHROW(GridFunction::tabulate(f, -4.0, 4.0, 401));
  }
  CHECK_THROWS_AS(GridFunction::tabulate([](double y) { return -y * y; }, -4.0, 4.0, 401),
                  InvalidArgument);
  CHECK_THROWS_AS(GridFunction(1.0, 2.0, {0.0, 0.0, 0.0}, 0.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(GridFunction(-1.0, 1.0, {0.0, 0.0}, 0.0, 0.0), InvalidArgument);
}

TEST_CASE("order-1 eval matches centered differences of order-0 at off-node points") {
  auto gf = GridFunction::tabulate([](double y) { return std::exp(y / 3.0); }, -6.0, 6.0, 601);
  const double h = gf.step();
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> uy(-5.5, 5.5);
  for (int i = 0; i < 200; ++i) {
    const double y = uy(rng);
    const double fd = (gf.eval(y + h, 0) - gf.eval(y - h, 0)) / (2.0 * h);
    CHECK(std::abs(gf.eval(y, 1) - fd) <= 2.0 * h);
  }
}

TEST_CASE("spline evaluator tracks smooth functions to higher order") {
  auto gf = GridFunction::tabulate([](double y) { return 0.25 * y * y; }, -8.0, 8.0, 1601,
                                   -4.0, 4.0);
  SplineEval s(gf);
  double worst = 0.0;
  for (double y = -7.9; y < 7.9; y += 0.0137)
    worst = std::max(worst, std::abs(s(y) - 0.25 * y * y));
  CHECK(worst <= 1e-10);
  CHECK(s(9.0) == doctest::Approx(gf.eval(9.0, 0)));  // linear tails agree
  CHECK(s.deriv(3.3) == doctest::Approx(0.5 * 3.3).epsilon(1e-9));
}
