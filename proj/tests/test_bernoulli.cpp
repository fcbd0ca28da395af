#include <cmath>
#include <vector>

#include "doctest.h"
#include "kylepen/bernoulli.hpp"
#include "kylepen/equilibrium.hpp"
#include "kylepen/errors.hpp"
#include "kylepen/fixed_point.hpp"

using namespace kylepen;

namespace {

// Independent trapezoid evaluation of E[e^{Y/chat}/(p(e^{Y/chat}-1)+1/a)].
double rhs_trapezoid(double a, double p, const ModelParams& prm) {
  const int n = 160001;
  const double w = 12.0 * prm.sigma;
  const double h = 2.0 * w / (n - 1);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double y = -w + i * h;
    const double e = std::exp(y / prm.chat);
    const double term = e / (p * (e - 1.0) + 1.0 / a) *
                        std::exp(-y * y / (2.0 * prm.sigma * prm.sigma));
    acc += (i == 0 || i == n - 1) ? 0.5 * term : term;
  }
  return acc * h / (prm.sigma * std::sqrt(2.0 * M_PI));
}

}  // namespace

TEST_CASE("solve_a roots") {
  ModelParams p11(1.0, 1.0);
  auto quad = gauss_hermite(120, 1.0);

  CHECK(solve_a(1.0, p11, quad) == 1.0);  // degenerate boundary case
  CHECK_THROWS_AS(solve_a(0.0, p11, quad), InvalidArgument);
  CHECK_THROWS_AS(solve_a(0.5, p11, gauss_hermite(30, 1.0)), InvalidArgument);

  // p = 1/2 is symmetric: 2 sigmoid integrates to 1, so a = 1 exactly.
  const double a_half = solve_a(0.5, p11, quad);
  CHECK(a_half > 0.0);
  CHECK(a_half < 2.0);
  CHECK(std::abs(rhs_trapezoid(a_half, 0.5, p11) - 1.0) <= 1e-10);
  CHECK(a_half == doctest::Approx(1.0).epsilon(1e-12));

  // Asymmetric case against the trapezoid oracle.
  const double a3 = solve_a(0.3, p11, quad);
  CHECK(std::abs(rhs_trapezoid(a3, 0.3, p11) - 1.0) <= 1e-10);
  CHECK(a3 != doctest::Approx(1.0).epsilon(1e-3));

  // Large c: the prior barely moves and a -> 1.
  const double a_c10 = solve_a(0.3, ModelParams(1.0, 10.0), gauss_hermite(120, 1.0));
  const double a_c100 = solve_a(0.3, ModelParams(1.0, 100.0), gauss_hermite(120, 1.0));
  CHECK(std::abs(a_c100 - 1.0) <= 1e-3);
  CHECK(std::abs(a_c100 - 1.0) < std::abs(a_c10 - 1.0));
  CHECK(std::abs(a_c10 - 1.0) < std::abs(a3 - 1.0));
}

TEST_CASE("right side is strictly increasing in a") {
  ModelParams p(1.0, 1.0);
  double prev = 0.0;
  for (double a = 0.1; a <= 3.2; a += 0.25) {
    const double r = rhs_trapezoid(a, 0.3, p);
    CHECK(r > prev);
    prev = r;
  }
  CHECK(prev < 1.0 / 0.3);  // bounded by 1/p
}

TEST_CASE("bernoulli_pair closed form") {
  ModelParams p(1.0, 1.0, 0.3);
  const auto m = make_bernoulli(0.3, p);
  CHECK(bernoulli_phi(m, 0.0) == doctest::Approx(0.0).epsilon(1e-15));
  // Lower tail flattens to chat log(1 - a p).
  CHECK(bernoulli_phi(m, -40.0) ==
        doctest::Approx(p.chat * std::log(1.0 - m.a * m.p)).epsilon(1e-12));
  CHECK(bernoulli_psi1(m) == doctest::Approx(-p.chat * std::log(m.a)));
  CHECK(bernoulli_psi0(m) ==
        doctest::Approx(-p.chat * std::log((1.0 - m.a * m.p) / (1.0 - m.p))));

  const auto pair = bernoulli_pair(m);
  CHECK(pair.phi.eval(0.0) == 0.0);
  for (double y = -7.5; y <= 7.5; y += 0.5) {
    const double slope = pair.phi.eval(y, 1);
    CHECK(slope > 0.0);
    CHECK(slope < 1.0);
  }

  // Fixed-point property through the public operators.
  auto dist = ValueDistribution::discrete({{0.0, 0.7}, {1.0, 0.3}});
  CHECK(pair_identity_deviation(pair, dist, p) <= 1e-8);
  auto quad = gauss_hermite(120, 1.0);
  GridFunction mapped = apply_T(pair.phi.grid(), dist, p, quad);
  CHECK(mapped.sup_diff(pair.phi.grid()) <= 1e-8);
}

TEST_CASE("terminal price is the posterior probability of the high state") {
  ModelParams prm(1.0, 1.0, 0.3);
  const auto m = make_bernoulli(0.3, prm);
  auto dist = ValueDistribution::discrete({{0.0, 0.7}, {1.0, 0.3}});
  EquilibriumModel em(bernoulli_pair(m), dist, prm);
  for (double y : {-3.0, -0.5, 0.0, 1.0, 4.0}) {
    const double h = bernoulli_phi_deriv(m, y);
    CHECK(h > 0.0);
    CHECK(h < 1.0);
    CHECK(std::abs(rho_star(em, 1.0, y, 1.0) * 0.3 - h) <= 1e-9);
  }
}

TEST_CASE("generic fixed point agrees with the closed form") {
  ModelParams prm(1.0, 1.0, 0.3);
  const auto m = make_bernoulli(0.3, prm);
  auto dist = ValueDistribution::discrete({{0.0, 0.7}, {1.0, 0.3}});
  auto rep = solve_fixed_point(dist, prm);
  const auto& grid = rep.pair.phi.grid();
  double sup = 0.0;
  for (int i = 0; i < grid.n_points(); ++i) {
    const double y = grid.node(i);
    if (y < -6.0 || y > 6.0) continue;
    sup = std::max(sup, std::abs(grid.value_at_node(i) - bernoulli_phi(m, y)));
  }
  CHECK(sup <= 1e-7);
  CHECK(rep.pair.psi.value(1.0) == doctest::Approx(bernoulli_psi1(m)).epsilon(1e-8));
  CHECK(rep.pair.psi.value(0.0) == doctest::Approx(bernoulli_psi0(m)).epsilon(1e-8));
}

TEST_CASE("make_bernoulli validates p") {
  ModelParams prm(1.0, 1.0);
  CHECK_THROWS_AS(make_bernoulli(1.0, prm), InvalidArgument);
  CHECK_THROWS_AS(make_bernoulli(0.0, prm), InvalidArgument);
}
