#include <cmath>
#include <vector>

#include "doctest.h"
#include "kylepen/bernoulli.hpp"
#include "kylepen/equilibrium.hpp"
#include "kylepen/errors.hpp"
#include "kylepen/fixed_point.hpp"
#include "kylepen/gaussian.hpp"
#include "kylepen/simulate.hpp"

using namespace kylepen;

namespace {

EquilibriumModel gaussian_em(double kappa = 1.5) {
  const auto m = GaussianModel::from_kappa(kappa);
  return EquilibriumModel(gaussian_pair(m), m.distribution(), m.params());
}

SimConfig small_cfg(std::uint64_t seed = 101, int paths = 20000, int steps = 400) {
  SimConfig cfg;
  cfg.n_paths = paths;
  cfg.n_steps = steps;
  cfg.seed = seed;
  return cfg;
}

bool within(double x, double target, double se, double k) {
  return std::abs(x - target) <= k * se;
}

}  // namespace

TEST_CASE("config validation") {
  auto em = gaussian_em();
  SimConfig bad = small_cfg();
  bad.n_steps = 10;
  CHECK_THROWS_AS(simulate(em, bad), InvalidArgument);
  bad = small_cfg();
  bad.n_paths = 50;
  CHECK_THROWS_AS(simulate(em, bad), InvalidArgument);
  bad = small_cfg();
  bad.v_mode = VMode::FixedV;
  bad.fixed_v = 0.35;  // not an atom of the two-point law
  ModelParams prm(1.0, 1.0, 0.5);
  const auto bm = make_bernoulli(0.5, prm);
  EquilibriumModel emb(bernoulli_pair(bm),
                       ValueDistribution::discrete({{0.0, 0.5}, {1.0, 0.5}}), prm);
  CHECK_THROWS_AS(simulate(emb, bad), InvalidArgument);
}

TEST_CASE("determinism: identical seed gives bit-identical reports") {
  auto em = gaussian_em();
  SimConfig cfg = small_cfg(77, 2000, 100);
  auto a = mc_report(simulate(em, cfg), em);
  auto b = mc_report(simulate(em, cfg), em);
  CHECK(a.insider_wealth.point == b.insider_wealth.point);
  CHECK(a.expected_penalty.point == b.expected_penalty.point);
  CHECK(a.noise_loss.point == b.noise_loss.point);
  CHECK(a.price_drift.point == b.price_drift.point);
  cfg.seed = 78;
  auto c = mc_report(simulate(em, cfg), em);
  CHECK(a.insider_wealth.point != c.insider_wealth.point);
}

TEST_CASE("point-mass law reduces to pure Brownian demand") {
  ModelParams prm(1.0, 1.0, 0.7);
  auto rep = solve_fixed_point(ValueDistribution::point_mass(0.7), prm);
  EquilibriumModel em(rep.pair, ValueDistribution::point_mass(0.7), prm);
  SimConfig cfg = small_cfg(5, 20000, 100);
  auto ens = simulate(em, cfg);
  CHECK(ens.flagged == 0);
  double mean = 0.0, var = 0.0;
  for (const auto& r : ens.paths) mean += r.y1;
  mean /= static_cast<double>(ens.paths.size());
  for (const auto& r : ens.paths) var += (r.y1 - mean) * (r.y1 - mean);
  var /= static_cast<double>(ens.paths.size() - 1);
  const double n = static_cast<double>(ens.paths.size());
  CHECK(within(mean, 0.0, 1.0 / std::sqrt(n), 3.0));
  CHECK(within(var, 1.0, std::sqrt(2.0 / n), 3.0));
  // No trading: zero penalty and gain on every path.
  for (const auto& r : ens.paths) {
    CHECK(r.penalty <= 1e-18);
    CHECK(std::abs(r.gain) <= 1e-12);
  }
}

TEST_CASE("Gaussian model: sampled-v estimates hit the closed forms") {
  auto em = gaussian_em();
  auto rep = mc_report(simulate(em, small_cfg(2024)), em);
  CHECK(rep.flagged == 0);
  CHECK(within(rep.insider_wealth.point, 0.2842384456611643, rep.insider_wealth.se, 3.0));
  CHECK(within(rep.expected_penalty.point, 0.2157615543388357, rep.expected_penalty.se, 3.0));
  CHECK(within(rep.noise_loss.point, 0.5, rep.noise_loss.se, 3.0));
  // Terminal posterior variance is constant for the quadratic carrier.
  CHECK(rep.terminal_posterior_variance.point == doctest::Approx(0.75).epsilon(1e-12));

  // Brownianity diagnostics under SampleFromPi.
  CHECK(rep.brownian_diagnostics_valid);
  const double n = static_cast<double>(rep.n_paths);
  CHECK(rep.max_abs_mean_Y.point <= 3.5 * 1.0 / std::sqrt(n));
  CHECK(rep.max_var_ratio_dev.point <= 3.5 * std::sqrt(2.0 / n));
  CHECK(rep.price_drift.point <= 3.5 * rep.price_drift.se + 1e-3);
  CHECK(std::abs(rep.incr_autocorr1) <= 0.01);
}

TEST_CASE("fixed-v run matches the h-transform") {
  auto em = gaussian_em();
  SimConfig cfg = small_cfg(31);
  cfg.v_mode = VMode::FixedV;
  cfg.fixed_v = 1.0;
  auto ens = simulate(em, cfg);
  auto rep = mc_report(ens, em);
  CHECK(within(rep.expected_penalty.point, 0.2157615543388357, rep.expected_penalty.se, 3.0));
  CHECK(!rep.brownian_diagnostics_valid);

  // Terminal law of Y under v = 1 is N(v/2, 0.75) at kappa = 1.5.
  double mean = 0.0;
  for (const auto& r : ens.paths) mean += r.y1;
  mean /= static_cast<double>(ens.paths.size());
  const double se = std::sqrt(0.75 / static_cast<double>(ens.paths.size()));
  CHECK(within(mean, 0.5, se, 3.0));

  // Pathwise wealth identity: mean(gain - penalty) = insider_value(v).
  auto w = mc_report(ens, em).insider_wealth;
  CHECK(within(w.point, insider_value(em, 1.0), w.se, 3.0));
}

TEST_CASE("halving the step size moves the penalty estimate by less than one se") {
  // 400 and 800 steps share the same Brownian refinement, so the difference
  // is pure discretization error.
  auto em = gaussian_em();
  auto r400 = mc_report(simulate(em, small_cfg(9, 20000, 400)), em);
  auto r800 = mc_report(simulate(em, small_cfg(9, 20000, 800)), em);
  CHECK(std::abs(r400.expected_penalty.point - r800.expected_penalty.point) <=
        r400.expected_penalty.se);
}

TEST_CASE("tabulated-drift simulation for the two-point law") {
  ModelParams prm(1.0, 1.0, 0.5);
  const auto bm = make_bernoulli(0.5, prm);
  auto dist = ValueDistribution::discrete({{0.0, 0.5}, {1.0, 0.5}});
  EquilibriumModel em(bernoulli_pair(bm), dist, prm);

  SimConfig cfg = small_cfg(17, 20000, 100);
  auto rep = mc_report(simulate(em, cfg), em);
  CHECK(rep.flagged == 0);
  const double expect_w = 0.5 * (insider_value(em, 0.0) + insider_value(em, 1.0));
  CHECK(within(rep.insider_wealth.point, expect_w, rep.insider_wealth.se, 3.0));
  const double expect_nl = noise_loss(em);
  CHECK(within(rep.noise_loss.point, expect_nl, rep.noise_loss.se, 3.0));

  SimConfig cfv = cfg;
  cfv.v_mode = VMode::FixedV;
  cfv.fixed_v = 1.0;
  auto repv = mc_report(simulate(em, cfv), em);
  CHECK(within(repv.expected_penalty.point, expected_penalty_per_v(em, 1.0),
               repv.expected_penalty.se, 3.0));

  // Sampling a continuous law with a tabulated pair is rejected.
  ModelParams p15(1.0, 1.5);
  auto grep = solve_fixed_point(ValueDistribution::gaussian(0.0, 1.0), p15);
  EquilibriumModel emg(grep.pair, ValueDistribution::gaussian(0.0, 1.0), p15);
  CHECK_THROWS_AS(simulate(emg, cfg), InvalidArgument);
  // ... but conditioning on a single v works through the drift table.
  SimConfig cfgv = small_cfg(3, 2000, 100);
  cfgv.v_mode = VMode::FixedV;
  cfgv.fixed_v = 1.0;
  auto repg = mc_report(simulate(emg, cfgv), emg);
  CHECK(within(repg.expected_penalty.point, 0.2157615543388357,
               repg.expected_penalty.se, 3.5));
}

TEST_CASE("bridge regression recovers Lambda and stays below the bridge rate") {
  SimConfig cfg = small_cfg(55, 20000, 400);
  auto rows = bridge_comparison({0.5, 1.5, 5.0}, 1.0, 1.0, 0.0, cfg);
  REQUIRE(rows.size() == 3);
  for (const auto& row : rows) {
    CHECK(within(row.coefficient, row.expected_Lambda, row.se, 3.0));
    CHECK(row.coefficient < 1.0);
    CHECK(row.expected_Lambda == doctest::Approx(Lambda(row.kappa)));
  }
  // Small kappa approaches the no-penalty rate 1.
  auto low = bridge_comparison({0.01}, 1.0, 1.0, 0.0, small_cfg(56, 5000, 400));
  CHECK(within(low[0].coefficient, low[0].expected_Lambda, low[0].se, 3.0));
  CHECK(low[0].expected_Lambda > 0.99);
}
