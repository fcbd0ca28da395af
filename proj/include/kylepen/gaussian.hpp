#pragma once

#include "kylepen/convex_pair.hpp"
#include "kylepen/model.hpp"

namespace kylepen {

// Exact equilibrium for Gaussian V ~ N(mu, gamma^2): phi*(y) = lambda* y^2/2
// + mu y with lambda* the positive root of sigma^2 l^2 + chat l - gamma^2 = 0,
// and the kappa = c sigma / gamma parametrization with Lambda(kappa) =
// lambda* sigma / gamma solving Lambda^2 + kappa Lambda = 1.
struct GaussianModel {
  double mu = 0.0;
  double gamma = 1.0;
  double sigma = 1.0;
  double c = 1.0;
  double kappa_rate = 1.0;   // c sigma / gamma
  double lambda_star = 0.0;

  static GaussianModel from_c(double mu, double gamma, double sigma, double c);
  static GaussianModel from_kappa(double kappa, double gamma = 1.0, double sigma = 1.0,
                                  double mu = 0.0);

  ModelParams params() const { return ModelParams(sigma, c, mu); }
  ValueDistribution distribution() const { return ValueDistribution::gaussian(mu, gamma); }
  double Lambda() const { return lambda_star * sigma / gamma; }
};

// All scalar equilibrium statistics of the Gaussian model.
struct GaussianSummary {
  double lambda_star = 0.0;
  double Lambda = 0.0;
  double Lambda_prime = 0.0;
  double insider_wealth_exante = 0.0;  // (gamma sigma/2)(k log(k L) + 2 L)
  double expected_penalty = 0.0;       // -(gamma sigma/2) k log(k L)
  double welfare = 0.0;                // (gamma sigma/2) k log(1 - L^2)
  double noise_loss = 0.0;             // Lambda gamma sigma
  double inefficiency_delta = 0.0;     // kappa Lambda gamma^2
  double liquidity_gain_L = 0.0;       // 1/Lambda - 1
  double avg_entropy = 0.0;            // -(1/2) log(1 - Lambda^2)
};

double lambda_star(double c, double sigma, double gamma);

// Lambda(kappa) = (sqrt(kappa^2+4) - kappa)/2, evaluated without cancellation
// for large kappa. kappa = 0 allowed as the no-penalty limit.
double Lambda(double kappa);
double Lambda_prime(double kappa);

ConvexPair gaussian_pair(const GaussianModel& model);
GaussianSummary gaussian_summary(const GaussianModel& model);

// Mean-reversion rate r(t) = Lambda / (1 - t Lambda^2) of the insider's
// target; stays below the no-penalty bridge rate 1/(1-t).
double speed_of_mean_reversion(double t, double kappa);

// Closed-form posterior density of V w.r.t. Pi given Y_t = y: the ratio of
// N(lambda* y + mu, gamma^2 (1 - t Lambda^2)) to the N(mu, gamma^2) prior.
double gaussian_rho(const GaussianModel& model, double t, double y, double v);

// Var(V | F_t) = gamma^2 (1-t) + t kappa Lambda gamma^2 (y-independent).
double conditional_variance(const GaussianModel& model, double t);

// Root of (1 + Lambda^2(k))^2 / k = 4, bracketed in (0.3, 0.7). Note the
// evaluated penalty curve itself changes curvature near k = 1.572, where
// (1 + Lambda^2)^2 / (k Lambda) = 2; see the acceptance suite output.
double penalty_inflection_kappa0();

// Argmax of the expected-penalty curve P(kappa).
double penalty_argmax_kappa();

}  // namespace kylepen
