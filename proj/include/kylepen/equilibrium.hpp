#pragma once

#include <utility>
#include <vector>

#include "kylepen/convex_pair.hpp"
#include "kylepen/model.hpp"
#include "kylepen/quadrature.hpp"

namespace kylepen {

// A converged pair together with its law and parameters; every equilibrium
// object of the model evaluates against this. Immutable; all evaluators are
// pure and safe to call concurrently.
class EquilibriumModel {
 public:
  // Validates the pair against the fixed-point identities
  // (deviation <= fp_tol) unless fp_tol <= 0.
  EquilibriumModel(ConvexPair pair, ValueDistribution dist, ModelParams params,
                   int quad_order = 120, double fp_tol = 1e-6);

  const ConvexPair& pair() const { return pair_; }
  const ValueDistribution& dist() const { return dist_; }
  const ModelParams& params() const { return params_; }
  int quad_order() const { return quad_order_; }

  const std::vector<double>& atom_v() const { return atom_v_; }
  const std::vector<double>& atom_w() const { return atom_w_; }
  const std::vector<double>& atom_psi() const { return atom_psi_; }

  // Unit normal rule (nodes for N(0,1)); scaled on use.
  const QuadratureRule& unit_rule() const { return unit_; }

 private:
  ConvexPair pair_;
  ValueDistribution dist_;
  ModelParams params_;
  int quad_order_;
  std::vector<double> atom_v_, atom_w_, atom_psi_;
  QuadratureRule unit_;
};

// Un-normalized posterior density of V w.r.t. Pi given Y_t = y:
// rho*(t,y,v) = exp(-psi(v)/chat) E[ exp((Xv - phi(X))/chat) ], X ~ N(y,
// sigma^2 (1-t)). At t >= 1 - 1e-6 the exact terminal form is used.
double rho_star(const EquilibriumModel& em, double t, double y, double v);
double log_rho_star(const EquilibriumModel& em, double t, double y, double v);

// log rho* for every atom at once (shared phi samples across atoms).
void log_rho_star_atoms(const EquilibriumModel& em, double t, double y,
                        std::vector<double>& out);

// Lower/upper envelope for rho* used as a debug check.
std::pair<double, double> rho_star_bounds(const EquilibriumModel& em, double t, double y,
                                          double v);

// Pricing rule H*(t,y) = sum_i w_i v_i rho*(t,y,v_i); solves the backward
// heat equation with terminal value phi'.
double pricing_rule_H(const EquilibriumModel& em, double t, double y);

// Optimal trading rate alpha*(t,y,v) = sigma^2 rho*_y / rho*. The kernel is
// differentiated analytically (moment shift); t = 1 is rejected.
double alpha_star(const EquilibriumModel& em, double t, double y, double v);

// E[W] = psi(v) + E[phi(sigma B_1)].
double insider_value(const EquilibriumModel& em, double v);

// psi'(v) as the posterior mean of Y_1 under the tilted terminal law
// (exact identity; no atom differencing).
double psi_prime(const EquilibriumModel& em, double v);

// Expected penalty = chat * relative entropy of the tilted path law:
// v psi'(v) - psi(v) - E[phi(Y*_1)] with Y*_1 ~ exp((v x - phi(x))/chat)
// reweighting of N(0, sigma^2).
double expected_penalty_per_v(const EquilibriumModel& em, double v);

// sigma^2 E[phi''(Y_1)], Y_1 ~ N(0, sigma^2) unconditionally.
double noise_loss(const EquilibriumModel& em);

// delta = chat E[phi''(Y_1)]; equals c * noise_loss.
double price_inefficiency(const EquilibriumModel& em);

// Var(V | Y_t = y) = E[chat phi''(X) + phi'(X)^2 | X ~ N(y, sigma^2(1-t))]
// - H*(t,y)^2. Requires bounded support or Gaussian V.
double conditional_variance(const EquilibriumModel& em, double t, double y);

// J(t,y,v) = psi(v) - yv + E[phi(X)] + chat log rho*(t,y,v); J(1,.) = 0.
double value_function_J(const EquilibriumModel& em, double t, double y, double v);

// Normalization sum_i w_i rho*(t,y,v_i); equals 1 for a genuine pair.
double rho_normalization(const EquilibriumModel& em, double t, double y);

// Optional projection of the drift: sum_i w_i alpha_i rho_i; equals 0.
double drift_projection(const EquilibriumModel& em, double t, double y);

}  // namespace kylepen
