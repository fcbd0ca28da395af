#pragma once

#include "kylepen/convex_pair.hpp"
#include "kylepen/model.hpp"
#include "kylepen/quadrature.hpp"

namespace kylepen {

// Two-point law Pi({1}) = p = 1 - Pi({0}). The fixed point is explicit up to
// one scalar a in (0, 1/p):
//   exp(phi/chat) = a p exp(y/chat) + 1 - a p,
//   psi(1) = -chat log a,  psi(0) = -chat log((1 - a p)/(1 - p)).
struct BernoulliModel {
  double p = 0.5;
  double a = 1.0;
  ModelParams params;
};

// Root of 1 = E[ e^{Y/chat} / (p (e^{Y/chat} - 1) + 1/a) ], Y ~ N(0, sigma^2).
// The right side is increasing in a from 0 to 1/p, so the root is unique.
// p = 1 is allowed as a boundary case (a = 1 exactly).
double solve_a(double p, const ModelParams& params, const QuadratureRule& quad);

BernoulliModel make_bernoulli(double p, const ModelParams& params, int quad_order = 120);

// Closed-form phi, evaluated stably for large |y|.
double bernoulli_phi(const BernoulliModel& model, double y);
double bernoulli_phi_deriv(const BernoulliModel& model, double y);
double bernoulli_psi0(const BernoulliModel& model);
double bernoulli_psi1(const BernoulliModel& model);

// The pair with phi tabulated on the standard grid (exact derivative tail
// slopes) and psi at the two atoms.
ConvexPair bernoulli_pair(const BernoulliModel& model, int grid_points = 1601,
                          double grid_halfwidth = 8.0);

}  // namespace kylepen
