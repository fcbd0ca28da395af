#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "kylepen/convex_pair.hpp"
#include "kylepen/model.hpp"
#include "kylepen/quadrature.hpp"

namespace kylepen {

struct FixedPointOptions {
  double tol = 1e-10;        // sup-norm stopping tolerance on the grid
  int max_iter = 10000;
  double damping = 1.0;      // phi <- (1-d) phi + d T phi
  int quad_order = 120;
  int grid_points = 1601;        // uniform grid on [-hw*sigma, hw*sigma]
  double grid_halfwidth = 8.0;   // in units of sigma
  bool probe_uniqueness = true;  // second run from phi = y*mean(V)
};

struct FixedPointReport {
  explicit FixedPointReport(ConvexPair p) : pair(std::move(p)) {}

  ConvexPair pair;
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> residual_history;

  // Psi envelope diagnostics at the atoms. lower = -E[phi(sigma B_1)];
  // the two upper candidates are (v-phi'(0))^2/(2 c^2 sigma^2) and
  // (v-phi'(0))^2/(2c). Both are recorded together with which held.
  std::vector<double> psi_lower;
  std::vector<double> psi_upper_sq_rate;   // (v-h0)^2 / (2 c^2 sigma^2)
  std::vector<double> psi_upper_lin_rate;  // (v-h0)^2 / (2 c)
  bool psi_lower_ok = true;
  bool psi_upper_sq_rate_ok = true;
  bool psi_upper_lin_rate_ok = true;
  bool bounds_warning = false;  // psi left the [lower, max(upper)] envelope

  // Least-squares fit of a*y^2/2 + b*y to the converged grid.
  double lambda_fit = 0.0;
  double slope_fit = 0.0;

  // Set when a second run from phi = y*mean(V) lands > 10*tol away.
  bool nonunique_flag = false;
  double alt_deviation = 0.0;
};

// Psi(v) = chat * log T1(phi)(v), the Gaussian-integral operator. For grid
// phi the stationary point of the integrand must fall inside the grid
// (v within [s- + c*y_min, s+ + c*y_max]); outside, the value would be
// driven by tail extrapolation and a DomainError is raised naming v and
// the tail slopes. Quadratic phi evaluates in closed form.
double apply_T1(const PhiFunction& phi, const ModelParams& params,
                const QuadratureRule& quad, double v);

// chat * log T2(psi)(y), un-normalized. Exact weighted sum for tabulated
// psi; closed form for the quadratic psi under Gaussian Pi; Gauss-Hermite
// atomization otherwise.
double apply_T2(const PsiFunction& psi, const ValueDistribution& dist,
                const ModelParams& params, double y, int quad_order = 120);

// One application of the normalized map T: phi -> chat log [T2(T1 phi) /
// T2(T1 phi)(0)], tabulated on phi's grid. Tail slopes of the result are
// the posterior means of v at the grid ends.
GridFunction apply_T(const GridFunction& phi, const ValueDistribution& dist,
                     const ModelParams& params, const QuadratureRule& quad);

// Iterates T from phi = 0 until the sup-norm residual drops below tol.
// Throws NonConvergence (with the residual trace) past max_iter and
// propagates domain-membership failures.
FixedPointReport solve_fixed_point(const ValueDistribution& dist, const ModelParams& params,
                                   const FixedPointOptions& opts = {});

// Consistency of a pair against both fixed-point identities: max over atoms
// of |chat log T1(phi) - psi| and over grid samples of |chat log T2(psi) -
// phi|. Small iff the pair is a genuine joint solution.
double pair_identity_deviation(const ConvexPair& pair, const ValueDistribution& dist,
                               const ModelParams& params, int quad_order = 120);

}  // namespace kylepen
