#include "kylepen/bernoulli.hpp"

#include <cmath>
#include <string>

#include "kylepen/errors.hpp"

namespace kylepen {

namespace {

// E[ e^{Y/chat} / (p (e^{Y/chat} - 1) + 1/a) ]; bounded by 1/(a p) so no
// exponent shifting is needed. Written via e^{-|u|} to stay finite for
// large positive nodes.
double rhs(double a, double p, const ModelParams& prm, const QuadratureRule& quad) {
  return quad.integrate([&](double y) {
    const double u = y / prm.chat;
    if (u > 0.0) {
      const double e = std::exp(-u);
      return 1.0 / (p * (1.0 - e) + e / a);
    }
    const double e = std::exp(u);
    return e / (p * (e - 1.0) + 1.0 / a);
  });
}

}  // namespace

double solve_a(double p, const ModelParams& params, const QuadratureRule& quad) {
  if (!(p > 0.0 && p <= 1.0)) throw InvalidArgument("solve_a: p must lie in (0, 1]");
  if (quad.size() < 60) throw InvalidArgument("solve_a: quadrature order must be >= 60");
  if (p == 1.0) return 1.0;

  auto f = [&](double a) { return rhs(a, p, params, quad) - 1.0; };

  // Monotone in a: bisection bracketed in (0, 1/p), then secant refinement.
  double lo = 1e-12, hi = (1.0 - 1e-12) / p;
  if (f(lo) > 0.0 || f(hi) < 0.0)
    throw NumericalError("solve_a: root not bracketed in (0, 1/p)");
  for (int it = 0; it < 200 && hi - lo > 1e-12 * (1.0 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  double a = 0.5 * (lo + hi);
  double fa = f(a);
  double a_prev = lo, f_prev = f(lo);
  for (int it = 0; it < 8 && std::abs(fa) > 1e-15; ++it) {
    const double denom = fa - f_prev;
    if (denom == 0.0) break;
    const double next = a - fa * (a - a_prev) / denom;
    if (!(next > 0.0 && next < 1.0 / p)) break;
    a_prev = a;
    f_prev = fa;
    a = next;
    fa = f(a);
  }
  return a;
}

BernoulliModel make_bernoulli(double p, const ModelParams& params, int quad_order) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("make_bernoulli: p must lie in (0, 1)");
  const QuadratureRule quad = gauss_hermite(quad_order, params.sigma);
  BernoulliModel m;
  m.p = p;
  m.params = params;
  m.a = solve_a(p, params, quad);
  return m;
}

double bernoulli_phi(const BernoulliModel& m, double y) {
  const double ap = m.a * m.p;
  const double u = y / m.params.chat;
  // chat log(ap e^u + 1 - ap), branch on the sign of u for stability.
  if (u > 0.0) return y + m.params.chat * std::log(ap + (1.0 - ap) * std::exp(-u));
  return m.params.chat * std::log1p(ap * std::expm1(u));
}

double bernoulli_phi_deriv(const BernoulliModel& m, double y) {
  const double ap = m.a * m.p;
  const double u = y / m.params.chat;
  if (u > 0.0) {
    const double e = std::exp(-u);
    return ap / (ap + (1.0 - ap) * e);
  }
  const double e = std::exp(u);
  return ap * e / (ap * e + 1.0 - ap);
}

double bernoulli_psi1(const BernoulliModel& m) { return -m.params.chat * std::log(m.a); }

double bernoulli_psi0(const BernoulliModel& m) {
  return -m.params.chat * std::log((1.0 - m.a * m.p) / (1.0 - m.p));
}

ConvexPair bernoulli_pair(const BernoulliModel& m, int grid_points, double grid_halfwidth) {
  const double w = grid_halfwidth * m.params.sigma;
  GridFunction phi = GridFunction::tabulate(
      [&](double y) { return bernoulli_phi(m, y); }, -w, w, grid_points,
      bernoulli_phi_deriv(m, -w), bernoulli_phi_deriv(m, w));
  PsiFunction psi({0.0, 1.0}, {bernoulli_psi0(m), bernoulli_psi1(m)}, {1.0 - m.p, m.p});
  return ConvexPair{PhiFunction(std::move(phi)), std::move(psi)};
}

}  // namespace kylepen
