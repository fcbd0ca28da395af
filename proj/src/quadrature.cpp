#include "kylepen/quadrature.hpp"

#include <cmath>
#include <cstddef>
#include <utility>

#include "kylepen/errors.hpp"

namespace kylepen {

namespace {

// Orthonormal Hermite value and derivative scale at z (physicists' weight).
void hermite_eval(int n, double z, double* value, double* deriv) {
  const double pim4 = 0.7511255444649425;  // pi^{-1/4}
  double p1 = pim4, p2 = 0.0;
  for (int j = 1; j <= n; ++j) {
    const double p3 = p2;
    p2 = p1;
    p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
  }
  *value = p1;
  *deriv = std::sqrt(2.0 * n) * p2;
}

// Hermite nodes/weights for the physicists' weight exp(-x^2). The largest
// root comes from Newton started beyond the band edge sqrt(2n+1), where the
// polynomial is convex and the iteration is monotone; each further root is
// bracketed by a sign-change march below the previous one and bisected.
// Slower than tuned initial guesses but correct at any order; rules are
// computed once and cached by callers.
void hermite_rule(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const int m = (n + 1) / 2;
  const double band = 2.0 * n + 1.0;

  auto newton = [&](double z) {
    double value = 0.0, deriv = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      hermite_eval(n, z, &value, &deriv);
      const double dz = value / deriv;
      z -= dz;
      if (std::abs(dz) < 1e-15 * (1.0 + std::abs(z))) break;
    }
    return z;
  };
  auto bisect_below = [&](double upper) {
    // March down in fractions of the local WKB spacing until the sign
    // flips, then bisect. The next root sits within a couple of spacings.
    const double step =
        0.5 * M_PI / std::sqrt(std::max(band - upper * upper, 1.0));
    double hi = upper - 1e-9 * (1.0 + upper);
    double vhi, vlo, d;
    hermite_eval(n, hi, &vhi, &d);
    double lo = hi;
    do {
      hi = lo;
      lo -= step;
      if (lo < -step) throw NumericalError("gauss_hermite: lost root bracket");
      hermite_eval(n, lo, &vlo, &d);
      hermite_eval(n, hi, &vhi, &d);
    } while ((vlo > 0.0) == (vhi > 0.0));
    while (hi - lo > 1e-15 * (1.0 + std::abs(hi))) {
      const double mid = 0.5 * (lo + hi);
      double vm;
      hermite_eval(n, mid, &vm, &d);
      if ((vm > 0.0) == (vlo > 0.0)) {
        lo = mid;
        vlo = vm;
      } else {
        hi = mid;
      }
    }
    return newton(0.5 * (lo + hi));
  };

  for (int i = 0; i < m; ++i) {
    const double z = (i == 0) ? newton(std::sqrt(band)) : bisect_below(x[i - 1]);
    if (i > 0 && !(z < x[i - 1] && z > -1e-8))
      throw NumericalError("gauss_hermite: node ordering lost at order " +
                           std::to_string(n));
    double value = 0.0, deriv = 0.0;
    hermite_eval(n, z, &value, &deriv);
    x[i] = z;                    // descending from the largest root
    x[n - 1 - i] = -z;
    w[i] = 2.0 / (deriv * deriv);
    w[n - 1 - i] = w[i];
  }
}

}  // namespace

QuadratureRule gauss_hermite(int n, double sigma) {
  if (n < 2) throw InvalidArgument("gauss_hermite: order must be >= 2");
  if (n > 500) throw InvalidArgument("gauss_hermite: order capped at 500");
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw InvalidArgument("gauss_hermite: sigma must be positive");

  std::vector<double> x, w;
  hermite_rule(n, x, w);

  QuadratureRule rule;
  rule.kind = QuadratureKind::GaussHermite;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double scale = std::sqrt(2.0) * sigma;
  const double inv_sqrt_pi = 0.5641895835477563;
  // Reverse so nodes come out ascending.
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = scale * x[n - 1 - i];
    rule.weights[i] = w[n - 1 - i] * inv_sqrt_pi;
  }
  return rule;
}

QuadratureRule discrete_rule(std::vector<double> nodes, std::vector<double> weights) {
  if (nodes.size() != weights.size() || nodes.empty())
    throw InvalidArgument("discrete_rule: nodes/weights size mismatch");
  double total = 0.0;
  for (double wi : weights) {
    if (!(wi > 0.0)) throw InvalidArgument("discrete_rule: weights must be positive");
    total += wi;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw InvalidArgument("discrete_rule: weights must sum to 1 within 1e-12");
  QuadratureRule rule;
  rule.kind = QuadratureKind::DiscreteAtoms;
  rule.nodes = std::move(nodes);
  rule.weights = std::move(weights);
  return rule;
}

}  // namespace kylepen
