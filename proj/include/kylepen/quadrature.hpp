#pragma once

#include <cstddef>
#include <vector>

namespace kylepen {

enum class QuadratureKind { GaussHermite, DiscreteAtoms };

// Nodes and weights in probabilist normalization: weights are positive, sum
// to 1, and for GaussHermite(n) the rule integrates polynomials of degree
// <= 2n-1 exactly against the N(0, sigma^2) density.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  QuadratureKind kind = QuadratureKind::GaussHermite;

  std::size_t size() const { return nodes.size(); }

  template <class F>
  double integrate(F&& f) const {
    double acc = 0.0, comp = 0.0;  // Kahan
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double term = weights[i] * f(nodes[i]) - comp;
      const double next = acc + term;
      comp = (next - acc) - term;
      acc = next;
    }
    return acc;
  }
};

// Gauss-Hermite rule mapped to the N(0, sigma^2) weight. n >= 2.
QuadratureRule gauss_hermite(int n, double sigma);

// Wraps explicit atoms (e.g. a discrete law) as a rule; weights must be
// positive and sum to 1 within 1e-12.
QuadratureRule discrete_rule(std::vector<double> nodes, std::vector<double> weights);

}  // namespace kylepen
