#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "kylepen/quadrature.hpp"

namespace kylepen {

// Market primitives. chat = c * sigma^2 is derived in the constructor and
// never stored independently of (c, sigma).
struct ModelParams {
  double sigma = 1.0;   // noise-trader volatility
  double c = 1.0;       // rate of the quadratic penalty
  double chat = 1.0;    // c * sigma^2
  double mu_bar = 0.0;  // mean of V, used for centering

  ModelParams() = default;
  ModelParams(double sigma_, double c_, double mu_bar_ = 0.0);
};

// Law of the fundamental value V. Three carriers: explicit atoms, Gaussian,
// or a monotone quantile map V = f(eta) with eta standard normal.
class ValueDistribution {
 public:
  struct Discrete {
    std::vector<double> values;  // ascending, distinct
    std::vector<double> probs;   // positive, sum 1 within 1e-12
  };
  struct Gaussian {
    double mu;
    double gamma;  // > 0
  };
  struct QuantileMap {
    std::function<double(double)> f;  // non-decreasing
    int n_base_nodes;
  };

  static ValueDistribution discrete(std::vector<std::pair<double, double>> atoms);
  static ValueDistribution gaussian(double mu, double gamma);
  static ValueDistribution quantile_map(std::function<double(double)> f, int n_base_nodes,
                                        std::optional<double> support_bound = std::nullopt);
  static ValueDistribution point_mass(double v) { return discrete({{v, 1.0}}); }

  bool is_discrete() const { return std::holds_alternative<Discrete>(law_); }
  bool is_gaussian() const { return std::holds_alternative<Gaussian>(law_); }
  bool is_quantile_map() const { return std::holds_alternative<QuantileMap>(law_); }
  const Discrete* as_discrete() const { return std::get_if<Discrete>(&law_); }
  const Gaussian* as_gaussian() const { return std::get_if<Gaussian>(&law_); }

  double mean() const;
  double variance() const;

  // sup|v| for bounded carriers, nullopt for Gaussian.
  std::optional<double> support_bound() const { return support_bound_; }
  bool bounded() const { return support_bound_.has_value(); }

  // Moment generating function E[exp(rV)]. Exact for Discrete, closed form
  // for Gaussian, Gauss-Hermite for QuantileMap. Throws NumericalError when
  // exp would overflow, naming the offending r.
  double mgf(double r) const;

  // Atomized view used by the integral operators: the atoms themselves for
  // Discrete, a Gauss-Hermite discretization otherwise. `order` is ignored
  // for Discrete and overridden by n_base_nodes for QuantileMap.
  QuadratureRule atoms(int order) const;

 private:
  ValueDistribution() = default;
  std::variant<Discrete, Gaussian, QuantileMap> law_;
  std::optional<double> support_bound_;
};

}  // namespace kylepen
