#include "kylepen/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kylepen/errors.hpp"

namespace kylepen {

ModelParams::ModelParams(double sigma_, double c_, double mu_bar_)
    : sigma(sigma_), c(c_), chat(c_ * sigma_ * sigma_), mu_bar(mu_bar_) {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw InvalidArgument("ModelParams: sigma must be positive");
  if (!(c > 0.0) || !std::isfinite(c))
    throw InvalidArgument("ModelParams: c must be positive");
  if (!std::isfinite(mu_bar)) throw InvalidArgument("ModelParams: mu_bar not finite");
}

ValueDistribution ValueDistribution::discrete(std::vector<std::pair<double, double>> atoms) {
  if (atoms.empty()) throw InvalidArgument("discrete: no atoms");
  std::sort(atoms.begin(), atoms.end());
  Discrete d;
  double total = 0.0;
  for (const auto& [v, p] : atoms) {
    if (!std::isfinite(v)) throw InvalidArgument("discrete: atom value not finite");
    if (!(p > 0.0)) throw InvalidArgument("discrete: atom probabilities must be positive");
    if (!d.values.empty() && v <= d.values.back())
      throw InvalidArgument("discrete: atom values must be distinct");
    d.values.push_back(v);
    d.probs.push_back(p);
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw InvalidArgument("discrete: probabilities must sum to 1 within 1e-12");

  ValueDistribution dist;
  double bound = 0.0;
  for (double v : d.values) bound = std::max(bound, std::abs(v));
  dist.support_bound_ = bound;
  dist.law_ = std::move(d);
  return dist;
}

ValueDistribution ValueDistribution::gaussian(double mu, double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma) || !std::isfinite(mu))
    throw InvalidArgument("gaussian: need finite mu and gamma > 0");
  ValueDistribution dist;
  dist.law_ = Gaussian{mu, gamma};
  return dist;
}

ValueDistribution ValueDistribution::quantile_map(std::function<double(double)> f,
                                                  int n_base_nodes,
                                                  std::optional<double> support_bound) {
  if (!f) throw InvalidArgument("quantile_map: empty function");
  if (n_base_nodes < 2) throw InvalidArgument("quantile_map: n_base_nodes must be >= 2");
  // Monotonicity checked on the sampled base nodes.
  const QuadratureRule base = gauss_hermite(n_base_nodes, 1.0);
  double prev = f(base.nodes.front());
  double max_abs = std::abs(prev);
  for (std::size_t i = 1; i < base.size(); ++i) {
    const double vi = f(base.nodes[i]);
    if (!(vi >= prev))
      throw InvalidArgument("quantile_map: f must be non-decreasing on base nodes");
    prev = vi;
    max_abs = std::max(max_abs, std::abs(vi));
  }
  ValueDistribution dist;
  dist.support_bound_ = support_bound.has_value() ? support_bound
                                                  : std::optional<double>(max_abs);
  dist.law_ = QuantileMap{std::move(f), n_base_nodes};
  return dist;
}

double ValueDistribution::mean() const {
  if (const auto* d = as_discrete()) {
    double m = 0.0;
    for (std::size_t i = 0; i < d->values.size(); ++i) m += d->probs[i] * d->values[i];
    return m;
  }
  if (const auto* g = as_gaussian()) return g->mu;
  const auto& q = std::get<QuantileMap>(law_);
  return atoms(q.n_base_nodes).integrate([](double v) { return v; });
}

double ValueDistribution::variance() const {
  const double m = mean();
  if (const auto* d = as_discrete()) {
    double s = 0.0;
    for (std::size_t i = 0; i < d->values.size(); ++i) {
      const double dv = d->values[i] - m;
      s += d->probs[i] * dv * dv;
    }
    return s;
  }
  if (const auto* g = as_gaussian()) return g->gamma * g->gamma;
  const auto& q = std::get<QuantileMap>(law_);
  return atoms(q.n_base_nodes).integrate([m](double v) { return (v - m) * (v - m); });
}

double ValueDistribution::mgf(double r) const {
  if (!std::isfinite(r)) throw InvalidArgument("mgf: r must be finite");
  constexpr double kExpMax = 700.0;  // exp overflows just above 709
  if (const auto* g = as_gaussian()) {
    const double expo = r * g->mu + 0.5 * r * r * g->gamma * g->gamma;
    if (expo > kExpMax)
      throw NumericalError("mgf overflow at r=" + std::to_string(r));
    return std::exp(expo);
  }
  const QuadratureRule rule =
      is_discrete() ? atoms(0) : atoms(std::get<QuantileMap>(law_).n_base_nodes);
  double max_expo = 0.0;
  for (double v : rule.nodes) max_expo = std::max(max_expo, r * v);
  if (max_expo > kExpMax)
    throw NumericalError("mgf overflow at r=" + std::to_string(r));
  return rule.integrate([r](double v) { return std::exp(r * v); });
}

QuadratureRule ValueDistribution::atoms(int order) const {
  if (const auto* d = as_discrete()) return discrete_rule(d->values, d->probs);
  if (const auto* g = as_gaussian()) {
    QuadratureRule rule = gauss_hermite(order, g->gamma);
    for (double& v : rule.nodes) v += g->mu;
    return rule;
  }
  const auto& q = std::get<QuantileMap>(law_);
  QuadratureRule rule = gauss_hermite(q.n_base_nodes, 1.0);
  for (double& v : rule.nodes) v = q.f(v);
  rule.kind = QuadratureKind::DiscreteAtoms;
  return rule;
}

}  // namespace kylepen
