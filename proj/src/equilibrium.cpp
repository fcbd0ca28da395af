#include "kylepen/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "kylepen/errors.hpp"
#include "kylepen/fixed_point.hpp"

namespace kylepen {

namespace {

constexpr double kTerminalBand = 1e-6;  // t >= 1 - band uses the exact terminal form

void check_t(double t, const char* who) {
  if (!(t >= 0.0 && t <= 1.0)) throw InvalidArgument(std::string(who) + ": t must lie in [0,1]");
}

}  // namespace

EquilibriumModel::EquilibriumModel(ConvexPair pair, ValueDistribution dist,
                                   ModelParams params, int quad_order, double fp_tol)
    : pair_(std::move(pair)), dist_(std::move(dist)), params_(params),
      quad_order_(quad_order), unit_(gauss_hermite(quad_order, 1.0)) {
  if (pair_.psi.is_quadratic()) {
    const QuadratureRule atoms = dist_.atoms(quad_order_);
    atom_v_ = atoms.nodes;
    atom_w_ = atoms.weights;
    atom_psi_.resize(atom_v_.size());
    for (std::size_t i = 0; i < atom_v_.size(); ++i)
      atom_psi_[i] = pair_.psi.value(atom_v_[i]);
  } else {
    atom_v_ = pair_.psi.atom_values();
    atom_w_ = pair_.psi.weights();
    atom_psi_ = pair_.psi.values();
  }
  if (fp_tol > 0.0) {
    const double dev = pair_identity_deviation(pair_, dist_, params_, quad_order_);
    if (dev > fp_tol)
      throw InvalidArgument("EquilibriumModel: pair fails the fixed-point residual check (" +
                            std::to_string(dev) + " > " + std::to_string(fp_tol) + ")");
  }
}

double log_rho_star(const EquilibriumModel& em, double t, double y, double v) {
  check_t(t, "rho_star");
  const ModelParams& p = em.params();
  const double psi_v = em.pair().psi.value(v);
  if (t >= 1.0 - kTerminalBand)
    return (y * v - psi_v - em.pair().phi.smooth(y)) / p.chat;
  const double s = p.sigma * std::sqrt(1.0 - t);
  const QuadratureRule& u = em.unit_rule();
  double m = -std::numeric_limits<double>::infinity();
  std::vector<double> expo(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double x = y + s * u.nodes[j];
    expo[j] = (x * v - em.pair().phi.smooth(x)) / p.chat;
    m = std::max(m, expo[j]);
  }
  double acc = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j)
    acc += u.weights[j] * std::exp(expo[j] - m);
  const double out = m + std::log(acc) - psi_v / p.chat;
  if (!std::isfinite(out))
    throw DomainError("rho_star: quadrature overflow at (t,y,v)=(" + std::to_string(t) +
                      "," + std::to_string(y) + "," + std::to_string(v) + ")");
  return out;
}

double rho_star(const EquilibriumModel& em, double t, double y, double v) {
  return std::exp(log_rho_star(em, t, y, v));
}

void log_rho_star_atoms(const EquilibriumModel& em, double t, double y,
                        std::vector<double>& out) {
  check_t(t, "rho_star");
  const ModelParams& p = em.params();
  const std::size_t na = em.atom_v().size();
  out.resize(na);
  if (t >= 1.0 - kTerminalBand) {
    const double phi_y = em.pair().phi.smooth(y);
    for (std::size_t i = 0; i < na; ++i)
      out[i] = (y * em.atom_v()[i] - em.atom_psi()[i] - phi_y) / p.chat;
    return;
  }
  const double s = p.sigma * std::sqrt(1.0 - t);
  const QuadratureRule& u = em.unit_rule();
  const std::size_t nq = u.size();
  std::vector<double> x(nq), phior(nq);
  for (std::size_t j = 0; j < nq; ++j) {
    x[j] = y + s * u.nodes[j];
    phior[j] = em.pair().phi.smooth(x[j]) / p.chat;
  }
  std::vector<double> expo(nq);
  for (std::size_t i = 0; i < na; ++i) {
    const double vi = em.atom_v()[i];
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < nq; ++j) {
      expo[j] = x[j] * vi / p.chat - phior[j];
      m = std::max(m, expo[j]);
    }
    double acc = 0.0;
    for (std::size_t j = 0; j < nq; ++j) acc += u.weights[j] * std::exp(expo[j] - m);
    out[i] = m + std::log(acc) - em.atom_psi()[i] / p.chat;
  }
}

std::pair<double, double> rho_star_bounds(const EquilibriumModel& em, double t, double y,
                                          double v) {
  check_t(t, "rho_star_bounds");
  const ModelParams& p = em.params();
  const double psi_v = em.pair().psi.value(v);
  const double h0 = em.pair().phi.eval(0.0, 1);
  const double s2 = p.sigma * p.sigma * (1.0 - t);
  const double d = v - h0;
  const double upper =
      std::exp(-psi_v / p.chat + y * d / p.chat + s2 * d * d / (2.0 * p.chat * p.chat));
  const double s = p.sigma * std::sqrt(1.0 - t);
  double e_phi = 0.0;
  const QuadratureRule& u = em.unit_rule();
  for (std::size_t j = 0; j < u.size(); ++j)
    e_phi += u.weights[j] * em.pair().phi.smooth(y + s * u.nodes[j]);
  const double lower = std::exp((v * y - psi_v - e_phi) / p.chat);
  return {lower, upper};
}

double pricing_rule_H(const EquilibriumModel& em, double t, double y) {
  std::vector<double> lr;
  log_rho_star_atoms(em, t, y, lr);
  double num = 0.0;
  for (std::size_t i = 0; i < lr.size(); ++i)
    num += em.atom_w()[i] * em.atom_v()[i] * std::exp(lr[i]);
  return num;
}

double rho_normalization(const EquilibriumModel& em, double t, double y) {
  std::vector<double> lr;
  log_rho_star_atoms(em, t, y, lr);
  double acc = 0.0;
  for (std::size_t i = 0; i < lr.size(); ++i) acc += em.atom_w()[i] * std::exp(lr[i]);
  return acc;
}

double alpha_star(const EquilibriumModel& em, double t, double y, double v) {
  if (!(t >= 0.0 && t < 1.0))
    throw InvalidArgument("alpha_star: strategy is defined on t in [0,1)");
  const ModelParams& p = em.params();
  if (t >= 1.0 - kTerminalBand)
    return (v - em.pair().phi.smooth_deriv(y)) / p.c;
  const double s = p.sigma * std::sqrt(1.0 - t);
  const QuadratureRule& u = em.unit_rule();
  double m = -std::numeric_limits<double>::infinity();
  std::vector<double> expo(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double x = y + s * u.nodes[j];
    expo[j] = (x * v - em.pair().phi.smooth(x)) / p.chat;
    m = std::max(m, expo[j]);
  }
  double acc = 0.0, accz = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double e = u.weights[j] * std::exp(expo[j] - m);
    acc += e;
    accz += e * u.nodes[j];
  }
  // rho_y/rho = E[zeta]/s for the N(y, s^2) kernel differentiated in y.
  return p.sigma * p.sigma * accz / (s * acc);
}

double drift_projection(const EquilibriumModel& em, double t, double y) {
  double acc = 0.0;
  std::vector<double> lr;
  log_rho_star_atoms(em, t, y, lr);
  for (std::size_t i = 0; i < lr.size(); ++i)
    acc += em.atom_w()[i] * std::exp(lr[i]) * alpha_star(em, t, y, em.atom_v()[i]);
  return acc;
}

double insider_value(const EquilibriumModel& em, double v) {
  const ModelParams& p = em.params();
  const QuadratureRule& u = em.unit_rule();
  double e_phi = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j)
    e_phi += u.weights[j] * em.pair().phi.smooth(p.sigma * u.nodes[j]);
  return em.pair().psi.value(v) + e_phi;
}

namespace {

// Moments of the tilted terminal law: density prop. to exp((vx -
// phi(x))/chat) against N(0, sigma^2). Returns E[g(x)] for g = x and
// g = phi(x) in one pass.
void tilted_terminal_moments(const EquilibriumModel& em, double v, double* mean_x,
                             double* mean_phi) {
  const ModelParams& p = em.params();
  const QuadratureRule& u = em.unit_rule();
  double m = -std::numeric_limits<double>::infinity();
  std::vector<double> expo(u.size()), phix(u.size()), xs(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) {
    xs[j] = p.sigma * u.nodes[j];
    phix[j] = em.pair().phi.smooth(xs[j]);
    expo[j] = (xs[j] * v - phix[j]) / p.chat;
    m = std::max(m, expo[j]);
  }
  double acc = 0.0, acc_x = 0.0, acc_phi = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double e = u.weights[j] * std::exp(expo[j] - m);
    acc += e;
    acc_x += e * xs[j];
    acc_phi += e * phix[j];
  }
  if (mean_x) *mean_x = acc_x / acc;
  if (mean_phi) *mean_phi = acc_phi / acc;
}

}  // namespace

double psi_prime(const EquilibriumModel& em, double v) {
  double mean_x = 0.0;
  tilted_terminal_moments(em, v, &mean_x, nullptr);
  return mean_x;
}

double expected_penalty_per_v(const EquilibriumModel& em, double v) {
  double mean_x = 0.0, mean_phi = 0.0;
  tilted_terminal_moments(em, v, &mean_x, &mean_phi);
  return v * mean_x - em.pair().psi.value(v) - mean_phi;
}

double noise_loss(const EquilibriumModel& em) {
  const ModelParams& p = em.params();
  const QuadratureRule& u = em.unit_rule();
  double e = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j)
    e += u.weights[j] * em.pair().phi.eval(p.sigma * u.nodes[j], 2);
  return p.sigma * p.sigma * e;
}

double price_inefficiency(const EquilibriumModel& em) {
  return em.params().c * noise_loss(em);
}

double conditional_variance(const EquilibriumModel& em, double t, double y) {
  check_t(t, "conditional_variance");
  if (!em.dist().bounded() && !em.dist().is_gaussian())
    throw InvalidArgument(
        "conditional_variance: requires bounded support or Gaussian V");
  const ModelParams& p = em.params();
  const double s = p.sigma * std::sqrt(1.0 - t);
  const QuadratureRule& u = em.unit_rule();
  double e = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double x = y + s * u.nodes[j];
    const double h = em.pair().phi.smooth_deriv(x);
    e += u.weights[j] * (p.chat * em.pair().phi.eval(x, 2) + h * h);
  }
  const double H = pricing_rule_H(em, t, y);
  return e - H * H;
}

double value_function_J(const EquilibriumModel& em, double t, double y, double v) {
  check_t(t, "value_function_J");
  const ModelParams& p = em.params();
  const double s = p.sigma * std::sqrt(1.0 - t);
  const QuadratureRule& u = em.unit_rule();
  double e_phi = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j)
    e_phi += u.weights[j] * em.pair().phi.smooth(y + s * u.nodes[j]);
  return em.pair().psi.value(v) - y * v + e_phi +
         p.chat * log_rho_star(em, t, y, v);
}

}  // namespace kylepen
