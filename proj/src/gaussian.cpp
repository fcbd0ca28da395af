#include "kylepen/gaussian.hpp"

#include <cmath>
#include <functional>
#include <string>

#include "kylepen/errors.hpp"

namespace kylepen {

namespace {

void check_positive(double x, const char* name) {
  if (!(x > 0.0) || !std::isfinite(x))
    throw InvalidArgument(std::string(name) + " must be positive and finite");
}

double bisect(double lo, double hi, const std::function<double(double)>& f, double tol) {
  double flo = f(lo);
  for (int it = 0; it < 400 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((flo <= 0.0) == (fm <= 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

double lambda_star(double c, double sigma, double gamma) {
  check_positive(c, "c");
  check_positive(sigma, "sigma");
  check_positive(gamma, "gamma");
  // Positive root of sigma^2 l^2 + c sigma^2 l - gamma^2 = 0, written to
  // avoid cancellation when c dominates.
  const double r = gamma / sigma;
  return 2.0 * r * r / (c + std::sqrt(c * c + 4.0 * r * r));
}

double Lambda(double kappa) {
  if (kappa < 0.0 || !std::isfinite(kappa)) throw InvalidArgument("Lambda: kappa must be >= 0");
  return 2.0 / (std::sqrt(kappa * kappa + 4.0) + kappa);
}

double Lambda_prime(double kappa) {
  const double L = Lambda(kappa);
  return -L * L / (1.0 + L * L);
}

GaussianModel GaussianModel::from_c(double mu, double gamma, double sigma, double c) {
  check_positive(gamma, "gamma");
  check_positive(sigma, "sigma");
  check_positive(c, "c");
  GaussianModel m;
  m.mu = mu;
  m.gamma = gamma;
  m.sigma = sigma;
  m.c = c;
  m.kappa_rate = c * sigma / gamma;
  m.lambda_star = kylepen::lambda_star(c, sigma, gamma);
  return m;
}

GaussianModel GaussianModel::from_kappa(double kappa, double gamma, double sigma, double mu) {
  check_positive(kappa, "kappa");
  return from_c(mu, gamma, sigma, kappa * gamma / sigma);
}

ConvexPair gaussian_pair(const GaussianModel& m) {
  const double chat = m.c * m.sigma * m.sigma;
  QuadraticPsi psi;
  psi.offset = 0.5 * chat * std::log(m.c / (m.c + m.lambda_star));
  psi.center = m.mu;
  psi.denom = m.c + m.lambda_star;
  return ConvexPair{PhiFunction(m.lambda_star, m.mu), PsiFunction(psi)};
}

GaussianSummary gaussian_summary(const GaussianModel& m) {
  GaussianSummary s;
  const double k = m.kappa_rate;
  const double L = m.Lambda();
  const double gs = m.gamma * m.sigma;
  const double log_kL = std::log1p(-L * L);  // kappa Lambda = 1 - Lambda^2
  s.lambda_star = m.lambda_star;
  s.Lambda = L;
  s.Lambda_prime = Lambda_prime(k);
  s.insider_wealth_exante = 0.5 * gs * (k * log_kL + 2.0 * L);
  s.expected_penalty = -0.5 * gs * k * log_kL;
  s.welfare = 0.5 * gs * k * log_kL;
  s.noise_loss = L * gs;
  s.inefficiency_delta = k * L * m.gamma * m.gamma;
  s.liquidity_gain_L = 1.0 / L - 1.0;
  s.avg_entropy = -0.5 * log_kL;
  return s;
}

double speed_of_mean_reversion(double t, double kappa) {
  if (!(t >= 0.0 && t <= 1.0)) throw InvalidArgument("speed_of_mean_reversion: t in [0,1]");
  const double L = Lambda(kappa);
  return L / (1.0 - t * L * L);
}

double gaussian_rho(const GaussianModel& m, double t, double y, double v) {
  if (!(t >= 0.0 && t <= 1.0)) throw InvalidArgument("gaussian_rho: t in [0,1]");
  const double L = m.Lambda();
  const double g2 = m.gamma * m.gamma;
  const double shrink = 1.0 - t * L * L;
  const double dpost = v - m.lambda_star * y - m.mu;
  const double dprior = v - m.mu;
  return std::exp(-0.5 * (dpost * dpost / shrink - dprior * dprior) / g2) /
         std::sqrt(shrink);
}

double conditional_variance(const GaussianModel& m, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw InvalidArgument("conditional_variance: t in [0,1]");
  const double L = m.Lambda();
  const double g2 = m.gamma * m.gamma;
  return g2 * (1.0 - t) + t * m.kappa_rate * L * g2;
}

double penalty_inflection_kappa0() {
  // (1 + Lambda^2)^2 / kappa decreases from infinity to 0; single root at 4.
  auto f = [](double k) {
    const double L = Lambda(k);
    const double u = 1.0 + L * L;
    return u * u / k - 4.0;
  };
  return bisect(1e-8, 100.0, f, 1e-12);
}

double penalty_argmax_kappa() {
  // P'(kappa) = gamma sigma [ -L^2/(1+L^2) - (1/2) log(1-L^2) ], decreasing
  // through zero once.
  auto dP = [](double k) {
    const double L = Lambda(k);
    return -L * L / (1.0 + L * L) - 0.5 * std::log1p(-L * L);
  };
  return bisect(1e-8, 100.0, dP, 1e-12);
}

}  // namespace kylepen
