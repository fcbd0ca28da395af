#include "kylepen/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "kylepen/errors.hpp"

namespace kylepen {

namespace {

constexpr int kBrownianBase = 1600;  // common-refinement substep count

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 path_stream(std::uint64_t seed, std::uint64_t path_index) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(path_index + 1)));
}

// Drift/price evaluation strategy. Gaussian closed-form pairs evaluate
// analytically; grid pairs are tabulated per distinct v on a (step, y)
// lattice and interpolated linearly in y.
class Dynamics {
 public:
  Dynamics(const EquilibriumModel& em, int n_steps, const std::vector<double>& vs)
      : em_(em), n_steps_(n_steps) {
    const ConvexPair& pair = em.pair();
    if (pair.phi.is_quadratic() && em.dist().is_gaussian()) {
      analytic_ = true;
      const auto* g = em.dist().as_gaussian();
      mu_ = g->mu;
      gamma_ = g->gamma;
      sigma_ = em.params().sigma;
      lambda_ = pair.phi.quadratic().curvature;
      Lam_ = lambda_ * sigma_ / gamma_;
      return;
    }
    sigma_ = em.params().sigma;
    y_lo_ = pair.phi.y_min();
    y_hi_ = pair.phi.y_max();
    n_y_ = 321;
    hy_ = (y_hi_ - y_lo_) / (n_y_ - 1);
    const double dt = 1.0 / n_steps;
    h_table_.resize(static_cast<std::size_t>(n_steps + 1) * n_y_);
    for (int j = 0; j <= n_steps; ++j) {
      const double t = std::min(1.0, j * dt);
      for (int k = 0; k < n_y_; ++k)
        h_table_[static_cast<std::size_t>(j) * n_y_ + k] =
            pricing_rule_H(em_, t, y_lo_ + k * hy_);
    }
    for (double v : vs) {
      drift_v_.push_back(v);
      std::vector<double> tab(static_cast<std::size_t>(n_steps) * n_y_);
      for (int j = 0; j < n_steps; ++j) {
        const double t = j * dt;
        for (int k = 0; k < n_y_; ++k)
          tab[static_cast<std::size_t>(j) * n_y_ + k] =
              alpha_star(em_, t, y_lo_ + k * hy_, v);
      }
      drift_tables_.push_back(std::move(tab));
    }
  }

  bool analytic() const { return analytic_; }

  double drift(int step, double t, double y, double v, int v_slot, bool* escaped) const {
    if (analytic_) {
      const double x = (v - mu_) / gamma_ - Lam_ * y / sigma_;
      return Lam_ * sigma_ * x / (1.0 - t * Lam_ * Lam_);
    }
    if (y < y_lo_ || y > y_hi_) {
      *escaped = true;
      y = std::clamp(y, y_lo_, y_hi_);
    }
    return interp(drift_tables_[v_slot], step, y);
  }

  double price(int step, double y) const {
    if (analytic_) return lambda_ * y + mu_;
    y = std::clamp(y, y_lo_, y_hi_);
    return interp(h_table_, step, y);
  }

 private:
  double interp(const std::vector<double>& tab, int step, double y) const {
    const double s = (y - y_lo_) / hy_;
    int k = static_cast<int>(s);
    k = std::min(k, n_y_ - 2);
    const double w = s - k;
    const std::size_t base = static_cast<std::size_t>(step) * n_y_;
    return tab[base + k] * (1.0 - w) + tab[base + k + 1] * w;
  }

  const EquilibriumModel& em_;
  int n_steps_;
  bool analytic_ = false;
  double mu_ = 0.0, gamma_ = 1.0, sigma_ = 1.0, lambda_ = 0.0, Lam_ = 0.0;
  double y_lo_ = 0.0, y_hi_ = 0.0, hy_ = 1.0;
  int n_y_ = 0;
  std::vector<double> h_table_;
  std::vector<double> drift_v_;
  std::vector<std::vector<double>> drift_tables_;
};

struct Welford {
  double n = 0.0, mean = 0.0, m2 = 0.0;
  void add(double x) {
    n += 1.0;
    const double d = x - mean;
    mean += d / n;
    m2 += d * (x - mean);
  }
  double var() const { return n > 1.0 ? m2 / (n - 1.0) : 0.0; }
  double se() const { return n > 1.0 ? std::sqrt(var() / n) : 0.0; }
};

Estimate mean_estimate(const std::vector<PathRecord>& paths,
                       double (*f)(const PathRecord&)) {
  Welford w;
  for (const auto& r : paths) w.add(f(r));
  return Estimate{w.mean, w.se()};
}

}  // namespace

PathEnsemble simulate(const EquilibriumModel& em, const SimConfig& cfg) {
  if (cfg.n_steps < 50) throw InvalidArgument("simulate: n_steps must be >= 50");
  if (cfg.n_paths < 100) throw InvalidArgument("simulate: n_paths must be >= 100");
  if (cfg.v_mode == VMode::FixedV) {
    if (!std::isfinite(cfg.fixed_v))
      throw InvalidArgument("simulate: fixed v must be finite");
    if (const auto* d = em.dist().as_discrete()) {
      bool is_atom = false;
      for (double v : d->values)
        if (std::abs(v - cfg.fixed_v) <= 1e-12 * std::max(1.0, std::abs(v))) is_atom = true;
      if (!is_atom)
        throw InvalidArgument("simulate: fixed v is not an atom of the support");
    }
  }

  const ModelParams& prm = em.params();
  const bool sample_v = cfg.v_mode == VMode::SampleFromPi;
  const bool gaussian_closed =
      em.pair().phi.is_quadratic() && em.dist().is_gaussian();

  std::vector<double> drift_vs;
  std::vector<double> atom_cdf;
  if (!gaussian_closed) {
    if (cfg.v_mode == VMode::FixedV) {
      drift_vs = {cfg.fixed_v};
    } else if (em.dist().is_discrete()) {
      drift_vs = em.dist().as_discrete()->values;
    } else {
      throw InvalidArgument(
          "simulate: sampling a continuous V needs the closed-form pair; "
          "tabulated drift supports FixedV or a discrete law");
    }
  }
  if (sample_v && em.dist().is_discrete()) {
    const auto* d = em.dist().as_discrete();
    atom_cdf.resize(d->probs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < d->probs.size(); ++i) {
      acc += d->probs[i];
      atom_cdf[i] = acc;
    }
  }

  Dynamics dyn(em, cfg.n_steps, drift_vs);

  const int n = cfg.n_steps;
  const double dt = 1.0 / n;
  const double sqdt = std::sqrt(dt);
  const int refine = (kBrownianBase % n == 0) ? kBrownianBase / n : 1;
  const double sub_scale = sqdt / std::sqrt(static_cast<double>(refine));

  PathEnsemble ens;
  ens.cfg = cfg;
  ens.paths.reserve(cfg.n_paths);
  ens.times.resize(n);
  for (int j = 0; j < n; ++j) ens.times[j] = (j + 1) * dt;
  std::vector<Welford> wY(n), wH(n);
  ens.price_at_origin = dyn.analytic() ? dyn.price(0, 0.0) : pricing_rule_H(em, 0.0, 0.0);

  // Pooled increment moments (standardized by sigma sqrt(dt)).
  double s1 = 0, s2 = 0, s3 = 0, s4 = 0, s_lag = 0, n_incr = 0, n_lag = 0;

  for (int ip = 0; ip < cfg.n_paths; ++ip) {
    std::mt19937_64 rng = path_stream(cfg.seed, static_cast<std::uint64_t>(ip));
    std::normal_distribution<double> normal(0.0, 1.0);

    double v = cfg.fixed_v;
    int v_slot = 0;
    if (sample_v) {
      if (em.dist().is_discrete()) {
        const double u =
            std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        const auto* d = em.dist().as_discrete();
        v_slot = static_cast<int>(
            std::lower_bound(atom_cdf.begin(), atom_cdf.end(), u) - atom_cdf.begin());
        v_slot = std::min<int>(v_slot, static_cast<int>(d->values.size()) - 1);
        v = d->values[v_slot];
      } else {
        const auto* g = em.dist().as_gaussian();
        v = g->mu + g->gamma * normal(rng);
      }
    }

    double Y = 0.0, B = 0.0, pen = 0.0, gain = 0.0, nwint = 0.0;
    double S_prev = ens.price_at_origin;
    double prev_u = 0.0;
    bool flagged = false;
    for (int j = 0; j < n && !flagged; ++j) {
      const double t = j * dt;
      bool escaped = false;
      const double a = dyn.drift(j, t, Y, v, v_slot, &escaped);
      if (!std::isfinite(a) || escaped) {
        flagged = true;
        break;
      }
      pen += 0.5 * prm.c * a * a * dt;
      gain += (v - S_prev) * a * dt;

      double dW = 0.0;
      for (int r = 0; r < refine; ++r) dW += normal(rng);
      dW *= sub_scale;

      Y += a * dt + prm.sigma * dW;
      B += dW;
      const double S_next = dyn.price(j + 1, Y);
      // Noise trades execute at the post-trade price: cost int S dxi picks
      // up the covariation term sigma^2 int H_y dt.
      nwint += S_next * dW;
      S_prev = S_next;

      wY[j].add(Y);
      wH[j].add(S_next);
      if (sample_v) {
        const double u = (a * dt + prm.sigma * dW) / (prm.sigma * sqdt);
        s1 += u;
        s2 += u * u;
        s3 += u * u * u;
        s4 += u * u * u * u;
        n_incr += 1.0;
        if (j > 0) {
          s_lag += prev_u * u;
          n_lag += 1.0;
        }
        prev_u = u;
      }
    }
    if (flagged) {
      ++ens.flagged;
      continue;
    }
    PathRecord rec;
    rec.y1 = Y;
    rec.v = v;
    rec.penalty = pen;
    rec.gain = gain;
    rec.noise_wealth = prm.sigma * (B * v - nwint);
    ens.paths.push_back(rec);
  }

  if (ens.flagged > 0.001 * cfg.n_paths)
    throw NumericalError("simulate: " + std::to_string(ens.flagged) +
                         " flagged paths exceed the 0.1% budget");

  ens.mean_Y.resize(n);
  ens.var_Y.resize(n);
  ens.mean_H.resize(n);
  ens.var_H.resize(n);
  for (int j = 0; j < n; ++j) {
    ens.mean_Y[j] = wY[j].mean;
    ens.var_Y[j] = wY[j].var();
    ens.mean_H[j] = wH[j].mean;
    ens.var_H[j] = wH[j].var();
  }
  if (sample_v && n_incr > 4.0) {
    const double m1 = s1 / n_incr;
    const double m2 = s2 / n_incr - m1 * m1;
    const double m3 = s3 / n_incr - 3.0 * m1 * s2 / n_incr + 2.0 * m1 * m1 * m1;
    const double m4 = s4 / n_incr - 4.0 * m1 * s3 / n_incr +
                      6.0 * m1 * m1 * s2 / n_incr - 3.0 * m1 * m1 * m1 * m1;
    ens.incr_skew = m3 / std::pow(m2, 1.5);
    ens.incr_excess_kurtosis = m4 / (m2 * m2) - 3.0;
    ens.incr_autocorr1 = (s_lag / n_lag) / m2;
    ens.jarque_bera =
        n_incr / 6.0 *
        (ens.incr_skew * ens.incr_skew + 0.25 * ens.incr_excess_kurtosis * ens.incr_excess_kurtosis);
  }
  return ens;
}

McReport mc_report(const PathEnsemble& ens, const EquilibriumModel& em) {
  McReport rep;
  rep.n_paths = static_cast<int>(ens.paths.size());
  rep.flagged = ens.flagged;
  rep.insider_wealth =
      mean_estimate(ens.paths, [](const PathRecord& r) { return r.gain - r.penalty; });
  rep.expected_penalty =
      mean_estimate(ens.paths, [](const PathRecord& r) { return r.penalty; });
  rep.noise_loss =
      mean_estimate(ens.paths, [](const PathRecord& r) { return -r.noise_wealth; });

  const double chat = em.params().chat;
  Welford tv;
  for (const auto& r : ens.paths) tv.add(chat * em.pair().phi.eval(r.y1, 2));
  rep.terminal_posterior_variance = Estimate{tv.mean, tv.se()};

  const double n_eff = static_cast<double>(ens.paths.size());
  const double sigma2 = em.params().sigma * em.params().sigma;
  for (std::size_t j = 0; j < ens.times.size(); ++j) {
    const double se_mean = std::sqrt(ens.var_Y[j] / n_eff);
    if (std::abs(ens.mean_Y[j]) > rep.max_abs_mean_Y.point)
      rep.max_abs_mean_Y = Estimate{std::abs(ens.mean_Y[j]), se_mean};
    if (ens.times[j] >= 0.1) {
      const double ratio_dev = std::abs(ens.var_Y[j] / (sigma2 * ens.times[j]) - 1.0);
      // se of a variance ratio ~ sqrt(2/n) for Gaussian samples.
      if (ratio_dev > rep.max_var_ratio_dev.point)
        rep.max_var_ratio_dev = Estimate{ratio_dev, std::sqrt(2.0 / n_eff)};
    }
    const double drift = std::abs(ens.mean_H[j] - ens.price_at_origin);
    if (drift > rep.price_drift.point)
      rep.price_drift = Estimate{drift, std::sqrt(ens.var_H[j] / n_eff)};
  }
  rep.brownian_diagnostics_valid = ens.cfg.v_mode == VMode::SampleFromPi;
  rep.incr_skew = ens.incr_skew;
  rep.incr_excess_kurtosis = ens.incr_excess_kurtosis;
  rep.incr_autocorr1 = ens.incr_autocorr1;
  rep.jarque_bera = ens.jarque_bera;
  return rep;
}

std::vector<BridgeRow> bridge_comparison(const std::vector<double>& kappas,
                                         double gamma, double sigma, double mu,
                                         const SimConfig& cfg) {
  std::vector<BridgeRow> rows;
  const int n = cfg.n_steps;
  const double dt = 1.0 / n;
  const int refine = (kBrownianBase % n == 0) ? kBrownianBase / n : 1;
  const double sub_scale = std::sqrt(dt) / std::sqrt(static_cast<double>(refine));
  const int cut = std::max(1, n / 10);  // t < 0.1 bucket

  for (double kappa : kappas) {
    const GaussianModel model = GaussianModel::from_kappa(kappa, gamma, sigma, mu);
    const double L = model.Lambda();
    double szz = 0.0, szy = 0.0;
    for (int ip = 0; ip < cfg.n_paths; ++ip) {
      std::mt19937_64 rng = path_stream(cfg.seed, static_cast<std::uint64_t>(ip));
      std::normal_distribution<double> normal(0.0, 1.0);
      const double v = mu + gamma * normal(rng);
      double Y = 0.0;
      for (int j = 0; j < n; ++j) {
        const double t = j * dt;
        const double x = (v - mu) / gamma - L * Y / sigma;
        const double a = L * sigma * x / (1.0 - t * L * L);
        double dW = 0.0;
        for (int r = 0; r < refine; ++r) dW += normal(rng);
        dW *= sub_scale;
        const double dY = a * dt + sigma * dW;
        if (j < cut) {
          const double z = sigma * x * dt / (1.0 - t * L * L);
          szz += z * z;
          szy += z * dY;
        }
        Y += dY;
      }
    }
    BridgeRow row;
    row.kappa = kappa;
    row.coefficient = szy / szz;
    row.se = sigma * std::sqrt(dt / szz);
    row.expected_Lambda = L;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace kylepen
