#pragma once

#include <cstdint>
#include <vector>

#include "kylepen/equilibrium.hpp"
#include "kylepen/gaussian.hpp"

namespace kylepen {

enum class VMode { FixedV, SampleFromPi };
enum class Scheme { EulerMaruyama };

struct SimConfig {
  int n_paths = 100000;
  int n_steps = 400;
  std::uint64_t seed = 12345;
  VMode v_mode = VMode::SampleFromPi;
  double fixed_v = 0.0;  // used when v_mode == FixedV
  Scheme scheme = Scheme::EulerMaruyama;
};

// Per-path terminal records. Penalty/gain integrals use non-anticipating
// left-point sums.
struct PathRecord {
  double y1 = 0.0;
  double v = 0.0;
  double penalty = 0.0;       // (c/2) int alpha^2 dt
  double gain = 0.0;          // int (v - S) alpha dt
  double noise_wealth = 0.0;  // sigma B_1 (v - S_1) - sigma int B dS
};

struct PathEnsemble {
  SimConfig cfg;
  std::vector<PathRecord> paths;  // flagged paths excluded
  // Per-step summaries at times t_j = j/n_steps, j = 1..n_steps.
  std::vector<double> times, mean_Y, var_Y, mean_H, var_H;
  double price_at_origin = 0.0;  // H(0,0)
  int flagged = 0;
  // Pooled increment diagnostics (SampleFromPi only): standardized moments
  // and lag-1 autocorrelation of dY / (sigma sqrt(dt)).
  double incr_skew = 0.0, incr_excess_kurtosis = 0.0, incr_autocorr1 = 0.0;
  double jarque_bera = 0.0;
};

struct Estimate {
  double point = 0.0;
  double se = 0.0;
};

struct McReport {
  Estimate insider_wealth;      // mean(gain - penalty)
  Estimate expected_penalty;    // mean(penalty)
  Estimate noise_loss;          // mean(-noise_wealth)
  Estimate terminal_posterior_variance;  // mean(chat phi''(Y_1))
  Estimate max_abs_mean_Y;      // max_t |mean(Y_t)|, se at the argmax
  Estimate max_var_ratio_dev;   // max_{t>=0.1} |var(Y_t)/(sigma^2 t) - 1|
  Estimate price_drift;         // max_t |mean(H_t) - H(0,0)|
  bool brownian_diagnostics_valid = false;  // only under SampleFromPi
  double incr_skew = 0.0, incr_excess_kurtosis = 0.0, incr_autocorr1 = 0.0;
  double jarque_bera = 0.0;
  int flagged = 0;
  int n_paths = 0;
};

// Euler-Maruyama paths of dY = alpha*(t,Y,v) dt + sigma dB. Deterministic
// given (seed, config): each path owns a counter-based stream keyed by
// (seed, path index), so results do not depend on how paths are
// partitioned. When n_steps divides 1600, Brownian increments come from a
// common 1600-substep refinement, making runs at different step counts
// share paths. Flagged paths (non-finite drift or |Y| beyond the tabulation
// range) are excluded and counted; above 0.1% the run fails.
PathEnsemble simulate(const EquilibriumModel& em, const SimConfig& cfg);

McReport mc_report(const PathEnsemble& ens, const EquilibriumModel& em);

// Drift-regression check against the no-penalty bridge: for each kappa,
// regress simulated increments over t < 0.1 on the normalized state
// sigma ((v-mu)/gamma - Lambda Y/sigma) dt / (1 - t Lambda^2); the
// coefficient estimates Lambda(kappa), strictly below the bridge rate 1.
struct BridgeRow {
  double kappa = 0.0;
  double coefficient = 0.0;
  double se = 0.0;
  double expected_Lambda = 0.0;
};
std::vector<BridgeRow> bridge_comparison(const std::vector<double>& kappas,
                                         double gamma, double sigma, double mu,
                                         const SimConfig& cfg);

}  // namespace kylepen
