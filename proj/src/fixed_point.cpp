#include "kylepen/fixed_point.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "kylepen/errors.hpp"

namespace kylepen {

namespace {

struct AtomSet {
  std::vector<double> v;
  std::vector<double> w;
};

// Atoms whose T1 stationary point phi'(y) + c y = v falls inside the grid.
// For bounded carriers nothing is dropped in practice (the slope box keeps
// every atom admissible); for Gaussian Pi the discarded mass is below 1e-60.
AtomSet admissible_atoms(const QuadratureRule& all, const GridFunction& phi,
                         const ModelParams& p) {
  const double lo = phi.left_slope() + p.c * phi.y_min();
  const double hi = phi.right_slope() + p.c * phi.y_max();
  AtomSet out;
  out.v.reserve(all.size());
  out.w.reserve(all.size());
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (all.nodes[i] >= lo && all.nodes[i] <= hi) {
      out.v.push_back(all.nodes[i]);
      out.w.push_back(all.weights[i]);
    }
  }
  if (out.v.empty())
    throw DomainError("apply_T: no admissible atoms; tail slopes [" +
                      std::to_string(phi.left_slope()) + ", " +
                      std::to_string(phi.right_slope()) +
                      "] too narrow for the support (try a wider grid)");
  return out;
}

// chat * log T1 for a grid phi sampled through its spline. The quadrature
// carries the N(0, sigma^2) weight, so linear tails pose no convergence
// issue; exponents are shifted before exponentiation.
double t1_grid(const SplineEval& phi, const GridFunction& gf, const ModelParams& p,
               const QuadratureRule& quad, double v) {
  const double lo = gf.left_slope() + p.c * gf.y_min();
  const double hi = gf.right_slope() + p.c * gf.y_max();
  if (!(v >= lo && v <= hi)) {
    throw DomainError("apply_T1: v=" + std::to_string(v) +
                      " outside the admissible range [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "] for tail slopes (" +
                      std::to_string(gf.left_slope()) + ", " +
                      std::to_string(gf.right_slope()) + ")");
  }
  const std::size_t n = quad.size();
  double m = -std::numeric_limits<double>::infinity();
  std::vector<double> expo(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double y = quad.nodes[i];
    expo[i] = (y * v - phi(y)) / p.chat;
    m = std::max(m, expo[i]);
  }
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += quad.weights[i] * std::exp(expo[i] - m);
  const double out = p.chat * (m + std::log(s));
  if (!std::isfinite(out))
    throw DomainError("apply_T1: non-finite value at v=" + std::to_string(v));
  return out;
}

double t1_quadratic(const QuadraticPhi& q, const ModelParams& p, double v) {
  const double denom = q.curvature * p.sigma * p.sigma + p.chat;
  if (!(denom > 0.0))
    throw DomainError("apply_T1: quadratic phi with curvature <= -c diverges");
  const double s2 = p.chat * p.sigma * p.sigma / denom;  // posterior variance of y
  const double d = v - q.slope0;
  return 0.5 * p.chat * std::log(s2 / (p.sigma * p.sigma)) + s2 * d * d / (2.0 * p.chat);
}

double lse_weighted(const std::vector<double>& w, const std::vector<double>& expo) {
  double m = -std::numeric_limits<double>::infinity();
  for (double e : expo) m = std::max(m, e);
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * std::exp(expo[i] - m);
  return m + std::log(s);
}

struct IterationState {
  GridFunction phi;
  std::vector<double> psi;  // at the retained atoms
  AtomSet atoms;
};

// One application of T at the array level; returns the new grid plus the
// psi used, atoms retained, and the sup-norm residual against `phi`.
IterationState apply_T_impl(const GridFunction& phi, const QuadratureRule& all_atoms,
                            const ModelParams& p, const QuadratureRule& quad,
                            double* residual_out) {
  AtomSet atoms = admissible_atoms(all_atoms, phi, p);
  const SplineEval spline(phi);

  const std::size_t na = atoms.v.size();
  std::vector<double> psi(na);
  for (std::size_t i = 0; i < na; ++i)
    psi[i] = t1_grid(spline, phi, p, quad, atoms.v[i]);

  const int n = phi.n_points();
  std::vector<double> raw(n);
  std::vector<double> expo(na);
  double slope_lo = 0.0, slope_hi = 0.0;
  for (int j = 0; j < n; ++j) {
    const double y = phi.node(j);
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < na; ++i) {
      expo[i] = (y * atoms.v[i] - psi[i]) / p.chat;
      m = std::max(m, expo[i]);
    }
    double s = 0.0, sv = 0.0;
    for (std::size_t i = 0; i < na; ++i) {
      const double t = atoms.w[i] * std::exp(expo[i] - m);
      s += t;
      sv += t * atoms.v[i];
    }
    raw[j] = p.chat * (m + std::log(s));
    if (!std::isfinite(raw[j]))
      throw DomainError("apply_T2: non-finite value at y=" + std::to_string(y));
    // Posterior means of v at the grid ends become the new tail slopes.
    if (j == 0) slope_lo = sv / s;
    if (j == n - 1) slope_hi = sv / s;
  }

  const int k0 = static_cast<int>(std::round(-phi.y_min() / phi.step()));
  const double at0 = raw[k0];
  double res = 0.0;
  for (int j = 0; j < n; ++j) {
    raw[j] -= at0;
    res = std::max(res, std::abs(raw[j] - phi.value_at_node(j)));
  }
  if (residual_out) *residual_out = res;

  GridFunction next(phi.y_min(), phi.y_max(), std::move(raw), slope_lo, slope_hi);
  return IterationState{std::move(next), std::move(psi), std::move(atoms)};
}

GridFunction zero_grid(const ModelParams& p, const FixedPointOptions& o) {
  const double w = o.grid_halfwidth * p.sigma;
  return GridFunction(-w, w, std::vector<double>(o.grid_points, 0.0), 0.0, 0.0);
}

GridFunction linear_grid(const ModelParams& p, const FixedPointOptions& o, double slope) {
  const double w = o.grid_halfwidth * p.sigma;
  std::vector<double> vals(o.grid_points);
  const double h = 2.0 * w / (o.grid_points - 1);
  for (int i = 0; i < o.grid_points; ++i) vals[i] = slope * (-w + h * i);
  return GridFunction(-w, w, std::move(vals), slope, slope);
}

struct RunResult {
  GridFunction phi;
  std::vector<double> psi;
  AtomSet atoms;
  int iterations;
  double residual;
  std::vector<double> history;
};

RunResult iterate(GridFunction phi, const QuadratureRule& all_atoms, const ModelParams& p,
                  const QuadratureRule& quad, const FixedPointOptions& o) {
  std::vector<double> history;
  for (int it = 1; it <= o.max_iter; ++it) {
    double res = 0.0;
    IterationState st = apply_T_impl(phi, all_atoms, p, quad, &res);
    history.push_back(res);
    if (o.damping >= 1.0) {
      phi = std::move(st.phi);
    } else {
      std::vector<double> mixed(phi.n_points());
      for (int j = 0; j < phi.n_points(); ++j)
        mixed[j] = (1.0 - o.damping) * phi.value_at_node(j) +
                   o.damping * st.phi.value_at_node(j);
      const double ls = (1.0 - o.damping) * phi.left_slope() + o.damping * st.phi.left_slope();
      const double rs =
          (1.0 - o.damping) * phi.right_slope() + o.damping * st.phi.right_slope();
      phi = GridFunction(phi.y_min(), phi.y_max(), std::move(mixed), ls, rs);
    }
    if (res <= o.tol) {
      return RunResult{std::move(phi), std::move(st.psi), std::move(st.atoms),
                       it, res, std::move(history)};
    }
  }
  throw NonConvergence("solve_fixed_point: no convergence after " +
                           std::to_string(o.max_iter) + " iterations (residual " +
                           std::to_string(history.back()) + ")",
                       history);
}

void fit_quadratic(const GridFunction& phi, double* a, double* b) {
  double sy2 = 0.0, sy4 = 0.0, sfy = 0.0, sfy2 = 0.0;
  for (int i = 0; i < phi.n_points(); ++i) {
    const double y = phi.node(i);
    const double f = phi.value_at_node(i);
    sy2 += y * y;
    sy4 += y * y * y * y;
    sfy += f * y;
    sfy2 += f * y * y;
  }
  // Symmetric grid: odd moments vanish and the normal equations decouple.
  *a = 2.0 * sfy2 / sy4;
  *b = sfy / sy2;
}

}  // namespace

double apply_T1(const PhiFunction& phi, const ModelParams& params,
                const QuadratureRule& quad, double v) {
  if (!std::isfinite(v)) throw InvalidArgument("apply_T1: v must be finite");
  if (phi.is_quadratic()) return t1_quadratic(phi.quadratic(), params, v);
  const SplineEval spline(phi.grid());
  return t1_grid(spline, phi.grid(), params, quad, v);
}

double apply_T2(const PsiFunction& psi, const ValueDistribution& dist,
                const ModelParams& params, double y, int quad_order) {
  if (!std::isfinite(y)) throw InvalidArgument("apply_T2: y must be finite");
  if (psi.is_quadratic() && dist.is_gaussian()) {
    // Completed square of the Gaussian v-integral.
    const QuadraticPsi& q = psi.quadratic();
    const auto* g = dist.as_gaussian();
    const double a = 1.0 / (q.denom * params.chat) + 1.0 / (g->gamma * g->gamma);
    if (!(a > 0.0)) throw DomainError("apply_T2: psi decays too fast for Gaussian Pi");
    const double delta = g->mu - q.center;
    const double b = y / params.chat - delta / (q.denom * params.chat);
    return y * g->mu - q.offset - delta * delta / (2.0 * q.denom) -
           0.5 * params.chat * std::log(g->gamma * g->gamma * a) +
           params.chat * b * b / (2.0 * a);
  }
  std::vector<double> v, w, vals;
  if (!psi.is_quadratic()) {
    v = psi.atom_values();
    w = psi.weights();
    vals = psi.values();
  } else {
    const QuadratureRule atoms = dist.atoms(quad_order);
    v = atoms.nodes;
    w = atoms.weights;
    vals.resize(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) vals[i] = psi.value(v[i]);
  }
  std::vector<double> expo(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) expo[i] = (y * v[i] - vals[i]) / params.chat;
  const double out = params.chat * lse_weighted(w, expo);
  if (!std::isfinite(out))
    throw DomainError("apply_T2: non-finite value at y=" + std::to_string(y));
  return out;
}

GridFunction apply_T(const GridFunction& phi, const ValueDistribution& dist,
                     const ModelParams& params, const QuadratureRule& quad) {
  const QuadratureRule all = dist.atoms(static_cast<int>(quad.size()));
  IterationState st = apply_T_impl(phi, all, params, quad, nullptr);
  return std::move(st.phi);
}

FixedPointReport solve_fixed_point(const ValueDistribution& dist, const ModelParams& params,
                                   const FixedPointOptions& opts) {
  if (!(opts.tol > 0.0)) throw InvalidArgument("solve_fixed_point: tol must be positive");
  if (opts.max_iter < 1) throw InvalidArgument("solve_fixed_point: max_iter must be >= 1");
  if (!(opts.damping > 0.0 && opts.damping <= 1.0))
    throw InvalidArgument("solve_fixed_point: damping must lie in (0, 1]");
  if (opts.grid_points < 3 || opts.grid_points % 2 == 0)
    throw InvalidArgument("solve_fixed_point: grid_points must be odd and >= 3");

  const QuadratureRule all = dist.atoms(opts.quad_order);

  // Degenerate Pi: the exact fixed point is phi(y) = v0 y, psi(v0) = 0.
  if (all.size() == 1) {
    const double v0 = all.nodes[0];
    FixedPointReport rep(ConvexPair{PhiFunction(linear_grid(params, opts, v0)),
                                    PsiFunction({v0}, {0.0}, {1.0})});
    rep.iterations = 1;
    rep.residual = 0.0;
    rep.residual_history = {0.0};
    rep.psi_lower = {0.0};
    rep.psi_upper_sq_rate = {0.0};
    rep.psi_upper_lin_rate = {0.0};
    fit_quadratic(rep.pair.phi.grid(), &rep.lambda_fit, &rep.slope_fit);
    return rep;
  }

  const QuadratureRule quad = gauss_hermite(opts.quad_order, params.sigma);
  RunResult run = iterate(zero_grid(params, opts), all, params, quad, opts);

  // Re-derive psi from the final iterate so the reported pair satisfies
  // psi = chat log T1(phi) to rounding rather than to the stopping tolerance.
  const SplineEval spline(run.phi);
  run.atoms = admissible_atoms(all, run.phi, params);
  run.psi.resize(run.atoms.v.size());
  for (std::size_t i = 0; i < run.atoms.v.size(); ++i)
    run.psi[i] = t1_grid(spline, run.phi, params, quad, run.atoms.v[i]);

  FixedPointReport rep(ConvexPair{
      PhiFunction(run.phi),
      PsiFunction(run.atoms.v, run.psi, run.atoms.w)});
  rep.iterations = run.iterations;
  rep.residual = run.residual;
  rep.residual_history = std::move(run.history);
  fit_quadratic(run.phi, &rep.lambda_fit, &rep.slope_fit);
  const double e_phi = quad.integrate([&](double y) { return spline(y); });
  const double h0 = run.phi.eval(0.0, 1);
  const std::size_t na = run.atoms.v.size();
  rep.psi_lower.resize(na);
  rep.psi_upper_sq_rate.resize(na);
  rep.psi_upper_lin_rate.resize(na);
  const double tol_env = 1e-8 * std::max(1.0, std::abs(e_phi));
  for (std::size_t i = 0; i < na; ++i) {
    const double d = run.atoms.v[i] - h0;
    rep.psi_lower[i] = -e_phi;
    rep.psi_upper_sq_rate[i] = d * d / (2.0 * params.c * params.c * params.sigma * params.sigma);
    rep.psi_upper_lin_rate[i] = d * d / (2.0 * params.c);
    if (run.psi[i] < rep.psi_lower[i] - tol_env) rep.psi_lower_ok = false;
    if (run.psi[i] > rep.psi_upper_sq_rate[i] + tol_env) rep.psi_upper_sq_rate_ok = false;
    if (run.psi[i] > rep.psi_upper_lin_rate[i] + tol_env) rep.psi_upper_lin_rate_ok = false;
  }
  rep.bounds_warning =
      !rep.psi_lower_ok || (!rep.psi_upper_sq_rate_ok && !rep.psi_upper_lin_rate_ok);

  if (opts.probe_uniqueness) {
    FixedPointOptions probe = opts;
    probe.probe_uniqueness = false;
    RunResult alt = iterate(linear_grid(params, opts, dist.mean()), all, params, quad, probe);
    rep.alt_deviation = run.phi.sup_diff(alt.phi);
    rep.nonunique_flag = rep.alt_deviation > 10.0 * opts.tol;
  }
  return rep;
}

double pair_identity_deviation(const ConvexPair& pair, const ValueDistribution& dist,
                               const ModelParams& params, int quad_order) {
  const QuadratureRule quad = gauss_hermite(quad_order, params.sigma);

  // Identity 1: psi(v) = chat log T1(phi)(v) at the atoms.
  std::vector<double> v, vals;
  if (pair.psi.is_quadratic()) {
    const QuadratureRule atoms = dist.atoms(quad_order);
    v = atoms.nodes;
    vals.resize(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) vals[i] = pair.psi.value(v[i]);
  } else {
    v = pair.psi.atom_values();
    vals = pair.psi.values();
  }
  double dev = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    dev = std::max(dev, std::abs(apply_T1(pair.phi, params, quad, v[i]) - vals[i]));

  // Identity 2: phi(y) = chat log T2(psi)(y) on a grid sample.
  const double hw = 6.0 * params.sigma;
  const int m = 121;
  for (int j = 0; j < m; ++j) {
    const double y = -hw + 2.0 * hw * j / (m - 1);
    dev = std::max(dev,
                   std::abs(apply_T2(pair.psi, dist, params, y, quad_order) -
                            pair.phi.eval(y)));
  }
  return dev;
}

}  // namespace kylepen
