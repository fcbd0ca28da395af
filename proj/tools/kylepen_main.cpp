// Command line front end: solve | gaussian | bernoulli | analyze | simulate |
// sweep. Artifacts embed the config hash (and seed where applicable); errors
// go to stderr as JSON. Exit codes: 0 ok, 2 config error, 3 non-convergence,
// 4 numerical failure.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "kylepen/bernoulli.hpp"
#include "kylepen/equilibrium.hpp"
#include "kylepen/errors.hpp"
#include "kylepen/fixed_point.hpp"
#include "kylepen/gaussian.hpp"
#include "kylepen/io.hpp"
#include "kylepen/simulate.hpp"

namespace fs = std::filesystem;
using kylepen::io::json;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNonConvergence = 3;
constexpr int kExitNumerical = 4;

struct CliError {
  int code;
  std::string type;
  std::string message;
};

void emit_error(const std::string& type, const std::string& message) {
  json err;
  err["error"] = {{"type", type}, {"message", message}};
  std::cerr << err.dump() << "\n";
}

std::string prov_line(const std::string& hash, std::optional<std::uint64_t> seed) {
  std::string line = "config_hash=" + hash;
  if (seed) line += " seed=" + std::to_string(*seed);
  return line;
}

void write_json_file(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw kylepen::NumericalError("cannot open " + path + " for writing");
  out << j.dump(2) << "\n";
}

kylepen::io::RunConfig load_config(const std::string& config_path) {
  std::ifstream in(config_path);
  if (!in) throw kylepen::InvalidArgument("cannot open config file " + config_path);
  json j;
  in >> j;
  return kylepen::io::config_from_json(j);
}

// Builds the model (pair + distribution + params) a subcommand operates on:
// closed form for Gaussian, solver otherwise.
struct ResolvedModel {
  kylepen::ConvexPair pair;
  kylepen::ValueDistribution dist;
  kylepen::ModelParams params;
  std::optional<kylepen::GaussianModel> gaussian;
};

ResolvedModel resolve_model(const kylepen::io::RunConfig& cfg) {
  if (!cfg.dist) throw kylepen::InvalidArgument("config: model.distribution is required");
  const kylepen::ModelParams params = cfg.params();
  if (cfg.dist->is_gaussian()) {
    const auto* g = cfg.dist->as_gaussian();
    const auto model =
        kylepen::GaussianModel::from_c(g->mu, g->gamma, params.sigma, params.c);
    return ResolvedModel{kylepen::gaussian_pair(model), *cfg.dist, params, model};
  }
  const auto report = kylepen::solve_fixed_point(*cfg.dist, params, cfg.solver);
  return ResolvedModel{report.pair, *cfg.dist, params, std::nullopt};
}

int cmd_solve(const kylepen::io::RunConfig& cfg) {
  if (!cfg.dist) throw kylepen::InvalidArgument("solve: model.distribution is required");
  const auto report = kylepen::solve_fixed_point(*cfg.dist, cfg.params(), cfg.solver);
  const std::string hash = kylepen::io::config_hash(cfg);
  fs::create_directories(cfg.out_dir);
  std::string phi_path;
  if (cfg.want_csv) {
    phi_path = (fs::path(cfg.out_dir) / "phi.csv").string();
    kylepen::io::write_grid_csv(report.pair.phi.grid(), phi_path,
                                prov_line(hash, std::nullopt));
  }
  json j = kylepen::io::fixed_point_report_json(report, phi_path);
  j["config"] = kylepen::io::config_to_json(cfg);
  j["config_hash"] = hash;
  std::cout << j.dump(2) << "\n";
  if (cfg.want_json)
    write_json_file(j, (fs::path(cfg.out_dir) / "solve_report.json").string());
  return 0;
}

int cmd_gaussian(const kylepen::io::RunConfig& cfg, const std::string& out_file) {
  if (!cfg.dist || !cfg.dist->is_gaussian())
    throw kylepen::InvalidArgument("gaussian: needs a Gaussian distribution");
  const auto* g = cfg.dist->as_gaussian();
  const auto model = kylepen::GaussianModel::from_c(g->mu, g->gamma, cfg.sigma,
                                                    cfg.resolved_c());
  json j = kylepen::io::gaussian_summary_json(model, kylepen::gaussian_summary(model));
  j["config_hash"] = kylepen::io::config_hash(cfg);
  std::cout << j.dump(2) << "\n";
  if (!out_file.empty()) write_json_file(j, out_file);
  return 0;
}

int cmd_bernoulli(double p, double c, double sigma, const std::string& out_dir) {
  const kylepen::ModelParams params(sigma, c, p);
  const auto model = kylepen::make_bernoulli(p, params);
  fs::create_directories(out_dir);
  const auto pair = kylepen::bernoulli_pair(model);
  const std::string phi_path = (fs::path(out_dir) / "bernoulli_phi.csv").string();
  const std::string hash = kylepen::io::fnv1a_hex(
      "bernoulli p=" + std::to_string(p) + " c=" + std::to_string(c) +
      " sigma=" + std::to_string(sigma));
  kylepen::io::write_grid_csv(pair.phi.grid(), phi_path, prov_line(hash, std::nullopt));
  json j;
  j["a"] = model.a;
  j["psi0"] = kylepen::bernoulli_psi0(model);
  j["psi1"] = kylepen::bernoulli_psi1(model);
  j["phi_csv_path"] = phi_path;
  j["config_hash"] = hash;
  std::cout << j.dump(2) << "\n";
  write_json_file(j, (fs::path(out_dir) / "bernoulli.json").string());
  return 0;
}

int cmd_analyze(const kylepen::io::RunConfig& cfg, int t_points, int y_points,
                double y_halfwidth, std::optional<double> alpha_v) {
  ResolvedModel model = resolve_model(cfg);
  kylepen::EquilibriumModel em(model.pair, model.dist, model.params, cfg.solver.quad_order);
  const std::string hash = kylepen::io::config_hash(cfg);
  fs::create_directories(cfg.out_dir);

  // Per-atom value and penalty; surfaces on the (t, y) mesh.
  json value = json::array();
  json penalty = json::array();
  std::vector<double> vs = em.atom_v();
  if (model.dist.is_gaussian() && vs.size() > 16) {
    // A readable slice of the continuum for the JSON tables.
    const auto* g = model.dist.as_gaussian();
    vs.clear();
    for (int i = -4; i <= 4; ++i) vs.push_back(g->mu + 0.5 * i * g->gamma);
  }
  for (double v : vs) {
    value.push_back({v, kylepen::insider_value(em, v)});
    penalty.push_back({v, kylepen::expected_penalty_per_v(em, v)});
  }

  const double w = y_halfwidth * model.params.sigma;
  const double v_for_alpha =
      alpha_v.value_or(model.dist.mean() + std::sqrt(model.dist.variance()));
  const std::string h_path = (fs::path(cfg.out_dir) / "H_surface.csv").string();
  const std::string a_path = (fs::path(cfg.out_dir) / "alpha_surface.csv").string();
  {
    std::ofstream hs(h_path), as(a_path);
    hs.precision(12);
    as.precision(12);
    hs << "# " << prov_line(hash, std::nullopt) << "\n" << "t,y,H\n";
    as << "# " << prov_line(hash, std::nullopt) << "\n" << "t,y,alpha\n";
    for (int it = 0; it < t_points; ++it) {
      const double t = static_cast<double>(it) / (t_points - 1);
      for (int iy = 0; iy < y_points; ++iy) {
        const double y = -w + 2.0 * w * iy / (y_points - 1);
        hs << t << "," << y << "," << kylepen::pricing_rule_H(em, t, y) << "\n";
        if (t < 1.0)
          as << t << "," << y << "," << kylepen::alpha_star(em, t, y, v_for_alpha) << "\n";
      }
    }
  }

  json j;
  j["value"] = value;
  j["penalty"] = penalty;
  j["noise_loss"] = kylepen::noise_loss(em);
  j["delta"] = kylepen::price_inefficiency(em);
  j["H_surface_csv"] = h_path;
  j["alpha_surface_csv"] = a_path;
  j["alpha_surface_v"] = v_for_alpha;
  j["config_hash"] = hash;
  std::cout << j.dump(2) << "\n";
  write_json_file(j, (fs::path(cfg.out_dir) / "analyze.json").string());
  return 0;
}

int cmd_simulate(const kylepen::io::RunConfig& cfg, const std::string& out_file) {
  ResolvedModel model = resolve_model(cfg);
  kylepen::EquilibriumModel em(model.pair, model.dist, model.params, cfg.solver.quad_order);
  const auto ensemble = kylepen::simulate(em, cfg.sim);
  const auto report = kylepen::mc_report(ensemble, em);
  json j = kylepen::io::mc_report_json(report, cfg.sim);
  j["config"] = kylepen::io::config_to_json(cfg);
  j["config_hash"] = kylepen::io::config_hash(cfg);
  std::cout << j.dump(2) << "\n";
  if (!out_file.empty()) write_json_file(j, out_file);
  return 0;
}

int cmd_sweep(double gamma, double sigma, int points, double kappa_min, double kappa_max,
              const std::string& out_path) {
  if (points < 2 || !(kappa_min > 0.0) || !(kappa_max > kappa_min))
    throw kylepen::InvalidArgument("sweep: need points >= 2 and 0 < kappa_min < kappa_max");
  const std::string hash = kylepen::io::fnv1a_hex(
      "sweep gamma=" + std::to_string(gamma) + " sigma=" + std::to_string(sigma) +
      " points=" + std::to_string(points));
  std::ofstream out(out_path);
  if (!out) throw kylepen::NumericalError("cannot open " + out_path + " for writing");
  out.precision(12);
  out << "# " << prov_line(hash, std::nullopt) << "\n";
  out << "kappa,Lambda,wealth,penalty,welfare,noise_loss,delta,avg_entropy\n";
  const double gs = gamma * sigma;
  const double g2 = gamma * gamma;
  for (int i = 0; i < points; ++i) {
    const double kappa =
        kappa_min * std::pow(kappa_max / kappa_min, static_cast<double>(i) / (points - 1));
    const auto model = kylepen::GaussianModel::from_kappa(kappa, gamma, sigma);
    const auto s = kylepen::gaussian_summary(model);
    // Wealth, penalty, welfare, noise loss normalized by gamma*sigma;
    // inefficiency by gamma^2.
    out << kappa << "," << s.Lambda << "," << s.insider_wealth_exante / gs << ","
        << s.expected_penalty / gs << "," << s.welfare / gs << "," << s.noise_loss / gs
        << "," << s.inefficiency_delta / g2 << "," << s.avg_entropy << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Equilibrium of the continuous-time Kyle model with quadratic penalties"};
  app.require_subcommand(1);

  std::string config_path, dist_json_text, out_file, out_dir = "out";
  double sigma = 1.0, gamma = 1.0, mu = 0.0;
  std::optional<double> c, kappa, fixed_v, alpha_v;
  int paths = 100000, steps = 400, t_points = 51, y_points = 201;
  double y_halfwidth = 4.0;
  std::uint64_t seed = 12345;
  double p = 0.5;
  int sweep_points = 200;
  double kappa_min = 1e-2, kappa_max = 1e2;

  auto add_model_flags = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON run configuration");
    cmd->add_option("--dist-json", dist_json_text, "inline distribution JSON");
    cmd->add_option("--sigma", sigma, "noise volatility");
    cmd->add_option("--gamma", gamma, "std of V (gaussian)");
    cmd->add_option("--mu", mu, "mean of V (gaussian)");
    cmd->add_option("--c", c, "penalty rate");
    cmd->add_option("--kappa", kappa, "penalty rate as c = kappa*gamma/sigma");
    cmd->add_option("--out-dir", out_dir, "artifact directory");
  };

  CLI::App* solve = app.add_subcommand("solve", "fixed point of the integral operator");
  add_model_flags(solve);
  CLI::App* gaussian = app.add_subcommand("gaussian", "closed-form Gaussian equilibrium");
  add_model_flags(gaussian);
  gaussian->add_option("--out", out_file, "write the summary JSON here");
  CLI::App* bernoulli = app.add_subcommand("bernoulli", "two-point closed form");
  bernoulli->add_option("--p", p, "P(V=1)")->required();
  bernoulli->add_option("--c", c, "penalty rate")->required();
  bernoulli->add_option("--sigma", sigma, "noise volatility");
  bernoulli->add_option("--out-dir", out_dir, "artifact directory");
  CLI::App* analyze = app.add_subcommand("analyze", "equilibrium surfaces and per-v tables");
  add_model_flags(analyze);
  analyze->add_option("--t-points", t_points, "mesh points in t");
  analyze->add_option("--y-points", y_points, "mesh points in y");
  analyze->add_option("--y-halfwidth", y_halfwidth, "mesh half width in sigmas");
  analyze->add_option("--alpha-v", alpha_v, "v used for the alpha surface");
  CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo verification");
  add_model_flags(simulate);
  simulate->add_option("--paths", paths, "number of paths");
  simulate->add_option("--steps", steps, "Euler steps");
  simulate->add_option("--seed", seed, "RNG seed");
  simulate->add_option("--v", fixed_v, "condition on V = v");
  simulate->add_option("--out", out_file, "write the report JSON here");
  CLI::App* sweep = app.add_subcommand("sweep", "kappa sweep of the Gaussian statistics");
  sweep->add_option("--gamma", gamma, "std of V");
  sweep->add_option("--sigma", sigma, "noise volatility");
  sweep->add_option("--points", sweep_points, "grid size");
  sweep->add_option("--kappa-min", kappa_min, "left endpoint");
  sweep->add_option("--kappa-max", kappa_max, "right endpoint");
  sweep->add_option("--out", out_file, "output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    emit_error("config", e.what());
    return kExitConfig;
  }

  try {
    kylepen::io::RunConfig cfg;
    if (!config_path.empty()) {
      cfg = load_config(config_path);
    } else {
      if (!dist_json_text.empty())
        cfg.dist = kylepen::io::dist_from_json(json::parse(dist_json_text));
      cfg.sigma = sigma;
      cfg.c = c;
      cfg.kappa = kappa;
      cfg.out_dir = out_dir;
      cfg.sim.n_paths = paths;
      cfg.sim.n_steps = steps;
      cfg.sim.seed = seed;
      if (fixed_v) {
        cfg.sim.v_mode = kylepen::VMode::FixedV;
        cfg.sim.fixed_v = *fixed_v;
      }
    }
    // Gaussian flags are a shorthand for an explicit distribution.
    if (!cfg.dist && (gaussian->parsed() || analyze->parsed() || simulate->parsed()))
      cfg.dist = kylepen::ValueDistribution::gaussian(mu, gamma);
    if (!cfg.c && !cfg.kappa) cfg.c = c;  // may still be empty; validated below

    if (solve->parsed()) return cmd_solve(cfg);
    if (gaussian->parsed()) return cmd_gaussian(cfg, out_file);
    if (bernoulli->parsed()) return cmd_bernoulli(p, c.value(), sigma, out_dir);
    if (analyze->parsed())
      return cmd_analyze(cfg, t_points, y_points, y_halfwidth, alpha_v);
    if (simulate->parsed()) return cmd_simulate(cfg, out_file);
    if (sweep->parsed())
      return cmd_sweep(gamma, sigma, sweep_points, kappa_min, kappa_max, out_file);
    emit_error("config", "no subcommand given");
    return kExitConfig;
  } catch (const kylepen::NonConvergence& e) {
    emit_error("non_convergence", e.what());
    return kExitNonConvergence;
  } catch (const kylepen::InvalidArgument& e) {
    emit_error("config", e.what());
    return kExitConfig;
  } catch (const kylepen::DomainError& e) {
    emit_error("domain", e.what());
    return kExitNumerical;
  } catch (const kylepen::NumericalError& e) {
    emit_error("numerical", e.what());
    return kExitNumerical;
  } catch (const json::exception& e) {
    emit_error("config", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    emit_error("numerical", e.what());
    return kExitNumerical;
  }
}
