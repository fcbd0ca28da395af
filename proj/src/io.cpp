#include "kylepen/io.hpp"

#include <cstdint>
#include <fstream>
#include <sstream>
#include <vector>

#include "kylepen/errors.hpp"

namespace kylepen::io {

ValueDistribution dist_from_json(const json& j) {
  if (!j.is_object() || !j.contains("type"))
    throw InvalidArgument("distribution: expected an object with a \"type\" field");
  const std::string type = j.at("type").get<std::string>();
  if (type == "discrete") {
    std::vector<std::pair<double, double>> atoms;
    for (const auto& a : j.at("atoms")) {
      if (!a.is_array() || a.size() != 2)
        throw InvalidArgument("distribution: atoms must be [v, p] pairs");
      atoms.emplace_back(a[0].get<double>(), a[1].get<double>());
    }
    return ValueDistribution::discrete(std::move(atoms));
  }
  if (type == "gaussian") {
    return ValueDistribution::gaussian(j.at("mu").get<double>(),
                                       j.at("gamma").get<double>());
  }
  throw InvalidArgument("distribution: unknown type \"" + type + "\"");
}

json dist_to_json(const ValueDistribution& dist) {
  json j;
  if (const auto* d = dist.as_discrete()) {
    j["type"] = "discrete";
    json atoms = json::array();
    for (std::size_t i = 0; i < d->values.size(); ++i)
      atoms.push_back({d->values[i], d->probs[i]});
    j["atoms"] = atoms;
    return j;
  }
  if (const auto* g = dist.as_gaussian()) {
    j["type"] = "gaussian";
    j["mu"] = g->mu;
    j["gamma"] = g->gamma;
    return j;
  }
  throw InvalidArgument("dist_to_json: quantile-map laws have no JSON form");
}

void write_grid_csv(const GridFunction& grid, const std::string& path,
                    const std::string& provenance) {
  std::ofstream out(path);
  if (!out) throw NumericalError("cannot open " + path + " for writing");
  out.precision(17);
  if (!provenance.empty()) out << "# " << provenance << "\n";
  out << "y,value\n";
  for (int i = 0; i < grid.n_points(); ++i)
    out << grid.node(i) << "," << grid.value_at_node(i) << "\n";
}

GridFunction read_grid_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  std::string line;
  std::vector<double> ys, vals;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("y,", 0) == 0) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw InvalidArgument("bad CSV line: " + line);
    ys.push_back(std::stod(line.substr(0, comma)));
    vals.push_back(std::stod(line.substr(comma + 1)));
  }
  if (ys.size() < 3) throw InvalidArgument("grid CSV has fewer than 3 rows");
  const double h = ys[1] - ys[0];
  const double ls = (vals[1] - vals[0]) / h;
  const double rs = (vals[vals.size() - 1] - vals[vals.size() - 2]) / h;
  return GridFunction(ys.front(), ys.back(), std::move(vals), ls, rs);
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex << h;
  return out.str();
}

double RunConfig::resolved_c() const {
  if (c.has_value() == kappa.has_value())
    throw InvalidArgument("config: exactly one of c or kappa must be given");
  if (c) return *c;
  if (!dist || !dist->is_gaussian())
    throw InvalidArgument("config: kappa parametrization requires a Gaussian distribution");
  return *kappa * dist->as_gaussian()->gamma / sigma;
}

ModelParams RunConfig::params() const {
  return ModelParams(sigma, resolved_c(), dist ? dist->mean() : 0.0);
}

RunConfig config_from_json(const json& j) {
  RunConfig cfg;
  if (j.contains("model")) {
    const json& m = j.at("model");
    if (m.contains("distribution")) cfg.dist = dist_from_json(m.at("distribution"));
    if (m.contains("sigma")) cfg.sigma = m.at("sigma").get<double>();
    if (m.contains("c")) cfg.c = m.at("c").get<double>();
    if (m.contains("kappa")) cfg.kappa = m.at("kappa").get<double>();
  }
  if (j.contains("solver")) {
    const json& s = j.at("solver");
    if (s.contains("tol")) cfg.solver.tol = s.at("tol").get<double>();
    if (s.contains("max_iter")) cfg.solver.max_iter = s.at("max_iter").get<int>();
    if (s.contains("damping")) cfg.solver.damping = s.at("damping").get<double>();
    if (s.contains("quad_order")) cfg.solver.quad_order = s.at("quad_order").get<int>();
    if (s.contains("grid_points")) cfg.solver.grid_points = s.at("grid_points").get<int>();
    if (s.contains("grid_halfwidth"))
      cfg.solver.grid_halfwidth = s.at("grid_halfwidth").get<double>();
  }
  if (j.contains("sim")) {
    const json& s = j.at("sim");
    if (s.contains("n_paths")) cfg.sim.n_paths = s.at("n_paths").get<int>();
    if (s.contains("n_steps")) cfg.sim.n_steps = s.at("n_steps").get<int>();
    if (s.contains("seed")) cfg.sim.seed = s.at("seed").get<std::uint64_t>();
    if (s.contains("v")) {
      cfg.sim.v_mode = VMode::FixedV;
      cfg.sim.fixed_v = s.at("v").get<double>();
    }
  }
  if (j.contains("outputs")) {
    const json& o = j.at("outputs");
    if (o.contains("dir")) cfg.out_dir = o.at("dir").get<std::string>();
    if (o.contains("formats")) {
      cfg.want_csv = false;
      cfg.want_json = false;
      for (const auto& f : o.at("formats")) {
        if (f == "csv") cfg.want_csv = true;
        if (f == "json") cfg.want_json = true;
      }
    }
  }
  cfg.resolved_c();  // validates the c/kappa rule
  return cfg;
}

json config_to_json(const RunConfig& cfg) {
  json j;
  json m;
  if (cfg.dist) m["distribution"] = dist_to_json(*cfg.dist);
  m["sigma"] = cfg.sigma;
  if (cfg.c) m["c"] = *cfg.c;
  if (cfg.kappa) m["kappa"] = *cfg.kappa;
  j["model"] = m;
  j["solver"] = {{"tol", cfg.solver.tol},
                 {"max_iter", cfg.solver.max_iter},
                 {"damping", cfg.solver.damping},
                 {"quad_order", cfg.solver.quad_order},
                 {"grid_points", cfg.solver.grid_points},
                 {"grid_halfwidth", cfg.solver.grid_halfwidth}};
  json s;
  s["n_paths"] = cfg.sim.n_paths;
  s["n_steps"] = cfg.sim.n_steps;
  s["seed"] = cfg.sim.seed;
  if (cfg.sim.v_mode == VMode::FixedV) s["v"] = cfg.sim.fixed_v;
  j["sim"] = s;
  json formats = json::array();
  if (cfg.want_csv) formats.push_back("csv");
  if (cfg.want_json) formats.push_back("json");
  j["outputs"] = {{"dir", cfg.out_dir}, {"formats", formats}};
  return j;
}

std::string config_hash(const RunConfig& cfg) { return fnv1a_hex(config_to_json(cfg).dump()); }

json fixed_point_report_json(const FixedPointReport& rep, const std::string& phi_csv_path) {
  json j;
  j["lambda_fit"] = rep.lambda_fit;
  j["slope_fit"] = rep.slope_fit;
  j["residual"] = rep.residual;
  j["iterations"] = rep.iterations;
  j["phi_csv_path"] = phi_csv_path;
  json psi = json::array();
  const auto& atoms = rep.pair.psi.atom_values();
  const auto& vals = rep.pair.psi.values();
  for (std::size_t i = 0; i < atoms.size(); ++i) psi.push_back({atoms[i], vals[i]});
  j["psi"] = psi;
  j["psi_bounds"] = {{"lower_ok", rep.psi_lower_ok},
                     {"upper_sq_rate_ok", rep.psi_upper_sq_rate_ok},
                     {"upper_lin_rate_ok", rep.psi_upper_lin_rate_ok},
                     {"warning", rep.bounds_warning}};
  j["nonunique_flag"] = rep.nonunique_flag;
  j["alt_deviation"] = rep.alt_deviation;
  return j;
}

json gaussian_summary_json(const GaussianModel& model, const GaussianSummary& s) {
  json j;
  j["model"] = {{"mu", model.mu},       {"gamma", model.gamma}, {"sigma", model.sigma},
                {"c", model.c},         {"kappa", model.kappa_rate},
                {"lambda_star", model.lambda_star}};
  j["Lambda"] = s.Lambda;
  j["Lambda_prime"] = s.Lambda_prime;
  j["insider_wealth_exante"] = s.insider_wealth_exante;
  j["expected_penalty"] = s.expected_penalty;
  j["welfare"] = s.welfare;
  j["noise_loss"] = s.noise_loss;
  j["inefficiency_delta"] = s.inefficiency_delta;
  j["liquidity_gain_L"] = s.liquidity_gain_L;
  j["avg_entropy"] = s.avg_entropy;
  return j;
}

json mc_report_json(const McReport& rep, const SimConfig& cfg) {
  auto est = [](const Estimate& e) { return json{{"point", e.point}, {"se", e.se}}; };
  json j;
  j["estimates"] = {{"insider_wealth", est(rep.insider_wealth)},
                    {"expected_penalty", est(rep.expected_penalty)},
                    {"noise_loss", est(rep.noise_loss)},
                    {"terminal_posterior_variance", est(rep.terminal_posterior_variance)},
                    {"max_abs_mean_Y", est(rep.max_abs_mean_Y)},
                    {"max_var_ratio_dev", est(rep.max_var_ratio_dev)},
                    {"price_drift", est(rep.price_drift)}};
  j["brownian_diagnostics"] = {{"valid", rep.brownian_diagnostics_valid},
                               {"incr_skew", rep.incr_skew},
                               {"incr_excess_kurtosis", rep.incr_excess_kurtosis},
                               {"incr_autocorr1", rep.incr_autocorr1},
                               {"jarque_bera", rep.jarque_bera}};
  j["flagged_paths"] = rep.flagged;
  j["config"] = {{"n_paths", cfg.n_paths},
                 {"n_steps", cfg.n_steps},
                 {"seed", cfg.seed},
                 {"v_mode", cfg.v_mode == VMode::FixedV ? "fixed" : "sample"},
                 {"fixed_v", cfg.fixed_v}};
  return j;
}

}  // namespace kylepen::io
