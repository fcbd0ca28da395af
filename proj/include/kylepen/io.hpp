#pragma once

#include <optional>
#include <string>

#include "json.hpp"
#include "kylepen/fixed_point.hpp"
#include "kylepen/gaussian.hpp"
#include "kylepen/model.hpp"
#include "kylepen/simulate.hpp"

namespace kylepen::io {

using nlohmann::json;

// {"type":"discrete","atoms":[[v,p],...]} | {"type":"gaussian","mu":..,"gamma":..}
ValueDistribution dist_from_json(const json& j);
json dist_to_json(const ValueDistribution& dist);

// CSV with header "y,value"; an optional leading "# ..." provenance line.
void write_grid_csv(const GridFunction& grid, const std::string& path,
                    const std::string& provenance = "");
GridFunction read_grid_csv(const std::string& path);

// 64-bit FNV-1a, hex-encoded; used to stamp artifacts with their config.
std::string fnv1a_hex(const std::string& text);

// Model + solver + simulation configuration for the CLI.
struct RunConfig {
  std::optional<ValueDistribution> dist;
  double sigma = 1.0;
  std::optional<double> c;
  std::optional<double> kappa;  // requires a Gaussian distribution
  FixedPointOptions solver;
  SimConfig sim;
  std::string out_dir = "out";
  bool want_csv = true;
  bool want_json = true;

  // Resolved penalty rate (from c or kappa).
  double resolved_c() const;
  ModelParams params() const;
};

RunConfig config_from_json(const json& j);
json config_to_json(const RunConfig& cfg);
std::string config_hash(const RunConfig& cfg);

json fixed_point_report_json(const FixedPointReport& rep, const std::string& phi_csv_path);
json gaussian_summary_json(const GaussianModel& model, const GaussianSummary& s);
json mc_report_json(const McReport& rep, const SimConfig& cfg);

}  // namespace kylepen::io
