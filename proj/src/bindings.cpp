#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kylepen/bernoulli.hpp"
#include "kylepen/equilibrium.hpp"
#include "kylepen/errors.hpp"
#include "kylepen/fixed_point.hpp"
#include "kylepen/gaussian.hpp"
#include "kylepen/model.hpp"
#include "kylepen/simulate.hpp"

namespace py = pybind11;
using namespace kylepen;

PYBIND11_MODULE(_kylepen, m) {
  m.doc() = "Equilibrium of the continuous-time Kyle model with quadratic penalties";

  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainMembershipError", PyExc_ArithmeticError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<NonConvergence>(m, "NonConvergenceError", PyExc_RuntimeError);

  py::class_<ModelParams>(m, "ModelParams")
      .def(py::init<double, double, double>(), py::arg("sigma"), py::arg("c"),
           py::arg("mu_bar") = 0.0)
      .def_readonly("sigma", &ModelParams::sigma)
      .def_readonly("c", &ModelParams::c)
      .def_readonly("chat", &ModelParams::chat)
      .def_readonly("mu_bar", &ModelParams::mu_bar);

  py::class_<QuadratureRule>(m, "QuadratureRule")
      .def_readonly("nodes", &QuadratureRule::nodes)
      .def_readonly("weights", &QuadratureRule::weights);
  m.def("gauss_hermite", &gauss_hermite, py::arg("n"), py::arg("sigma") = 1.0);

  py::class_<ValueDistribution>(m, "ValueDistribution")
      .def_static("discrete", &ValueDistribution::discrete, py::arg("atoms"))
      .def_static("gaussian", &ValueDistribution::gaussian, py::arg("mu"), py::arg("gamma"))
      .def_static("quantile_map", &ValueDistribution::quantile_map, py::arg("f"),
                  py::arg("n_base_nodes"), py::arg("support_bound") = py::none())
      .def_static("point_mass", &ValueDistribution::point_mass, py::arg("v"))
      .def("mean", &ValueDistribution::mean)
      .def("variance", &ValueDistribution::variance)
      .def("mgf", &ValueDistribution::mgf, py::arg("r"))
      .def("support_bound", &ValueDistribution::support_bound)
      .def("atoms", &ValueDistribution::atoms, py::arg("order") = 120);

  py::class_<GridFunction>(m, "GridFunction")
      .def("eval", &GridFunction::eval, py::arg("y"), py::arg("order") = 0)
      .def_property_readonly("y_min", &GridFunction::y_min)
      .def_property_readonly("y_max", &GridFunction::y_max)
      .def_property_readonly("values", &GridFunction::values);

  py::class_<PhiFunction>(m, "PhiFunction")
      .def("eval", &PhiFunction::eval, py::arg("y"), py::arg("order") = 0)
      .def("is_quadratic", &PhiFunction::is_quadratic)
      .def("grid", &PhiFunction::grid, py::return_value_policy::reference_internal);

  py::class_<PsiFunction>(m, "PsiFunction")
      .def("value", &PsiFunction::value, py::arg("v"))
      .def("is_quadratic", &PsiFunction::is_quadratic)
      .def_property_readonly("atoms", &PsiFunction::atom_values)
      .def_property_readonly("values", &PsiFunction::values);

  py::class_<ConvexPair>(m, "ConvexPair")
      .def_readonly("phi", &ConvexPair::phi)
      .def_readonly("psi", &ConvexPair::psi);

  py::class_<FixedPointOptions>(m, "FixedPointOptions")
      .def(py::init<>())
      .def_readwrite("tol", &FixedPointOptions::tol)
      .def_readwrite("max_iter", &FixedPointOptions::max_iter)
      .def_readwrite("damping", &FixedPointOptions::damping)
      .def_readwrite("quad_order", &FixedPointOptions::quad_order)
      .def_readwrite("grid_points", &FixedPointOptions::grid_points)
      .def_readwrite("grid_halfwidth", &FixedPointOptions::grid_halfwidth)
      .def_readwrite("probe_uniqueness", &FixedPointOptions::probe_uniqueness);

  py::class_<FixedPointReport>(m, "FixedPointReport")
      .def_readonly("pair", &FixedPointReport::pair)
      .def_readonly("iterations", &FixedPointReport::iterations)
      .def_readonly("residual", &FixedPointReport::residual)
      .def_readonly("residual_history", &FixedPointReport::residual_history)
      .def_readonly("lambda_fit", &FixedPointReport::lambda_fit)
      .def_readonly("slope_fit", &FixedPointReport::slope_fit)
      .def_readonly("psi_lower", &FixedPointReport::psi_lower)
      .def_readonly("nonunique_flag", &FixedPointReport::nonunique_flag)
      .def_readonly("alt_deviation", &FixedPointReport::alt_deviation)
      .def_readonly("bounds_warning", &FixedPointReport::bounds_warning);

  m.def("apply_T1", &apply_T1, py::arg("phi"), py::arg("params"), py::arg("quad"),
        py::arg("v"));
  m.def("apply_T2", &apply_T2, py::arg("psi"), py::arg("dist"), py::arg("params"),
        py::arg("y"), py::arg("quad_order") = 120);
  m.def("apply_T", &apply_T, py::arg("phi"), py::arg("dist"), py::arg("params"),
        py::arg("quad"));
  m.def("solve_fixed_point", &solve_fixed_point, py::arg("dist"), py::arg("params"),
        py::arg("options") = FixedPointOptions{});
  m.def("pair_identity_deviation", &pair_identity_deviation, py::arg("pair"),
        py::arg("dist"), py::arg("params"), py::arg("quad_order") = 120);

  py::class_<GaussianModel>(m, "GaussianModel")
      .def_static("from_c", &GaussianModel::from_c, py::arg("mu"), py::arg("gamma"),
                  py::arg("sigma"), py::arg("c"))
      .def_static("from_kappa", &GaussianModel::from_kappa, py::arg("kappa"),
                  py::arg("gamma") = 1.0, py::arg("sigma") = 1.0, py::arg("mu") = 0.0)
      .def_readonly("mu", &GaussianModel::mu)
      .def_readonly("gamma", &GaussianModel::gamma)
      .def_readonly("sigma", &GaussianModel::sigma)
      .def_readonly("c", &GaussianModel::c)
      .def_readonly("kappa_rate", &GaussianModel::kappa_rate)
      .def_readonly("lambda_star", &GaussianModel::lambda_star)
      .def("Lambda", &GaussianModel::Lambda)
      .def("params", &GaussianModel::params)
      .def("distribution", &GaussianModel::distribution);

  py::class_<GaussianSummary>(m, "GaussianSummary")
      .def_readonly("lambda_star", &GaussianSummary::lambda_star)
      .def_readonly("Lambda", &GaussianSummary::Lambda)
      .def_readonly("Lambda_prime", &GaussianSummary::Lambda_prime)
      .def_readonly("insider_wealth_exante", &GaussianSummary::insider_wealth_exante)
      .def_readonly("expected_penalty", &GaussianSummary::expected_penalty)
      .def_readonly("welfare", &GaussianSummary::welfare)
      .def_readonly("noise_loss", &GaussianSummary::noise_loss)
      .def_readonly("inefficiency_delta", &GaussianSummary::inefficiency_delta)
      .def_readonly("liquidity_gain_L", &GaussianSummary::liquidity_gain_L)
      .def_readonly("avg_entropy", &GaussianSummary::avg_entropy);

  m.def("lambda_star", &lambda_star, py::arg("c"), py::arg("sigma"), py::arg("gamma"));
  m.def("Lambda", &Lambda, py::arg("kappa"));
  m.def("Lambda_prime", &Lambda_prime, py::arg("kappa"));
  m.def("gaussian_pair", &gaussian_pair, py::arg("model"));
  m.def("gaussian_summary", &gaussian_summary, py::arg("model"));
  m.def("speed_of_mean_reversion", &speed_of_mean_reversion, py::arg("t"), py::arg("kappa"));
  m.def("gaussian_rho", &gaussian_rho, py::arg("model"), py::arg("t"), py::arg("y"),
        py::arg("v"));
  m.def("gaussian_conditional_variance",
        static_cast<double (*)(const GaussianModel&, double)>(&conditional_variance),
        py::arg("model"), py::arg("t"));
  m.def("penalty_inflection_kappa0", &penalty_inflection_kappa0);
  m.def("penalty_argmax_kappa", &penalty_argmax_kappa);

  py::class_<BernoulliModel>(m, "BernoulliModel")
      .def_readonly("p", &BernoulliModel::p)
      .def_readonly("a", &BernoulliModel::a)
      .def_readonly("params", &BernoulliModel::params);
  m.def("make_bernoulli", &make_bernoulli, py::arg("p"), py::arg("params"),
        py::arg("quad_order") = 120);
  m.def("bernoulli_phi", &bernoulli_phi, py::arg("model"), py::arg("y"));
  m.def("bernoulli_psi0", &bernoulli_psi0, py::arg("model"));
  m.def("bernoulli_psi1", &bernoulli_psi1, py::arg("model"));
  m.def("bernoulli_pair", &bernoulli_pair, py::arg("model"), py::arg("grid_points") = 1601,
        py::arg("grid_halfwidth") = 8.0);

  py::class_<EquilibriumModel>(m, "EquilibriumModel")
      .def(py::init<ConvexPair, ValueDistribution, ModelParams, int, double>(),
           py::arg("pair"), py::arg("dist"), py::arg("params"),
           py::arg("quad_order") = 120, py::arg("fp_tol") = 1e-6)
      .def_property_readonly("pair", &EquilibriumModel::pair)
      .def_property_readonly("atom_v", &EquilibriumModel::atom_v)
      .def_property_readonly("atom_w", &EquilibriumModel::atom_w);
  m.def("rho_star", &rho_star, py::arg("em"), py::arg("t"), py::arg("y"), py::arg("v"));
  m.def("pricing_rule_H", &pricing_rule_H, py::arg("em"), py::arg("t"), py::arg("y"));
  m.def("alpha_star", &alpha_star, py::arg("em"), py::arg("t"), py::arg("y"), py::arg("v"));
  m.def("insider_value", &insider_value, py::arg("em"), py::arg("v"));
  m.def("psi_prime", &psi_prime, py::arg("em"), py::arg("v"));
  m.def("expected_penalty_per_v", &expected_penalty_per_v, py::arg("em"), py::arg("v"));
  m.def("noise_loss", &noise_loss, py::arg("em"));
  m.def("price_inefficiency", &price_inefficiency, py::arg("em"));
  m.def("conditional_variance",
        static_cast<double (*)(const EquilibriumModel&, double, double)>(&conditional_variance),
        py::arg("em"), py::arg("t"), py::arg("y"));
  m.def("value_function_J", &value_function_J, py::arg("em"), py::arg("t"), py::arg("y"),
        py::arg("v"));
  m.def("rho_normalization", &rho_normalization, py::arg("em"), py::arg("t"), py::arg("y"));

  py::enum_<VMode>(m, "VMode")
      .value("FixedV", VMode::FixedV)
      .value("SampleFromPi", VMode::SampleFromPi);
  py::class_<SimConfig>(m, "SimConfig")
      .def(py::init<>())
      .def_readwrite("n_paths", &SimConfig::n_paths)
      .def_readwrite("n_steps", &SimConfig::n_steps)
      .def_readwrite("seed", &SimConfig::seed)
      .def_readwrite("v_mode", &SimConfig::v_mode)
      .def_readwrite("fixed_v", &SimConfig::fixed_v);
  py::class_<Estimate>(m, "Estimate")
      .def_readonly("point", &Estimate::point)
      .def_readonly("se", &Estimate::se)
      .def("__repr__", [](const Estimate& e) {
        return "Estimate(point=" + std::to_string(e.point) + ", se=" + std::to_string(e.se) + ")";
      });
  py::class_<PathEnsemble>(m, "PathEnsemble")
      .def_readonly("flagged", &PathEnsemble::flagged)
      .def_readonly("times", &PathEnsemble::times)
      .def_readonly("mean_Y", &PathEnsemble::mean_Y)
      .def_readonly("var_Y", &PathEnsemble::var_Y)
      .def_readonly("mean_H", &PathEnsemble::mean_H)
      .def_property_readonly("n_paths",
                             [](const PathEnsemble& e) { return e.paths.size(); });
  py::class_<McReport>(m, "McReport")
      .def_readonly("insider_wealth", &McReport::insider_wealth)
      .def_readonly("expected_penalty", &McReport::expected_penalty)
      .def_readonly("noise_loss", &McReport::noise_loss)
      .def_readonly("terminal_posterior_variance", &McReport::terminal_posterior_variance)
      .def_readonly("max_abs_mean_Y", &McReport::max_abs_mean_Y)
      .def_readonly("max_var_ratio_dev", &McReport::max_var_ratio_dev)
      .def_readonly("price_drift", &McReport::price_drift)
      .def_readonly("brownian_diagnostics_valid", &McReport::brownian_diagnostics_valid)
      .def_readonly("incr_skew", &McReport::incr_skew)
      .def_readonly("incr_excess_kurtosis", &McReport::incr_excess_kurtosis)
      .def_readonly("incr_autocorr1", &McReport::incr_autocorr1)
      .def_readonly("flagged", &McReport::flagged);
  m.def("simulate", &simulate, py::arg("em"), py::arg("config"));
  m.def("mc_report", &mc_report, py::arg("ensemble"), py::arg("em"));

  py::class_<BridgeRow>(m, "BridgeRow")
      .def_readonly("kappa", &BridgeRow::kappa)
      .def_readonly("coefficient", &BridgeRow::coefficient)
      .def_readonly("se", &BridgeRow::se)
      .def_readonly("expected_Lambda", &BridgeRow::expected_Lambda);
  m.def("bridge_comparison", &bridge_comparison, py::arg("kappas"), py::arg("gamma") = 1.0,
        py::arg("sigma") = 1.0, py::arg("mu") = 0.0, py::arg("config") = SimConfig{});
}
