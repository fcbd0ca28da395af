#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "kylepen/grid_function.hpp"

namespace kylepen {

// phi(y) = curvature * y^2 / 2 + slope0 * y. The closed-form carrier for the
// Gaussian equilibrium (curvature = lambda*, slope0 = mu).
struct QuadraticPhi {
  double curvature = 0.0;
  double slope0 = 0.0;
};

// psi(v) = offset + (v - center)^2 / (2 * denom). Closed-form carrier for the
// Gaussian equilibrium (center = mu, denom = c + lambda*).
struct QuadraticPsi {
  double offset = 0.0;
  double center = 0.0;
  double denom = 1.0;
};

// The function phi of a fixed-point pair, normalized so phi(0) = 0. Either a
// tabulated grid (with a shared spline for smooth off-node sampling) or a
// quadratic closed form.
class PhiFunction {
 public:
  explicit PhiFunction(GridFunction grid);
  explicit PhiFunction(QuadraticPhi q) : quad_(q) {}
  PhiFunction(double curvature, double slope0) : quad_(QuadraticPhi{curvature, slope0}) {}

  bool is_quadratic() const { return !grid_; }
  const QuadraticPhi& quadratic() const { return *quad_; }
  const GridFunction& grid() const { return *grid_; }

  // Piecewise-linear/tail semantics for grids, exact for quadratics.
  double eval(double y, int order = 0) const;
  // Smooth evaluation used inside integral operators (spline for grids).
  double smooth(double y) const;
  double smooth_deriv(double y) const;

  double left_slope() const;
  double right_slope() const;
  double y_min() const;
  double y_max() const;

 private:
  std::optional<QuadraticPhi> quad_;
  std::shared_ptr<const GridFunction> grid_;
  std::shared_ptr<const SplineEval> spline_;
};

// Psi on the support of Pi: values tabulated at atoms (together with the Pi
// masses of those atoms), or the quadratic closed form.
class PsiFunction {
 public:
  PsiFunction(std::vector<double> atoms, std::vector<double> values,
              std::vector<double> weights);
  explicit PsiFunction(QuadraticPsi q) : quad_(q) {}

  bool is_quadratic() const { return quad_.has_value(); }
  const QuadraticPsi& quadratic() const { return *quad_; }
  const std::vector<double>& atom_values() const { return atoms_; }
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& weights() const { return weights_; }

  // Exact at tabulated atoms (binary search with relative tolerance);
  // closed form everywhere for the quadratic carrier.
  double value(double v) const;

 private:
  std::optional<QuadraticPsi> quad_;
  std::vector<double> atoms_;
  std::vector<double> values_;
  std::vector<double> weights_;
};

// The pair (phi, psi) solving the two fixed-point identities.
struct ConvexPair {
  PhiFunction phi;
  PsiFunction psi;
};

}  // namespace kylepen
