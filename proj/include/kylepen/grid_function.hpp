#pragma once

#include <functional>
#include <vector>

namespace kylepen {

// Convex function tabulated on a uniform grid with linear tail
// extrapolation. Carrier for phi. Immutable after construction.
//
// eval orders: 0 = piecewise-linear interpolation (linear tails),
// 1 = central/one-sided node differences interpolated (tail slopes outside),
// 2 = central second differences interpolated (0 outside).
class GridFunction {
 public:
  GridFunction(double y_min, double y_max, std::vector<double> values,
               double left_slope, double right_slope);

  static GridFunction tabulate(const std::function<double(double)>& f, double y_min,
                               double y_max, int n_points);
  static GridFunction tabulate(const std::function<double(double)>& f, double y_min,
                               double y_max, int n_points, double left_slope,
                               double right_slope);

  // Discrete-convexity test used by the constructor: second differences
  // >= -1e-9 * scale and tail slopes outside the boundary secants.
  static bool convex_data(const std::vector<double>& values, double h,
                          double left_slope, double right_slope);

  double eval(double y, int order = 0) const;

  double y_min() const { return y_min_; }
  double y_max() const { return y_max_; }
  double step() const { return h_; }
  int n_points() const { return static_cast<int>(values_.size()); }
  const std::vector<double>& values() const { return values_; }
  double left_slope() const { return left_slope_; }
  double right_slope() const { return right_slope_; }
  double value_at_node(int i) const { return values_[i]; }
  double node(int i) const { return y_min_ + h_ * i; }

  double sup_diff(const GridFunction& other) const;

 private:
  double y_min_, y_max_, h_;
  std::vector<double> values_;
  double left_slope_, right_slope_;
};

// Clamped cubic spline through the grid values (end derivatives = tail
// slopes), extended linearly beyond the grid. Used by the integral
// operators for off-node sampling; the public GridFunction::eval contract
// stays piecewise-linear.
class SplineEval {
 public:
  explicit SplineEval(const GridFunction& gf);

  double operator()(double y) const;
  double deriv(double y) const;

 private:
  double y_min_, y_max_, h_;
  double left_slope_, right_slope_;
  std::vector<double> values_;
  std::vector<double> second_;  // spline second derivatives at nodes
};

}  // namespace kylepen
