#include "kylepen/grid_function.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kylepen/errors.hpp"

namespace kylepen {

namespace {

double data_scale(const std::vector<double>& values) {
  double m = 1.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

GridFunction::GridFunction(double y_min, double y_max, std::vector<double> values,
                           double left_slope, double right_slope)
    : y_min_(y_min), y_max_(y_max), values_(std::move(values)),
      left_slope_(left_slope), right_slope_(right_slope) {
  const int n = static_cast<int>(values_.size());
  if (n < 3) throw InvalidArgument("GridFunction: need at least 3 points");
  if (!(y_min < 0.0 && 0.0 < y_max))
    throw InvalidArgument("GridFunction: grid must straddle 0");
  h_ = (y_max_ - y_min_) / (n - 1);
  // 0 must be an exact grid node.
  const double k = -y_min_ / h_;
  if (std::abs(k - std::round(k)) > 1e-9)
    throw InvalidArgument("GridFunction: 0 must be a grid node");
  if (!convex_data(values_, h_, left_slope_, right_slope_))
    throw InvalidArgument("GridFunction: tabulated data is not convex");
}

bool GridFunction::convex_data(const std::vector<double>& values, double h,
                               double left_slope, double right_slope) {
  const int n = static_cast<int>(values.size());
  if (n < 3) return false;
  const double tol = 1e-9 * data_scale(values);
  for (int i = 1; i + 1 < n; ++i) {
    if (values[i + 1] - 2.0 * values[i] + values[i - 1] < -tol) return false;
  }
  const double first_secant = (values[1] - values[0]) / h;
  const double last_secant = (values[n - 1] - values[n - 2]) / h;
  const double slope_tol = tol / h;
  return left_slope <= first_secant + slope_tol && right_slope >= last_secant - slope_tol;
}

GridFunction GridFunction::tabulate(const std::function<double(double)>& f, double y_min,
                                    double y_max, int n_points) {
  if (n_points < 3) throw InvalidArgument("tabulate: need at least 3 points");
  const double h = (y_max - y_min) / (n_points - 1);
  std::vector<double> values(n_points);
  for (int i = 0; i < n_points; ++i) values[i] = f(y_min + h * i);
  // Tails continue the boundary secants.
  const double ls = (values[1] - values[0]) / h;
  const double rs = (values[n_points - 1] - values[n_points - 2]) / h;
  return GridFunction(y_min, y_max, std::move(values), ls, rs);
}

GridFunction GridFunction::tabulate(const std::function<double(double)>& f, double y_min,
                                    double y_max, int n_points, double left_slope,
                                    double right_slope) {
  if (n_points < 3) throw InvalidArgument("tabulate: need at least 3 points");
  const double h = (y_max - y_min) / (n_points - 1);
  std::vector<double> values(n_points);
  for (int i = 0; i < n_points; ++i) values[i] = f(y_min + h * i);
  return GridFunction(y_min, y_max, std::move(values), left_slope, right_slope);
}

double GridFunction::eval(double y, int order) const {
  const int n = n_points();
  if (order == 0) {
    if (y <= y_min_) return values_.front() + left_slope_ * (y - y_min_);
    if (y >= y_max_) return values_.back() + right_slope_ * (y - y_max_);
    const double s = (y - y_min_) / h_;
    int i = static_cast<int>(s);
    i = std::min(i, n - 2);
    const double w = s - i;
    return values_[i] * (1.0 - w) + values_[i + 1] * w;
  }
  if (order == 1) {
    if (y <= y_min_) return left_slope_;
    if (y >= y_max_) return right_slope_;
    auto node_deriv = [&](int i) {
      if (i == 0) return (-3.0 * values_[0] + 4.0 * values_[1] - values_[2]) / (2.0 * h_);
      if (i == n - 1)
        return (3.0 * values_[n - 1] - 4.0 * values_[n - 2] + values_[n - 3]) / (2.0 * h_);
      return (values_[i + 1] - values_[i - 1]) / (2.0 * h_);
    };
    const double s = (y - y_min_) / h_;
    int i = static_cast<int>(s);
    i = std::min(i, n - 2);
    const double w = s - i;
    return node_deriv(i) * (1.0 - w) + node_deriv(i + 1) * w;
  }
  if (order == 2) {
    if (y <= y_min_ || y >= y_max_) return 0.0;
    auto node_d2 = [&](int i) {
      i = std::clamp(i, 1, n - 2);
      return (values_[i + 1] - 2.0 * values_[i] + values_[i - 1]) / (h_ * h_);
    };
    const double s = (y - y_min_) / h_;
    int i = static_cast<int>(s);
    i = std::min(i, n - 2);
    const double w = s - i;
    return node_d2(i) * (1.0 - w) + node_d2(i + 1) * w;
  }
  throw InvalidArgument("GridFunction::eval: order must be 0, 1 or 2");
}

double GridFunction::sup_diff(const GridFunction& other) const {
  double m = 0.0;
  for (int i = 0; i < n_points(); ++i)
    m = std::max(m, std::abs(values_[i] - other.eval(node(i))));
  return m;
}

SplineEval::SplineEval(const GridFunction& gf)
    : y_min_(gf.y_min()), y_max_(gf.y_max()), h_(gf.step()),
      left_slope_(gf.left_slope()), right_slope_(gf.right_slope()),
      values_(gf.values()) {
  // Clamped spline: f'(y_min) = left_slope, f'(y_max) = right_slope, so the
  // spline joins the linear tails with a continuous derivative.
  const int n = static_cast<int>(values_.size());
  second_.assign(n, 0.0);
  std::vector<double> diag(n), rhs(n), sub(n);
  diag[0] = 2.0 * h_;
  rhs[0] = 6.0 * ((values_[1] - values_[0]) / h_ - left_slope_);
  for (int i = 1; i + 1 < n; ++i) {
    diag[i] = 4.0 * h_;
    rhs[i] = 6.0 * (values_[i + 1] - 2.0 * values_[i] + values_[i - 1]) / h_;
  }
  diag[n - 1] = 2.0 * h_;
  rhs[n - 1] = 6.0 * (right_slope_ - (values_[n - 1] - values_[n - 2]) / h_);
  // Thomas algorithm, off-diagonals all equal to h.
  for (int i = 1; i < n; ++i) {
    const double m = h_ / diag[i - 1];
    diag[i] -= m * h_;
    rhs[i] -= m * rhs[i - 1];
  }
  second_[n - 1] = rhs[n - 1] / diag[n - 1];
  for (int i = n - 2; i >= 0; --i)
    second_[i] = (rhs[i] - h_ * second_[i + 1]) / diag[i];
}

double SplineEval::operator()(double y) const {
  if (y <= y_min_) return values_.front() + left_slope_ * (y - y_min_);
  if (y >= y_max_) return values_.back() + right_slope_ * (y - y_max_);
  const double s = (y - y_min_) / h_;
  int i = static_cast<int>(s);
  i = std::min<int>(i, static_cast<int>(values_.size()) - 2);
  const double a = (i + 1) - s;
  const double b = s - i;
  return a * values_[i] + b * values_[i + 1] +
         ((a * a * a - a) * second_[i] + (b * b * b - b) * second_[i + 1]) * (h_ * h_) / 6.0;
}

double SplineEval::deriv(double y) const {
  if (y <= y_min_) return left_slope_;
  if (y >= y_max_) return right_slope_;
  const double s = (y - y_min_) / h_;
  int i = static_cast<int>(s);
  i = std::min<int>(i, static_cast<int>(values_.size()) - 2);
  const double a = (i + 1) - s;
  const double b = s - i;
  return (values_[i + 1] - values_[i]) / h_ +
         (-(3.0 * a * a - 1.0) * second_[i] + (3.0 * b * b - 1.0) * second_[i + 1]) * h_ / 6.0;
}

}  // namespace kylepen
