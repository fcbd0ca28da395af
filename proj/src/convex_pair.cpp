#include "kylepen/convex_pair.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "kylepen/errors.hpp"

namespace kylepen {

PhiFunction::PhiFunction(GridFunction grid)
    : grid_(std::make_shared<GridFunction>(std::move(grid))) {
  spline_ = std::make_shared<SplineEval>(*grid_);
}

double PhiFunction::eval(double y, int order) const {
  if (quad_) {
    switch (order) {
      case 0: return 0.5 * quad_->curvature * y * y + quad_->slope0 * y;
      case 1: return quad_->curvature * y + quad_->slope0;
      case 2: return quad_->curvature;
      default: throw InvalidArgument("PhiFunction::eval: order must be 0, 1 or 2");
    }
  }
  return grid_->eval(y, order);
}

double PhiFunction::smooth(double y) const {
  if (quad_) return 0.5 * quad_->curvature * y * y + quad_->slope0 * y;
  return (*spline_)(y);
}

double PhiFunction::smooth_deriv(double y) const {
  if (quad_) return quad_->curvature * y + quad_->slope0;
  return spline_->deriv(y);
}

double PhiFunction::left_slope() const {
  if (quad_) return -std::numeric_limits<double>::infinity();
  return grid_->left_slope();
}

double PhiFunction::right_slope() const {
  if (quad_) return std::numeric_limits<double>::infinity();
  return grid_->right_slope();
}

double PhiFunction::y_min() const {
  if (quad_) return -std::numeric_limits<double>::infinity();
  return grid_->y_min();
}

double PhiFunction::y_max() const {
  if (quad_) return std::numeric_limits<double>::infinity();
  return grid_->y_max();
}

PsiFunction::PsiFunction(std::vector<double> atoms, std::vector<double> values,
                         std::vector<double> weights)
    : atoms_(std::move(atoms)), values_(std::move(values)), weights_(std::move(weights)) {
  if (atoms_.size() != values_.size() || atoms_.size() != weights_.size() || atoms_.empty())
    throw InvalidArgument("PsiFunction: atoms/values/weights size mismatch");
  if (!std::is_sorted(atoms_.begin(), atoms_.end()))
    throw InvalidArgument("PsiFunction: atoms must be ascending");
}

double PsiFunction::value(double v) const {
  if (quad_) {
    const double d = v - quad_->center;
    return quad_->offset + d * d / (2.0 * quad_->denom);
  }
  const auto it = std::lower_bound(atoms_.begin(), atoms_.end(), v - 1e-9);
  if (it != atoms_.end()) {
    const double tol = 1e-9 * std::max(1.0, std::abs(v));
    if (std::abs(*it - v) <= tol)
      return values_[static_cast<std::size_t>(it - atoms_.begin())];
  }
  throw InvalidArgument("PsiFunction: v=" + std::to_string(v) +
                        " is not a tabulated atom");
}

}  // namespace kylepen
