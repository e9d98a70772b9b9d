#pragma once

#include <vector>

#include "robinfluct/geometry.hpp"

namespace robinfluct {

/// Piecewise-linear function of one variable, constant beyond the end knots.
class PiecewiseLinear {
 public:
  PiecewiseLinear() = default;
  PiecewiseLinear(std::vector<double> knots, std::vector<double> values);

  double operator()(double x) const;
  double min_value() const;
  double max_value() const;
  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> knots_;
  std::vector<double> values_;
};

/// Nonnegative bounded killing rate q(t, x). Either a constant or a separable
/// product q(t, x) = f(t) g(x_axis) of piecewise-linear tables.
class KillingRate {
 public:
  KillingRate() = default;
  static KillingRate constant(double q);
  static KillingRate separable(PiecewiseLinear time_factor, int axis,
                               PiecewiseLinear space_factor);

  double operator()(double t, const Point& x) const {
    if (kind_ == Kind::kConstant) return value_;
    return time_factor_(t) * space_factor_(x[axis_]);
  }

  bool is_constant() const { return kind_ == Kind::kConstant; }
  bool is_zero() const { return kind_ == Kind::kConstant && value_ == 0.0; }
  bool is_time_homogeneous() const;
  double constant_value() const { return value_; }
  double sup() const;
  /// Same rate multiplied by s (s may be negative; used for negative controls).
  KillingRate scaled(double s) const;

 private:
  enum class Kind { kConstant, kSeparable };
  Kind kind_ = Kind::kConstant;
  double value_ = 0.0;
  int axis_ = 0;
  PiecewiseLinear time_factor_;
  PiecewiseLinear space_factor_;
};

}  // namespace robinfluct
