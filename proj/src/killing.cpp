#include "robinfluct/killing.hpp"

#include <algorithm>
#include <stdexcept>

namespace robinfluct {

PiecewiseLinear::PiecewiseLinear(std::vector<double> knots, std::vector<double> values)
    : knots_(std::move(knots)), values_(std::move(values)) {
  if (knots_.empty() || knots_.size() != values_.size())
    throw std::invalid_argument("PiecewiseLinear: knots and values must be nonempty and equal length");
  for (std::size_t i = 1; i < knots_.size(); ++i)
    if (!(knots_[i] > knots_[i - 1]))
      throw std::invalid_argument("PiecewiseLinear: knots must be strictly increasing");
}

double PiecewiseLinear::operator()(double x) const {
  if (x <= knots_.front()) return values_.front();
  if (x >= knots_.back()) return values_.back();
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - knots_.begin());
  const double w = (x - knots_[i - 1]) / (knots_[i] - knots_[i - 1]);
  return (1.0 - w) * values_[i - 1] + w * values_[i];
}

double PiecewiseLinear::min_value() const {
  return *std::min_element(values_.begin(), values_.end());
}

double PiecewiseLinear::max_value() const {
  return *std::max_element(values_.begin(), values_.end());
}

KillingRate KillingRate::constant(double q) {
  if (!(q >= 0.0)) throw std::invalid_argument("KillingRate: q must be nonnegative");
  KillingRate r;
  r.value_ = q;
  return r;
}

KillingRate KillingRate::separable(PiecewiseLinear time_factor, int axis,
                                   PiecewiseLinear space_factor) {
  if (time_factor.min_value() < 0.0 || space_factor.min_value() < 0.0)
    throw std::invalid_argument("KillingRate: separable factors must be nonnegative");
  if (axis < 0 || axis >= kMaxDim) throw std::invalid_argument("KillingRate: bad axis");
  KillingRate r;
  r.kind_ = Kind::kSeparable;
  r.axis_ = axis;
  r.time_factor_ = std::move(time_factor);
  r.space_factor_ = std::move(space_factor);
  return r;
}

bool KillingRate::is_time_homogeneous() const {
  if (kind_ == Kind::kConstant) return true;
  return time_factor_.min_value() == time_factor_.max_value();
}

double KillingRate::sup() const {
  if (kind_ == Kind::kConstant) return std::abs(value_);
  return std::max(std::abs(time_factor_.max_value()), std::abs(time_factor_.min_value())) *
         std::max(std::abs(space_factor_.max_value()), std::abs(space_factor_.min_value()));
}

KillingRate KillingRate::scaled(double s) const {
  KillingRate r = *this;
  if (kind_ == Kind::kConstant) {
    r.value_ *= s;
  } else {
    std::vector<double> v = time_factor_.values();
    for (double& x : v) x *= s;
    r.time_factor_ = PiecewiseLinear(time_factor_.knots(), std::move(v));
  }
  return r;
}

}  // namespace robinfluct
