#pragma once

#include <span>
#include <vector>

namespace effdyn {

/// Natural cubic spline on a uniform grid, continued linearly outside it
/// with the end-point slope.
class NaturalCubicSpline {
 public:
  NaturalCubicSpline() = default;
  NaturalCubicSpline(double x0, double h, std::vector<double> y);

  double operator()(double x) const;
  double derivative(double x) const;

  double x_min() const noexcept { return x0_; }
  double x_max() const noexcept { return x0_ + h_ * static_cast<double>(y_.size() - 1); }

 private:
  double x0_ = 0.0;
  double h_ = 1.0;
  std::vector<double> y_;
  std::vector<double> m_;  // second derivatives at the knots
};

}  // namespace effdyn
