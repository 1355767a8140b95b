#include "effdyn/spline.hpp"

#include <algorithm>
#include <cmath>

#include "effdyn/error.hpp"

namespace effdyn {

NaturalCubicSpline::NaturalCubicSpline(double x0, double h, std::vector<double> y)
    : x0_(x0), h_(h), y_(std::move(y)), m_(y_.size(), 0.0) {
  const std::size_t n = y_.size();
  if (n < 3) throw Error("spline needs at least three knots");
  if (!(h > 0.0)) throw Error("spline spacing must be positive");
  // Thomas algorithm for m_{i-1} + 4 m_i + m_{i+1} = 6 (y_{i+1} - 2 y_i + y_{i-1}) / h^2,
  // with m_0 = m_{n-1} = 0.
  const std::size_t k = n - 2;
  std::vector<double> c(k), d(k);
  for (std::size_t i = 0; i < k; ++i) {
    const double rhs = 6.0 * (y_[i + 2] - 2.0 * y_[i + 1] + y_[i]) / (h * h);
    if (i == 0) {
      c[i] = 1.0 / 4.0;
      d[i] = rhs / 4.0;
    } else {
      const double denom = 4.0 - c[i - 1];
      c[i] = 1.0 / denom;
      d[i] = (rhs - d[i - 1]) / denom;
    }
  }
  for (std::size_t i = k; i-- > 0;) {
    m_[i + 1] = d[i] - (i + 1 < k ? c[i] * m_[i + 2] : 0.0);
  }
}

double NaturalCubicSpline::operator()(double x) const {
  const std::size_t n = y_.size();
  const double t = (x - x0_) / h_;
  if (t <= 0.0) return y_.front() + derivative(x0_) * (x - x0_);
  if (t >= static_cast<double>(n - 1)) return y_.back() + derivative(x_max()) * (x - x_max());
  const std::size_t i = std::min(static_cast<std::size_t>(t), n - 2);
  const double a = static_cast<double>(i + 1) - t;  // weight of knot i
  const double b = t - static_cast<double>(i);      // weight of knot i+1
  return a * y_[i] + b * y_[i + 1] +
         ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h_ * h_ / 6.0;
}

double NaturalCubicSpline::derivative(double x) const {
  const std::size_t n = y_.size();
  double t = (x - x0_) / h_;
  t = std::clamp(t, 0.0, static_cast<double>(n - 1));
  const std::size_t i = std::min(static_cast<std::size_t>(t), n - 2);
  const double a = static_cast<double>(i + 1) - t;
  const double b = t - static_cast<double>(i);
  return (y_[i + 1] - y_[i]) / h_ +
         (-(3.0 * a * a - 1.0) * m_[i] + (3.0 * b * b - 1.0) * m_[i + 1]) * h_ / 6.0;
}

}  // namespace effdyn
