#include "hydroscale/interp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hydroscale {

namespace {

double end_slope(double d0, double d1) {
  // Three-point one-sided estimate, limited to keep monotonicity.
  double s = 1.5 * d0 - 0.5 * d1;
  if (s * d0 <= 0.0) return 0.0;
  if (d0 * d1 < 0.0 && std::abs(s) > 3.0 * std::abs(d0)) s = 3.0 * d0;
  return s;
}

}  // namespace

MonotoneCubic::MonotoneCubic(double x0, double step, std::vector<double> y)
    : x0_(x0), step_(step), y_(std::move(y)) {
  if (y_.size() < 2 || !(step_ > 0.0)) throw std::invalid_argument("MonotoneCubic: need >= 2 points");
  const std::size_t n = y_.size();
  std::vector<double> secant(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) secant[i] = (y_[i + 1] - y_[i]) / step_;
  slope_.assign(n, 0.0);
  if (n == 2) {
    slope_[0] = slope_[1] = secant[0];
    return;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double a = secant[i - 1];
    const double b = secant[i];
    if (a == b) {
      slope_[i] = a;
    } else if (a * b <= 0.0) {
      slope_[i] = 0.0;
    } else {
      slope_[i] = 2.0 * a * b / (a + b);
    }
  }
  slope_[0] = secant[0] == secant[1] ? secant[0] : end_slope(secant[0], secant[1]);
  slope_[n - 1] = secant[n - 2] == secant[n - 3] ? secant[n - 2]
                                                 : end_slope(secant[n - 2], secant[n - 3]);
}

std::size_t MonotoneCubic::locate(double x, double& t) const {
  const double s = (x - x0_) / step_;
  const auto last = static_cast<double>(y_.size() - 2);
  double cell = std::floor(s);
  cell = std::clamp(cell, 0.0, last);
  t = s - cell;
  return static_cast<std::size_t>(cell);
}

double MonotoneCubic::operator()(double x) const {
  if (x <= x0_) return y_.front();
  if (x >= x_max()) return y_.back();
  double t = 0.0;
  const std::size_t i = locate(x, t);
  if (t == 0.0) return y_[i];
  if (t == 1.0) return y_[i + 1];
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
  const double h10 = t3 - 2.0 * t2 + t;
  const double h01 = -2.0 * t3 + 3.0 * t2;
  const double h11 = t3 - t2;
  return h00 * y_[i] + h10 * step_ * slope_[i] + h01 * y_[i + 1] + h11 * step_ * slope_[i + 1];
}

double MonotoneCubic::derivative(double x) const {
  double t = 0.0;
  const std::size_t i = locate(x, t);
  const double t2 = t * t;
  const double d00 = 6.0 * t2 - 6.0 * t;
  const double d10 = 3.0 * t2 - 4.0 * t + 1.0;
  const double d01 = -6.0 * t2 + 6.0 * t;
  const double d11 = 3.0 * t2 - 2.0 * t;
  return (d00 * y_[i] + d01 * y_[i + 1]) / step_ + d10 * slope_[i] + d11 * slope_[i + 1];
}

}  // namespace hydroscale
