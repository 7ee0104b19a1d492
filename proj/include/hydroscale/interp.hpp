#ifndef HYDROSCALE_INTERP_HPP_
#define HYDROSCALE_INTERP_HPP_

#include <vector>

namespace hydroscale {

// Shape-preserving piecewise-cubic Hermite interpolant (Fritsch-Carlson) on a uniform grid.
// Reproduces linear data exactly.
class MonotoneCubic {
 public:
  MonotoneCubic() = default;
  MonotoneCubic(double x0, double step, std::vector<double> y);

  double operator()(double x) const;
  double derivative(double x) const;

  double x_min() const { return x0_; }
  double x_max() const { return x0_ + step_ * static_cast<double>(y_.size() - 1); }
  const std::vector<double>& values() const { return y_; }

 private:
  std::size_t locate(double x, double& t) const;

  double x0_ = 0.0;
  double step_ = 1.0;
  std::vector<double> y_;
  std::vector<double> slope_;
};

}  // namespace hydroscale

#endif  // HYDROSCALE_INTERP_HPP_
