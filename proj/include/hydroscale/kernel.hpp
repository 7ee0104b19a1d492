#ifndef HYDROSCALE_KERNEL_HPP_
#define HYDROSCALE_KERNEL_HPP_

#include <array>
#include <cstdint>
#include <vector>

#include "hydroscale/rng.hpp"

namespace hydroscale {

inline constexpr int kMaxDim = 3;

/// Lattice displacement; coordinates beyond the kernel dimension are zero.
using Displacement = std::array<std::int32_t, kMaxDim>;

/// Direction weights of the jump law.
///
/// The default is totally asymmetric: beta(d) = 1(d > 0), d > 0 meaning every
/// coordinate >= 0 and d != 0. AxisWeights uses
///   beta(y) = sum_i [b_i^+ 1(y_i >= 0) + b_i^- 1(y_i <= 0)] 1(y != 0),
/// which for n = 1 and (b^+, b^-) = (1, 0) coincides with the default.
struct Orientation {
  enum class Kind { kTotallyAsymmetric, kAxisWeights };
  Kind kind = Kind::kTotallyAsymmetric;
  std::vector<double> b_plus;
  std::vector<double> b_minus;

  static Orientation totally_asymmetric() { return {}; }
  static Orientation axis_weights(std::vector<double> b_plus, std::vector<double> b_minus);
  /// b_i^+ = b_i^- = 1.
  static Orientation symmetric(int dim);
};

/// A truncated lattice sum with its dropped tail.
struct KernelSum {
  double truncated = 0.0;
  double tail_estimate = 0.0;  // asymptotic value of the dropped part
  double tail_bound = 0.0;     // rigorous upper bound on the dropped part
  double value() const { return truncated + tail_estimate; }
};

/// Walker/Vose alias table: O(1) draws from a finite discrete law.
class AliasTable {
 public:
  AliasTable() = default;
  explicit AliasTable(const std::vector<double>& weights);

  std::size_t sample(Rng& rng) const;
  std::size_t size() const { return prob_.size(); }

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
};

/// Heavy-tailed jump law p(d) = beta(d) / |d|^{n + alpha} truncated to |d| <= d_max
/// (Euclidean norm). The truncated law is not renormalised.
class JumpKernel {
 public:
  JumpKernel(int dim, double alpha, std::int64_t d_max,
             Orientation orientation = Orientation::totally_asymmetric());

  int dim() const { return dim_; }
  double alpha() const { return alpha_; }
  std::int64_t d_max() const { return d_max_; }
  const Orientation& orientation() const { return orientation_; }

  /// beta(d) / |d|^{n + alpha}, ignoring the truncation radius.
  double jump_rate(const Displacement& d) const;

  /// W = sum_d p(d): truncated sum over the enumerated support plus the dropped tail.
  KernelSum total_rate() const;
  /// Sum of the enumerated weights (the rate actually simulated).
  double truncated_total() const { return total_truncated_; }

  /// gamma_alpha = sum_{d>0} d_1 / |d|^{n + alpha}; requires alpha > 1 and the
  /// totally asymmetric orientation.
  KernelSum gamma_alpha() const;

  /// sum_d d p(d) over the enumerated support.
  std::array<double, kMaxDim> drift() const;

  /// Draw d with probability p(d) / truncated_total().
  const Displacement& sample_displacement(Rng& rng) const {
    return support_[alias_.sample(rng)];
  }

  const std::vector<Displacement>& support() const { return support_; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  double beta(const Displacement& d) const;
  double tail_bound(double exponent_excess, double radius) const;

  int dim_;
  double alpha_;
  std::int64_t d_max_;
  Orientation orientation_;
  std::vector<Displacement> support_;
  std::vector<double> weights_;
  double total_truncated_ = 0.0;
  AliasTable alias_;
};

/// Time scale gamma_N: N^alpha (alpha < 1), N / ln N (alpha = 1), N (alpha > 1).
double gamma_n_scale(double alpha, std::int64_t big_n);

/// Surface area of the part of the unit (n-1)-sphere in the first orthant of R^n.
double orthant_sphere_area(int n);

/// Tail of sum_{d >= 1, |d| > radius} over the first orthant of |d|^{-(n + excess)}:
/// the spherical-shell integral sigma_n radius^{-excess} / excess.
double orthant_tail_integral(int n, double excess, double radius);

}  // namespace hydroscale

#endif  // HYDROSCALE_KERNEL_HPP_
