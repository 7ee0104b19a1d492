#ifndef HYDROSCALE_LATTICE_HPP_
#define HYDROSCALE_LATTICE_HPP_

#include <array>
#include <cstdint>
#include <vector>

#include "hydroscale/kernel.hpp"
#include "hydroscale/profile.hpp"

namespace hydroscale {

/// The torus (Z / side Z)^dim viewed at scale N: site x sits at u = (x - side/2) / N.
/// Sites are stored row-major with axis 0 slowest.
class Lattice {
 public:
  Lattice(int dim, std::int64_t side, std::int64_t scale_n);

  int dim() const { return dim_; }
  std::int64_t side() const { return side_; }
  std::int64_t scale_n() const { return scale_n_; }
  std::int64_t sites() const { return sites_; }
  /// Window measure side / N per axis.
  double window() const { return static_cast<double>(side_) / static_cast<double>(scale_n_); }

  std::int64_t coordinate(std::int64_t site, int axis) const {
    return (site / stride_[static_cast<std::size_t>(axis)]) % side_;
  }
  MacroPoint macro_point(std::int64_t site) const;
  double macro_coordinate(std::int64_t x) const {
    return static_cast<double>(x - side_ / 2) / static_cast<double>(scale_n_);
  }

  /// site + d on the torus.
  std::int64_t shift(std::int64_t site, const Displacement& d) const;
  /// site + d, or -1 when some coordinate leaves [0, side).
  std::int64_t shift_no_wrap(std::int64_t site, const Displacement& d) const;

 private:
  int dim_;
  std::int64_t side_;
  std::int64_t scale_n_;
  std::int64_t sites_;
  std::array<std::int64_t, kMaxDim> stride_{};
};

/// Prefix sums over nonnegative site weights with logarithmic update and weighted search.
class FenwickTree {
 public:
  explicit FenwickTree(std::size_t n = 0);

  void assign(const std::vector<double>& weights);
  void set(std::size_t i, double w);
  double weight(std::size_t i) const { return weights_[i]; }
  double total() const { return total_; }
  /// Smallest index whose inclusive prefix sum exceeds target, for target in [0, total).
  std::size_t find(double target) const;
  double recompute_total() const;
  std::size_t size() const { return weights_.size(); }

 private:
  std::vector<double> tree_;
  std::vector<double> weights_;
  double total_ = 0.0;
  std::size_t top_bit_ = 0;
};

}  // namespace hydroscale

#endif  // HYDROSCALE_LATTICE_HPP_
