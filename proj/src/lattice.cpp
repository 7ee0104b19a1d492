#include "hydroscale/lattice.hpp"

#include <bit>

#include "hydroscale/errors.hpp"

namespace hydroscale {

Lattice::Lattice(int dim, std::int64_t side, std::int64_t scale_n)
    : dim_(dim), side_(side), scale_n_(scale_n) {
  if (dim < 1 || dim > kMaxDim) throw DomainError("lattice dimension must be in 1..3");
  if (side < 2) throw DomainError("lattice side must be >= 2");
  if (scale_n < 1) throw DomainError("lattice scale N must be >= 1");
  sites_ = 1;
  for (int i = dim - 1; i >= 0; --i) {
    stride_[static_cast<std::size_t>(i)] = sites_;
    sites_ *= side;
  }
}

MacroPoint Lattice::macro_point(std::int64_t site) const {
  MacroPoint u{};
  for (int i = 0; i < dim_; ++i) u[static_cast<std::size_t>(i)] = macro_coordinate(coordinate(site, i));
  return u;
}

std::int64_t Lattice::shift(std::int64_t site, const Displacement& d) const {
  std::int64_t out = site;
  for (int i = 0; i < dim_; ++i) {
    const auto a = static_cast<std::size_t>(i);
    const std::int64_t c = (site / stride_[a]) % side_;
    std::int64_t nc = (c + d[a]) % side_;
    if (nc < 0) nc += side_;
    out += (nc - c) * stride_[a];
  }
  return out;
}

std::int64_t Lattice::shift_no_wrap(std::int64_t site, const Displacement& d) const {
  std::int64_t out = site;
  for (int i = 0; i < dim_; ++i) {
    const auto a = static_cast<std::size_t>(i);
    const std::int64_t c = (site / stride_[a]) % side_;
    const std::int64_t nc = c + d[a];
    if (nc < 0 || nc >= side_) return -1;
    out += (nc - c) * stride_[a];
  }
  return out;
}

FenwickTree::FenwickTree(std::size_t n) : tree_(n + 1, 0.0), weights_(n, 0.0) {
  top_bit_ = n == 0 ? 0 : std::bit_floor(n);
}

void FenwickTree::assign(const std::vector<double>& weights) {
  weights_ = weights;
  const std::size_t n = weights_.size();
  tree_.assign(n + 1, 0.0);
  top_bit_ = n == 0 ? 0 : std::bit_floor(n);
  total_ = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    total_ += weights_[i];
    std::size_t j = i + 1;
    tree_[j] += weights_[i];
    const std::size_t parent = j + (j & (~j + 1));
    if (parent <= n) tree_[parent] += tree_[j];
  }
}

void FenwickTree::set(std::size_t i, double w) {
  const double delta = w - weights_[i];
  if (delta == 0.0) return;
  weights_[i] = w;
  total_ += delta;
  for (std::size_t j = i + 1; j < tree_.size(); j += j & (~j + 1)) tree_[j] += delta;
}

std::size_t FenwickTree::find(double target) const {
  std::size_t pos = 0;
  for (std::size_t step = top_bit_; step != 0; step >>= 1) {
    const std::size_t next = pos + step;
    if (next < tree_.size() && tree_[next] <= target) {
      pos = next;
      target -= tree_[next];
    }
  }
  // pos is the count of leading entries whose sum is <= target.
  std::size_t i = pos < weights_.size() ? pos : weights_.size() - 1;
  // Rounding can land on a zero-weight entry; step to the nearest positive one.
  if (weights_[i] == 0.0) {
    std::size_t lo = i;
    while (lo > 0 && weights_[lo] == 0.0) --lo;
    if (weights_[lo] > 0.0) return lo;
    while (i + 1 < weights_.size() && weights_[i] == 0.0) ++i;
  }
  return i;
}

double FenwickTree::recompute_total() const {
  double s = 0.0;
  for (double w : weights_) s += w;
  return s;
}

}  // namespace hydroscale
