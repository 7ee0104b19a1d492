#include "hydroscale/kernel.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "hydroscale/errors.hpp"

namespace hydroscale {

namespace {

double norm2(const Displacement& d) {
  double s = 0.0;
  for (int i = 0; i < kMaxDim; ++i) s += static_cast<double>(d[i]) * static_cast<double>(d[i]);
  return s;
}

double unit_ball_volume(int k) {
  return std::pow(std::numbers::pi, 0.5 * k) / std::tgamma(0.5 * k + 1.0);
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Euler-Maclaurin (through the B2 term) for sum_{k > D} k^{-s}, D a positive integer.
double zeta_tail(double s, double D) {
  return std::pow(D, 1.0 - s) / (s - 1.0) - 0.5 * std::pow(D, -s) +
         s * std::pow(D, -s - 1.0) / 12.0;
}

class CompensatedSum {
 public:
  void add(double x) {
    const double y = x - c_;
    const double t = sum_ + y;
    c_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double c_ = 0.0;
};

// Lexicographic walk over the box [lo, hi]^dim (coordinate 0 outermost).
template <typename Fn>
void for_each_in_box(int dim, std::int32_t lo, std::int32_t hi, Fn&& fn) {
  Displacement d{};
  for (int i = 0; i < dim; ++i) d[i] = lo;
  while (true) {
    fn(d);
    int axis = dim - 1;
    while (axis >= 0 && d[axis] == hi) {
      d[axis] = lo;
      --axis;
    }
    if (axis < 0) return;
    ++d[axis];
  }
}

// sum over the first orthant (coordinates >= 0, d != 0) of |d|^{-(n + excess)} for |d| > radius.
double orthant_tail_bound(int n, double excess, double radius) {
  const double root_n = std::sqrt(static_cast<double>(n));
  if (n >= 2 && radius - root_n < 1.0) {
    const auto far = static_cast<std::int32_t>(std::ceil(root_n)) + 2;
    double explicit_part = 0.0;
    for_each_in_box(n, 0, far, [&](const Displacement& d) {
      const double r = std::sqrt(norm2(d));
      if (r > radius && r <= far) explicit_part += std::pow(r, -(n + excess));
    });
    return explicit_part + orthant_tail_bound(n, excess, far);
  }
  double bound = 0.0;
  for (int m = 1; m <= n; ++m) {
    // Points with exactly m positive coordinates: compare each with the unit cube toward
    // the origin, which stays in the m-dimensional orthant at norm >= |d| - sqrt(m).
    double part = 0.0;
    const double e = n + excess - m;
    if (m == 1) {
      part = std::pow(std::floor(radius), -e) / e;
    } else {
      part = orthant_sphere_area(m) * std::pow(radius - std::sqrt(static_cast<double>(m)), -e) / e;
    }
    bound += binomial(n, m) * part;
  }
  return bound;
}

}  // namespace

Orientation Orientation::axis_weights(std::vector<double> b_plus, std::vector<double> b_minus) {
  if (b_plus.size() != b_minus.size() || b_plus.empty()) {
    throw DomainError("orientation: b_plus and b_minus must have one entry per axis");
  }
  for (std::size_t i = 0; i < b_plus.size(); ++i) {
    if (b_plus[i] < 0.0 || b_minus[i] < 0.0) throw DomainError("orientation: weights must be >= 0");
  }
  Orientation o;
  o.kind = Kind::kAxisWeights;
  o.b_plus = std::move(b_plus);
  o.b_minus = std::move(b_minus);
  return o;
}

Orientation Orientation::symmetric(int dim) {
  return axis_weights(std::vector<double>(static_cast<std::size_t>(dim), 1.0),
                      std::vector<double>(static_cast<std::size_t>(dim), 1.0));
}

AliasTable::AliasTable(const std::vector<double>& weights) {
  const std::size_t n = weights.size();
  if (n == 0) throw DomainError("alias table needs a nonempty support");
  double total = 0.0;
  for (double w : weights) total += w;
  prob_.assign(n, 0.0);
  alias_.assign(n, 0);
  std::vector<double> scaled(n);
  std::vector<std::uint32_t> small;
  std::vector<std::uint32_t> large;
  for (std::size_t i = 0; i < n; ++i) {
    scaled[i] = weights[i] * static_cast<double>(n) / total;
    (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
  }
  while (!small.empty() && !large.empty()) {
    const auto s = small.back();
    small.pop_back();
    const auto l = large.back();
    prob_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] = (scaled[l] + scaled[s]) - 1.0;
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  for (auto i : large) {
    prob_[i] = 1.0;
    alias_[i] = i;
  }
  for (auto i : small) {
    prob_[i] = 1.0;
    alias_[i] = i;
  }
}

std::size_t AliasTable::sample(Rng& rng) const {
  const auto n = prob_.size();
  auto i = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
  if (i >= n) i = n - 1;
  return uniform01(rng) < prob_[i] ? i : alias_[i];
}

JumpKernel::JumpKernel(int dim, double alpha, std::int64_t d_max, Orientation orientation)
    : dim_(dim), alpha_(alpha), d_max_(d_max), orientation_(std::move(orientation)) {
  if (dim < 1 || dim > kMaxDim) throw DomainError("kernel dimension must be in 1..3");
  if (!(alpha > 0.0)) throw DomainError("kernel requires alpha > 0");
  if (d_max < 1) throw DomainError("kernel requires d_max >= 1");
  if (d_max > (std::int64_t{1} << 30)) throw DomainError("kernel d_max too large");
  if (orientation_.kind == Orientation::Kind::kAxisWeights &&
      static_cast<int>(orientation_.b_plus.size()) != dim) {
    throw DomainError("orientation weights must match the kernel dimension");
  }
  const bool asym = orientation_.kind == Orientation::Kind::kTotallyAsymmetric;
  const auto hi = static_cast<std::int32_t>(d_max);
  const std::int32_t lo = asym ? 0 : -hi;
  const double r2_max = static_cast<double>(d_max) * static_cast<double>(d_max);
  for_each_in_box(dim, lo, hi, [&](const Displacement& d) {
    const double r2 = norm2(d);
    if (r2 == 0.0 || r2 > r2_max) return;
    const double w = jump_rate(d);
    if (w <= 0.0) return;
    support_.push_back(d);
    weights_.push_back(w);
  });
  if (support_.empty()) throw DomainError("kernel has empty support");
  CompensatedSum total;
  for (auto it = weights_.rbegin(); it != weights_.rend(); ++it) total.add(*it);
  total_truncated_ = total.value();
  alias_ = AliasTable(weights_);
}

double JumpKernel::beta(const Displacement& d) const {
  bool zero = true;
  for (int i = 0; i < dim_; ++i) zero = zero && d[i] == 0;
  if (zero) return 0.0;
  if (orientation_.kind == Orientation::Kind::kTotallyAsymmetric) {
    for (int i = 0; i < dim_; ++i) {
      if (d[i] < 0) return 0.0;
    }
    return 1.0;
  }
  double b = 0.0;
  for (int i = 0; i < dim_; ++i) {
    const auto k = static_cast<std::size_t>(i);
    if (d[i] >= 0) b += orientation_.b_plus[k];
    if (d[i] <= 0) b += orientation_.b_minus[k];
  }
  return b;
}

double JumpKernel::jump_rate(const Displacement& d) const {
  for (int i = dim_; i < kMaxDim; ++i) {
    if (d[i] != 0) throw DomainError("displacement has coordinates beyond the kernel dimension");
  }
  const double r2 = norm2(d);
  if (r2 == 0.0) throw DomainError("jump_rate: displacement must be nonzero");
  const double b = beta(d);
  if (b == 0.0) return 0.0;
  return b * std::pow(r2, -0.5 * (dim_ + alpha_));
}

double JumpKernel::tail_bound(double exponent_excess, double radius) const {
  const double orthant = orthant_tail_bound(dim_, exponent_excess, radius);
  if (orientation_.kind == Orientation::Kind::kTotallyAsymmetric) return orthant;
  double b = 0.0;
  for (int i = 0; i < dim_; ++i) {
    b += orientation_.b_plus[static_cast<std::size_t>(i)] +
         orientation_.b_minus[static_cast<std::size_t>(i)];
  }
  return std::ldexp(b, dim_) * orthant;
}

KernelSum JumpKernel::total_rate() const {
  KernelSum s;
  s.truncated = total_truncated_;
  const auto D = static_cast<double>(d_max_);
  s.tail_bound = tail_bound(alpha_, D);
  double orient = 1.0;
  if (orientation_.kind == Orientation::Kind::kAxisWeights) {
    double b = 0.0;
    for (int i = 0; i < dim_; ++i) {
      b += orientation_.b_plus[static_cast<std::size_t>(i)] +
           orientation_.b_minus[static_cast<std::size_t>(i)];
    }
    orient = dim_ == 1 ? b : std::ldexp(b, dim_ - 1);
  }
  if (dim_ == 1) {
    s.tail_estimate = orient * zeta_tail(1.0 + alpha_, D);
  } else {
    s.tail_estimate = orient * orthant_tail_integral(dim_, alpha_, D);
  }
  return s;
}

KernelSum JumpKernel::gamma_alpha() const {
  if (!(alpha_ > 1.0)) {
    throw DomainError("gamma_alpha requires alpha > 1 (the first moment diverges otherwise)");
  }
  if (orientation_.kind != Orientation::Kind::kTotallyAsymmetric) {
    throw DomainError("gamma_alpha is defined for the totally asymmetric kernel; use drift()");
  }
  CompensatedSum sum;
  for (std::size_t i = support_.size(); i-- > 0;) {
    sum.add(static_cast<double>(support_[i][0]) * weights_[i]);
  }
  KernelSum s;
  s.truncated = sum.value();
  const auto D = static_cast<double>(d_max_);
  s.tail_bound = orthant_tail_bound(dim_, alpha_ - 1.0, D);
  if (dim_ == 1) {
    s.tail_estimate = zeta_tail(alpha_, D);
  } else {
    // integral over the orthant shell of v_1 |v|^{-n-alpha}; the angular factor is
    // the (n-1)-ball volume over 2^{n-1}.
    s.tail_estimate = unit_ball_volume(dim_ - 1) / std::ldexp(1.0, dim_ - 1) *
                      std::pow(D, 1.0 - alpha_) / (alpha_ - 1.0);
  }
  return s;
}

std::array<double, kMaxDim> JumpKernel::drift() const {
  std::array<double, kMaxDim> m{};
  for (std::size_t i = 0; i < support_.size(); ++i) {
    for (int a = 0; a < dim_; ++a) m[a] += static_cast<double>(support_[i][a]) * weights_[i];
  }
  return m;
}

double gamma_n_scale(double alpha, std::int64_t big_n) {
  if (big_n < 2) throw DomainError("gamma_n_scale requires N >= 2");
  const auto n = static_cast<double>(big_n);
  if (alpha < 1.0) return std::pow(n, alpha);
  if (alpha == 1.0) return n / std::log(n);
  return n;
}

double orthant_sphere_area(int n) {
  const double full = 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
  return std::ldexp(full, -n);
}

double orthant_tail_integral(int n, double excess, double radius) {
  return orthant_sphere_area(n) * std::pow(radius, -excess) / excess;
}

}  // namespace hydroscale
