#ifndef HYDROSCALE_MODEL_HPP_
#define HYDROSCALE_MODEL_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hydroscale {

/// Rate functions of a decomposable misanthrope process, b(l, m) = g(l) h(m).
///
/// A particle leaves a site holding l particles for a site holding m particles
/// at rate p(d) g(l) h(m). Builtin models are closed forms; tabulated models
/// extrapolate g linearly with slope kappa and h by its last entry.
class RateModel {
 public:
  enum class Kind { kZeroRange, kZeroRangeCapped, kExclusion, kTabulated };

  /// g(k) = k, h = 1.
  static RateModel zero_range();
  /// g(k) = min(k, cap), h = 1. cap = 1 gives the constant-rate zero-range process.
  static RateModel zero_range_capped(int cap);
  /// g(k) = 1(k >= 1), h(m) = 1(m = 0).
  static RateModel exclusion();
  /// g and h given on 0..size-1. Missing kappa / h_sup are computed from the tables.
  static RateModel tabulated(std::vector<double> g, std::vector<double> h,
                             std::optional<double> kappa = std::nullopt,
                             std::optional<double> h_sup = std::nullopt);

  double g(std::int64_t k) const;
  double h(std::int64_t m) const;

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  double kappa() const { return kappa_; }
  double h_sup() const { return h_sup_; }
  double kappa1() const { return 2.0 * h_sup_; }
  /// Maximal occupancy M0 = min{m : h(m) = 0}; empty when h never vanishes.
  std::optional<std::int64_t> m0() const { return m0_; }
  /// g nondecreasing and h nonincreasing over the model's natural range.
  bool attractive() const { return attractive_; }
  /// liminf g/h when it is known in closed form (builtins); infinity is +inf.
  std::optional<double> lambda_c_closed_form() const { return lambda_c_; }
  /// Last tabulated index (tabulated models) or 0.
  std::int64_t table_size() const { return static_cast<std::int64_t>(g_table_.size()); }
  /// Range over which g and h are meaningful for checks: M0 + 1 if finite, else a probe bound.
  std::int64_t natural_range() const;

 private:
  RateModel() = default;
  void finish();

  Kind kind_ = Kind::kZeroRange;
  std::string name_;
  int cap_ = 0;
  std::vector<double> g_table_;
  std::vector<double> h_table_;
  double kappa_ = 0.0;
  double h_sup_ = 0.0;
  std::optional<std::int64_t> m0_;
  std::optional<double> lambda_c_;
  bool attractive_ = false;
};

struct Violation {
  std::string invariant;
  std::int64_t i = -1;
  std::int64_t j = -1;
  std::string detail;
};

struct ValidationReport {
  std::vector<Violation> violations;
  std::vector<std::string> notes;

  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

/// Checks the structural assumptions on (g, h) over 0..k_max (0..min(k_max, M0 + 1) when
/// M0 is finite). Each violated invariant is listed once, with its first offending index.
ValidationReport validate_rates(const RateModel& model, std::int64_t k_max);

/// True iff g is nondecreasing and h nonincreasing on [0, k_max].
bool check_attractive(const RateModel& model, std::int64_t k_max);

}  // namespace hydroscale

#endif  // HYDROSCALE_MODEL_HPP_
