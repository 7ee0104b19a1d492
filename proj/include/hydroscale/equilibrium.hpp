#ifndef HYDROSCALE_EQUILIBRIUM_HPP_
#define HYDROSCALE_EQUILIBRIUM_HPP_

#include <cstdint>
#include <vector>

#include "hydroscale/interp.hpp"
#include "hydroscale/model.hpp"
#include "hydroscale/rng.hpp"

namespace hydroscale {

struct FemResult {
  bool finite = false;
  double value = 0.0;  // E[exp(gamma eta)] = Z(lambda e^gamma) / Z(lambda) when finite
};

/// Product invariant measures of a decomposable misanthrope process.
///
/// The site marginal at fugacity lambda is
///   Theta(k) = lambda^k prod_{j<k} h(j) / prod_{j<=k} g(j) / Z(lambda),
/// truncated adaptively at the smallest K whose tail mass is below eps_tail.
/// The tail estimate is a geometric bound from the term ratio, which is rigorous
/// when the ratio lambda h(k) / g(k+1) is eventually nonincreasing (attractive models).
class EquilibriumTable {
 public:
  struct Options {
    double eps_tail = 1e-12;
    std::int64_t k_budget = std::int64_t{1} << 22;
    int bisection_iterations = 200;
    double bisection_tolerance = 1e-10;
  };

  explicit EquilibriumTable(RateModel model);
  EquilibriumTable(RateModel model, Options options);

  const RateModel& model() const { return model_; }
  const Options& options() const { return options_; }
  double lambda_c() const { return lambda_c_; }
  /// True when lambda_c was estimated from a finite table rather than known exactly.
  bool lambda_c_is_estimate() const { return lambda_c_estimated_; }
  /// M0 when finite, otherwise +infinity (assumed, see validate_rates notes).
  double rho_c() const { return rho_c_; }

  std::vector<double> marginal_pmf(double lambda) const;
  double partition_function(double lambda) const;
  double density_of_lambda(double lambda) const;
  double lambda_of_density(double rho) const;

  /// Theta_rho. Also accepts rho = rho_c when M0 is finite (point mass at M0).
  std::vector<double> pmf_of_density(double rho) const;
  std::vector<double> cdf_of_density(double rho) const;

  double phi(double rho) const;
  double psi(double rho) const;

  std::int64_t sample_occupation(double rho, Rng& rng) const;

  FemResult fem_check(double gamma, double lambda) const;

 private:
  struct Series {
    std::vector<double> w;  // scaled weights, w[k] * exp(log_scale) is the raw term
    double log_scale = 0.0;
  };
  Series series(double lambda) const;
  void check_density(double rho, bool allow_rho_c) const;

  RateModel model_;
  Options options_;
  double lambda_c_ = 0.0;
  bool lambda_c_estimated_ = false;
  std::uint64_t id_ = 0;  // shared by copies; keys the per-thread sampling cache
  double rho_c_ = 0.0;
};

/// Inverse-cdf draw from a cumulative table.
std::int64_t inverse_cdf(const std::vector<double>& cdf, double u);

/// Phi, Psi and lambda tabulated on a uniform rho grid over [0, rho_max] with
/// monotone cubic interpolation, for use by the PDE solvers. Queries beyond the
/// grid fall back to the exact (slow) evaluation.
class ConstitutiveTable {
 public:
  /// rho_max is clamped to rho_c when M0 is finite. Grid step = step_fraction * rho_max.
  ConstitutiveTable(const EquilibriumTable& table, double rho_max, double step_fraction = 1e-3);

  double phi(double rho) const;
  double psi(double rho) const;
  double flux(double rho) const { return phi(rho) * psi(rho); }
  double rho_max() const { return rho_max_; }
  const RateModel& model() const { return table_.model(); }
  const EquilibriumTable& table() const { return table_; }
  double rho_c() const { return rho_c_; }
  const std::vector<double>& rho_grid() const { return rho_; }
  const std::vector<double>& lambda_grid() const { return lambda_; }
  const MonotoneCubic& phi_interp() const { return phi_; }
  const MonotoneCubic& psi_interp() const { return psi_; }

 private:
  EquilibriumTable table_;
  double rho_max_;
  double rho_c_;
  std::vector<double> rho_;
  std::vector<double> lambda_;
  MonotoneCubic phi_;
  MonotoneCubic psi_;
};

}  // namespace hydroscale

#endif  // HYDROSCALE_EQUILIBRIUM_HPP_
