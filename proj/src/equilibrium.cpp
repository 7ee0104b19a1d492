#include "hydroscale/equilibrium.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "hydroscale/errors.hpp"

namespace hydroscale {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRescaleAbove = 1e200;

double kahan_sum(const std::vector<double>& v) {
  double sum = 0.0;
  double c = 0.0;
  for (double x : v) {
    const double y = x - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
  return sum;
}

}  // namespace

EquilibriumTable::EquilibriumTable(RateModel model) : EquilibriumTable(std::move(model), Options{}) {}

EquilibriumTable::EquilibriumTable(RateModel model, Options options)
    : model_(std::move(model)), options_(options) {
  static std::atomic<std::uint64_t> next_id{1};
  id_ = next_id.fetch_add(1);
  if (model_.m0()) {
    lambda_c_ = kInf;
    rho_c_ = static_cast<double>(*model_.m0());
  } else {
    rho_c_ = kInf;
    if (auto lc = model_.lambda_c_closed_form()) {
      lambda_c_ = *lc;
    } else {
      // liminf g/h estimated over the upper half of the table.
      const std::int64_t k_max = std::max<std::int64_t>(2, model_.table_size() - 1);
      double est = kInf;
      for (std::int64_t k = std::max<std::int64_t>(1, k_max / 2); k <= k_max; ++k) {
        est = std::min(est, model_.g(k) / model_.h(k));
      }
      lambda_c_ = est;
      lambda_c_estimated_ = true;
    }
  }
}

EquilibriumTable::Series EquilibriumTable::series(double lambda) const {
  if (!(lambda >= 0.0) || lambda >= lambda_c_) {
    throw DomainError("fugacity " + std::to_string(lambda) + " outside [0, lambda_c=" +
                      std::to_string(lambda_c_) + ")");
  }
  Series s;
  s.w.push_back(1.0);
  auto ratio = [&](std::int64_t k) {
    // term(k + 1) / term(k)
    const double h = model_.h(k);
    if (h == 0.0 || lambda == 0.0) return 0.0;
    return lambda * h / model_.g(k + 1);
  };
  std::int64_t target = 32;
  while (true) {
    while (static_cast<std::int64_t>(s.w.size()) <= target) {
      const auto k = static_cast<std::int64_t>(s.w.size()) - 1;
      const double r = ratio(k);
      if (r == 0.0) return s;  // finite support, exact
      double next = s.w.back() * r;
      if (next > kRescaleAbove) {
        for (double& x : s.w) x /= kRescaleAbove;
        s.log_scale += std::log(kRescaleAbove);
        next /= kRescaleAbove;
      }
      s.w.push_back(next);
    }
    const double r_end = ratio(target);
    if (r_end < 1.0) {
      const double tail = s.w.back() * r_end / (1.0 - r_end);
      const double total = kahan_sum(s.w) + tail;
      if (tail < options_.eps_tail * total) {
        // Smallest K whose suffix mass (beyond K) is below eps_tail.
        double suffix = tail;
        auto keep = s.w.size();
        while (keep > 1 && suffix + s.w[keep - 1] < options_.eps_tail * total) {
          suffix += s.w[keep - 1];
          --keep;
        }
        s.w.resize(keep);
        return s;
      }
    }
    if (target * 2 > options_.k_budget) {
      throw ConvergenceError("partition function at lambda=" + std::to_string(lambda) +
                             " did not converge within " + std::to_string(options_.k_budget) +
                             " terms");
    }
    target *= 2;
  }
}

std::vector<double> EquilibriumTable::marginal_pmf(double lambda) const {
  Series s = series(lambda);
  const double z = kahan_sum(s.w);
  for (double& x : s.w) x /= z;
  return std::move(s.w);
}

double EquilibriumTable::partition_function(double lambda) const {
  const Series s = series(lambda);
  return kahan_sum(s.w) * std::exp(s.log_scale);
}

double EquilibriumTable::density_of_lambda(double lambda) const {
  const auto pmf = marginal_pmf(lambda);
  double mean = 0.0;
  for (std::size_t k = 1; k < pmf.size(); ++k) mean += static_cast<double>(k) * pmf[k];
  return mean;
}

void EquilibriumTable::check_density(double rho, bool allow_rho_c) const {
  const bool ok = rho >= 0.0 && (rho < rho_c_ || (allow_rho_c && rho == rho_c_));
  if (!ok) {
    throw DomainError("density " + std::to_string(rho) + " outside [0, rho_c=" +
                      std::to_string(rho_c_) + ")");
  }
}

double EquilibriumTable::lambda_of_density(double rho) const {
  check_density(rho, false);
  if (rho == 0.0) return 0.0;
  double lo = 0.0;
  double hi = 0.0;
  if (std::isfinite(lambda_c_)) {
    hi = 0.5 * lambda_c_;
    int guard = 0;
    while (density_of_lambda(hi) < rho) {
      lo = hi;
      hi = 0.5 * (hi + lambda_c_);
      if (++guard > options_.bisection_iterations || hi >= lambda_c_) {
        throw ConvergenceError("could not bracket density " + std::to_string(rho) +
                               " below lambda_c");
      }
    }
  } else {
    hi = std::max(1.0, rho);
    int guard = 0;
    while (density_of_lambda(hi) < rho) {
      lo = hi;
      hi *= 2.0;
      if (++guard > 1100) throw ConvergenceError("could not bracket density " + std::to_string(rho));
    }
  }
  double best = hi;
  double best_err = std::abs(density_of_lambda(hi) - rho);
  for (int it = 0; it < options_.bisection_iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double value = density_of_lambda(mid);
    const double err = std::abs(value - rho);
    if (err < best_err) {
      best_err = err;
      best = mid;
    }
    if (value < rho) {
      lo = mid;
    } else if (value > rho) {
      hi = mid;
    } else {
      break;
    }
  }
  if (best_err > options_.bisection_tolerance) {
    throw ConvergenceError("lambda_of_density(" + std::to_string(rho) + ") residual " +
                           std::to_string(best_err));
  }
  return best;
}

std::vector<double> EquilibriumTable::pmf_of_density(double rho) const {
  check_density(rho, true);
  if (rho == 0.0) return {1.0};
  if (rho == rho_c_) {
    std::vector<double> pmf(static_cast<std::size_t>(*model_.m0()) + 1, 0.0);
    pmf.back() = 1.0;
    return pmf;
  }
  return marginal_pmf(lambda_of_density(rho));
}

std::vector<double> EquilibriumTable::cdf_of_density(double rho) const {
  auto pmf = pmf_of_density(rho);
  std::partial_sum(pmf.begin(), pmf.end(), pmf.begin());
  pmf.back() = 1.0;
  return pmf;
}

double EquilibriumTable::phi(double rho) const {
  const auto pmf = pmf_of_density(rho);
  double e = 0.0;
  for (std::size_t k = 1; k < pmf.size(); ++k) e += model_.g(static_cast<std::int64_t>(k)) * pmf[k];
  return e;
}

double EquilibriumTable::psi(double rho) const {
  const auto pmf = pmf_of_density(rho);
  double e = 0.0;
  for (std::size_t k = 0; k < pmf.size(); ++k) e += model_.h(static_cast<std::int64_t>(k)) * pmf[k];
  return e;
}

std::int64_t inverse_cdf(const std::vector<double>& cdf, double u) {
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  if (it == cdf.end()) return static_cast<std::int64_t>(cdf.size()) - 1;
  return static_cast<std::int64_t>(it - cdf.begin());
}

std::int64_t EquilibriumTable::sample_occupation(double rho, Rng& rng) const {
  struct Cache {
    std::uint64_t id = 0;
    double rho = -1.0;
    std::vector<double> cdf;
  };
  thread_local Cache cache;
  if (cache.id != id_ || cache.rho != rho) {
    cache.cdf = cdf_of_density(rho);
    cache.id = id_;
    cache.rho = rho;
  }
  return inverse_cdf(cache.cdf, uniform01(rng));
}

FemResult EquilibriumTable::fem_check(double gamma, double lambda) const {
  if (!(gamma >= 0.0)) throw DomainError("fem_check: gamma must be >= 0");
  const Series base = series(lambda);
  const double tilted = lambda * std::exp(gamma);
  if (!(tilted < lambda_c_)) return {};
  try {
    const Series s = series(tilted);
    const double log_ratio =
        std::log(kahan_sum(s.w)) + s.log_scale - std::log(kahan_sum(base.w)) - base.log_scale;
    if (!std::isfinite(log_ratio)) return {};
    return {true, std::exp(log_ratio)};
  } catch (const ConvergenceError&) {
    return {};
  }
}

ConstitutiveTable::ConstitutiveTable(const EquilibriumTable& table, double rho_max,
                                     double step_fraction)
    : table_(table), rho_max_(std::min(rho_max, table.rho_c())), rho_c_(table.rho_c()) {
  if (!(rho_max_ > 0.0)) throw DomainError("ConstitutiveTable: rho_max must be positive");
  const auto cells = static_cast<std::size_t>(std::llround(1.0 / step_fraction));
  const double step = rho_max_ / static_cast<double>(cells);
  std::vector<double> phi(cells + 1);
  std::vector<double> psi(cells + 1);
  rho_.resize(cells + 1);
  lambda_.resize(cells + 1);
  for (std::size_t i = 0; i <= cells; ++i) {
    const double rho = i == cells ? rho_max_ : step * static_cast<double>(i);
    rho_[i] = rho;
    const auto pmf = table_.pmf_of_density(rho);
    lambda_[i] = (rho == rho_c_) ? std::numeric_limits<double>::infinity()
                                 : table_.lambda_of_density(rho);
    double e_g = 0.0;
    double e_h = 0.0;
    for (std::size_t k = 0; k < pmf.size(); ++k) {
      e_g += table_.model().g(static_cast<std::int64_t>(k)) * pmf[k];
      e_h += table_.model().h(static_cast<std::int64_t>(k)) * pmf[k];
    }
    phi[i] = e_g;
    psi[i] = e_h;
  }
  phi_ = MonotoneCubic(0.0, step, std::move(phi));
  psi_ = MonotoneCubic(0.0, step, std::move(psi));
}

double ConstitutiveTable::phi(double rho) const {
  if (rho >= 0.0 && rho <= rho_max_) return phi_(rho);
  return table_.phi(rho);
}

double ConstitutiveTable::psi(double rho) const {
  if (rho >= 0.0 && rho <= rho_max_) return psi_(rho);
  return table_.psi(rho);
}

}  // namespace hydroscale
