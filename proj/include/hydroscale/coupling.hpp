#ifndef HYDROSCALE_COUPLING_HPP_
#define HYDROSCALE_COUPLING_HPP_

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "hydroscale/equilibrium.hpp"
#include "hydroscale/kernel.hpp"
#include "hydroscale/lattice.hpp"
#include "hydroscale/model.hpp"
#include "hydroscale/profile.hpp"
#include "hydroscale/rng.hpp"
#include "hydroscale/simulator.hpp"

namespace hydroscale {

/// Two misanthrope configurations (eta, xi) on one torus under the basic coupling,
/// sharing a clock. The prefix-sum index holds max(g(eta(x)), g(xi(x))).
class CoupledConfiguration {
 public:
  enum class Order { kEqual, kEtaBelow, kEtaAbove, kUnordered };

  CoupledConfiguration(Lattice lattice, std::vector<std::int32_t> eta, std::vector<std::int32_t> xi,
                       RateModel model, double gamma_n);

  const Lattice& lattice() const { return lattice_; }
  const RateModel& model() const { return model_; }
  std::span<const std::int32_t> eta() const { return eta_; }
  std::span<const std::int32_t> xi() const { return xi_; }
  double micro_time() const { return micro_time_; }
  double macro_time() const { return micro_time_ / gamma_n_; }
  double gamma_n() const { return gamma_n_; }
  void set_micro_time(double t) { micro_time_ = t; }
  double weight_total() const { return index_.total(); }
  double recomputed_weight_total() const { return index_.recompute_total(); }
  std::int64_t pick_site(double u01) const {
    return static_cast<std::int64_t>(index_.find(u01 * index_.total()));
  }

  /// Sitewise relation over the whole torus.
  Order order() const;
  /// sum_x |eta(x) - xi(x)|
  std::int64_t discrepancy() const;

  void move(bool move_eta, bool move_xi, std::int64_t from, std::int64_t to);

 private:
  void refresh(std::int64_t site);
  void count_site(std::int64_t site, int sign);

  Lattice lattice_;
  std::vector<std::int32_t> eta_;
  std::vector<std::int32_t> xi_;
  RateModel model_;
  FenwickTree index_;
  double gamma_n_;
  double micro_time_ = 0.0;
  std::int64_t sites_above_ = 0;  // eta(x) > xi(x)
  std::int64_t sites_below_ = 0;  // eta(x) < xi(x)
};

struct CoupledEvent {
  enum class Branch { kNone, kBoth, kEtaOnly, kXiOnly };
  std::int64_t origin = -1;
  Displacement displacement{};
  std::int64_t target = -1;
  Branch branch = Branch::kNone;
  bool frozen = false;
};

struct CoupledStepOptions {
  bool no_wrap = false;
  /// For attractive models, throw std::logic_error if an event breaks a sitewise order
  /// that held before it.
  bool assert_order = false;
  std::uint64_t max_events = std::numeric_limits<std::uint64_t>::max();
};

/// One proposal of the coupled engine. With a = g(eta(x)) h(eta(y)), b = g(xi(x)) h(xi(y))
/// and bound B = max(g(eta(x)), g(xi(x))) h_sup, a variate v ~ U[0, B) selects: both move
/// (v < min(a, b)), only the faster one moves (v < max(a, b)), or nothing.
CoupledEvent coupled_step(CoupledConfiguration& cc, const JumpKernel& kernel, Rng& rng,
                          const CoupledStepOptions& options = {});

/// Inclusive box of lattice coordinates [lo_i, hi_i] (no wrap).
struct Region {
  std::array<std::int64_t, kMaxDim> lo{};
  std::array<std::int64_t, kMaxDim> hi{};

  static Region whole(const Lattice& lattice);
  /// Sites whose macro coordinates lie in [a, b] on every axis.
  static Region macro_box(const Lattice& lattice, double a, double b);
  bool contains(const Lattice& lattice, std::int64_t site) const;
};

struct UnorderedCounts {
  Displacement d{};
  std::int64_t unordered = 0;   // number of x with U_{x,d} = 1
  std::int64_t ordered_sum = 0;  // sum of O_{x,d}
};

/// U_{x,d} (eta and xi unordered on {x, x+d}) and O_{x,d} summed over x with x and x + d
/// both in the region.
std::vector<UnorderedCounts> unordered_statistics(const CoupledConfiguration& cc,
                                                  const std::vector<Displacement>& d_list,
                                                  const Region& region);

/// Maintains sum_x U_{x,d} incrementally and its time integral.
class UnorderedTracker {
 public:
  UnorderedTracker(const CoupledConfiguration& cc, std::vector<Displacement> d_list, Region region);

  void before_move(const CoupledConfiguration& cc, std::int64_t x, std::int64_t y);
  void after_move(const CoupledConfiguration& cc, std::int64_t x, std::int64_t y);
  void advance(double micro_dt);

  const std::vector<Displacement>& d_list() const { return d_list_; }
  const std::vector<std::int64_t>& counts() const { return counts_; }
  /// integral over micro time of the counts
  const std::vector<double>& micro_integrals() const { return integrals_; }

 private:
  void collect(const CoupledConfiguration& cc, std::int64_t x, std::int64_t y);
  int pair_unordered(const CoupledConfiguration& cc, std::int64_t base, std::size_t k) const;

  std::vector<Displacement> d_list_;
  Region region_;
  Lattice lattice_;
  std::vector<std::int64_t> counts_;
  std::vector<double> integrals_;
  std::vector<std::pair<std::size_t, std::int64_t>> touched_;
};

RunStats run_coupled_until(CoupledConfiguration& cc, const JumpKernel& kernel, double t_macro,
                           Rng& rng, const CoupledStepOptions& options = {},
                           UnorderedTracker* tracker = nullptr);

/// Per-site comonotone coupling of Theta_{rho0(x/N)} and Theta_c through one shared
/// uniform per site: eta(x) >= xi(x) wherever rho0(x/N) >= c and <= elsewhere.
CoupledConfiguration init_ordered_pair(const EquilibriumTable& table, const Profile& rho0,
                                       double c, const Lattice& lattice, double gamma_n, Rng& rng);

struct OrderingSetup {
  int dim = 1;
  double alpha = 2.0;
  Orientation orientation = Orientation::totally_asymmetric();
  double window_factor = 4.0;
  double t_macro = 1.0;
  std::size_t replicas = 32;
  std::vector<std::int64_t> n_list;
  std::vector<Displacement> d_list;
  /// Macro box [a, b]^n over which pairs are counted.
  double region_a = -1.0;
  double region_b = 1.0;
  std::uint64_t seed = 1;
  std::uint64_t max_events = std::numeric_limits<std::uint64_t>::max();
  unsigned workers = 0;
};

struct OrderingRow {
  std::int64_t big_n = 0;
  Displacement d{};
  double mean = 0.0;    // E int_0^t N^{-n} sum_x U_{x,d} ds
  double stderr_ = 0.0;
};

/// Coupled runs of mu^N (profile rho0, seam-flattened to rho_star) against nu_c.
std::vector<OrderingRow> ordering_experiment(const EquilibriumTable& table, const Profile& rho0,
                                             double rho_star, double c, const OrderingSetup& setup);

}  // namespace hydroscale

#endif  // HYDROSCALE_COUPLING_HPP_
