#ifndef HYDROSCALE_SIMULATOR_HPP_
#define HYDROSCALE_SIMULATOR_HPP_

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "hydroscale/equilibrium.hpp"
#include "hydroscale/kernel.hpp"
#include "hydroscale/lattice.hpp"
#include "hydroscale/model.hpp"
#include "hydroscale/profile.hpp"
#include "hydroscale/rng.hpp"

namespace hydroscale {

/// Occupancies of a misanthrope process on a torus window, with its clock and the
/// prefix-sum index over the site weights g(eta(x)).
class Configuration {
 public:
  Configuration(Lattice lattice, std::vector<std::int32_t> occupancy, RateModel model,
                double gamma_n);

  const Lattice& lattice() const { return lattice_; }
  const RateModel& model() const { return model_; }
  std::span<const std::int32_t> occupancy() const { return occupancy_; }
  std::int32_t operator[](std::int64_t site) const {
    return occupancy_[static_cast<std::size_t>(site)];
  }
  std::int64_t particle_count() const;

  double micro_time() const { return micro_time_; }
  double macro_time() const { return micro_time_ / gamma_n_; }
  double gamma_n() const { return gamma_n_; }
  void set_micro_time(double t) { micro_time_ = t; }

  /// Sum_x g(eta(x)) as maintained by the index.
  double weight_total() const { return index_.total(); }
  /// Sum_x g(eta(x)) recomputed from the occupancies.
  double recomputed_weight_total() const;
  std::int64_t pick_site(double u01) const {
    return static_cast<std::int64_t>(index_.find(u01 * index_.total()));
  }

  void move_particle(std::int64_t from, std::int64_t to);

 private:
  void refresh(std::int64_t site);

  Lattice lattice_;
  std::vector<std::int32_t> occupancy_;
  RateModel model_;
  FenwickTree index_;
  double gamma_n_;
  double micro_time_ = 0.0;
  std::uint64_t moves_since_rebuild_ = 0;
};

struct StepOptions {
  /// Reject displacements that leave the window instead of wrapping around the torus.
  bool no_wrap = false;
  /// Cap on proposals per run_until call.
  std::uint64_t max_events = std::numeric_limits<std::uint64_t>::max();
};

struct EventRecord {
  std::int64_t origin = -1;
  Displacement displacement{};
  std::int64_t target = -1;  // -1 when the proposal left the window in no_wrap mode
  bool accepted = false;
  bool frozen = false;  // total weight zero; the clock jumped to +infinity
};

struct RunStats {
  std::uint64_t proposals = 0;
  std::uint64_t accepted = 0;
  double acceptance_ratio() const {
    return proposals == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(proposals);
  }
  RunStats& operator+=(const RunStats& o) {
    proposals += o.proposals;
    accepted += o.accepted;
    return *this;
  }
};

/// One proposal of the thinned event engine: wait ~ Exp(h_sup W_trunc sum_x g(eta(x))),
/// origin x chosen proportional to g(eta(x)), d drawn from the kernel, accepted with
/// probability h(eta(x + d)) / h_sup.
EventRecord step(Configuration& config, const JumpKernel& kernel, Rng& rng,
                 const StepOptions& options = {});

/// Apply all events with micro time <= t_macro * gamma_N. Throws BudgetError (the
/// configuration keeps its partial state) when options.max_events proposals are exceeded.
RunStats run_until(Configuration& config, const JumpKernel& kernel, double t_macro, Rng& rng,
                   const StepOptions& options = {});

/// Independent site marginals Theta_{rho0(x/N)} for a fixed lattice, with the per-site
/// cdfs computed once (distinct densities share a table).
class InitialLaw {
 public:
  InitialLaw(const EquilibriumTable& table, const Lattice& lattice, const Profile& rho0);

  const Lattice& lattice() const { return lattice_; }
  double density(std::int64_t site) const { return density_[static_cast<std::size_t>(site)]; }
  const std::vector<double>& cdf(std::int64_t site) const {
    return cdfs_[cdf_index_[static_cast<std::size_t>(site)]];
  }
  std::vector<std::int32_t> sample_occupancy(Rng& rng) const;
  /// Occupancies drawn through a shared uniform per site (for comonotone coupling).
  std::vector<std::int32_t> occupancy_from_uniforms(std::span<const double> u) const;

 private:
  Lattice lattice_;
  std::vector<double> density_;
  std::vector<std::vector<double>> cdfs_;
  std::vector<std::uint32_t> cdf_index_;
};

/// Product initial configuration eta(x) ~ Theta_{rho0(x/N)} on the given lattice. When
/// flatten_seam is set, rho0 is first blended to rho_star near the window edge.
Configuration init_from_profile(const EquilibriumTable& table, const Profile& rho0,
                                const Lattice& lattice, double gamma_n, Rng& rng,
                                bool flatten_seam, double rho_star);

/// l-block averages eta^l(x) = (2l+1)^{-n} sum_{|y|_inf <= l} eta(x + y) on the torus.
struct EmpiricalField {
  Lattice lattice;
  std::int64_t half_width = 0;
  std::vector<std::int64_t> block_sums;  // exact integer numerators
  std::vector<double> values;

  double block_volume() const;
};

EmpiricalField block_average(std::span<const std::int32_t> occupancy, const Lattice& lattice,
                             std::int64_t l);
EmpiricalField block_average(const Configuration& config, std::int64_t l);

/// Young-measure diagnostic. The lattice is cut into coarse cells of cell_side sites per
/// axis. `counts` bins the block average at each coarse cell's centre (sums to the number
/// of cells); `per_cell` bins every site's block average inside each cell.
struct YoungHistogram {
  std::vector<double> bin_edges;
  std::vector<std::int64_t> counts;
  std::vector<std::vector<std::int64_t>> per_cell;
  std::int64_t cells = 0;
};

YoungHistogram young_histogram(const Configuration& config, std::int64_t l,
                               const std::vector<double>& bin_edges, std::int64_t cell_side);

/// Bin index for value v with edges e_0 < ... < e_B (B bins, last bin closed, out of range
/// values clamp to the end bins).
std::size_t bin_of(const std::vector<double>& edges, double v);

}  // namespace hydroscale

#endif  // HYDROSCALE_SIMULATOR_HPP_
