#ifndef HYDROSCALE_CONFIG_HPP_
#define HYDROSCALE_CONFIG_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hydroscale/kernel.hpp"
#include "hydroscale/model.hpp"

namespace hydroscale {

/// Flat `key = value` text. `#` starts a comment; blank lines are ignored; lists are
/// comma separated. Every accessor throws ConfigError on malformed values.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(const std::string& text);
  static KeyValueConfig load(const std::string& path);

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { entries_[key] = value; }
  std::string text(const std::string& key, const std::string& fallback) const;
  double real(const std::string& key, double fallback) const;
  std::int64_t integer(const std::string& key, std::int64_t fallback) const;
  std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback) const;
  bool boolean(const std::string& key, bool fallback) const;
  std::vector<double> reals(const std::string& key, std::vector<double> fallback) const;
  std::vector<std::int64_t> integers(const std::string& key,
                                     std::vector<std::int64_t> fallback) const;
  /// Throws ConfigError naming the first key outside `allowed`.
  void require_known(const std::set<std::string>& allowed) const;
  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

/// Model by name: exclusion, zero_range, zero_range_capped(c), tabulated(g0 g1 ...; h0 h1 ...).
RateModel parse_model(const std::string& spec);

enum class Branch {
  kAnomalous,  // alpha < 1: nonlocal equation, gamma_N = N^alpha
  kLog,        // alpha = 1: Burgers with gamma = 1, gamma_N = N / ln N
  kEuler,      // alpha > 1: Burgers with gamma_alpha, gamma_N = N
};

Branch branch_of(double alpha);
const char* branch_name(Branch b);

struct ExperimentConfig {
  std::string model = "exclusion";
  double alpha = 2.0;
  int dim = 1;
  std::string orientation = "asymmetric";
  std::vector<std::int64_t> n_list{64};
  std::int64_t replicas = 16;
  double block_fraction = 0.05;
  std::optional<std::int64_t> l_block;
  std::string profile = "bump(0.6,0.5)";
  double rho_star = 0.2;
  std::vector<double> t_snapshots{0.0, 0.25, 0.5, 1.0};
  std::uint64_t seed = 1;
  double window_factor = 4.0;
  bool no_wrap = false;
  std::uint64_t max_events = std::uint64_t{1} << 40;
  unsigned workers = 0;
  // Solver.
  std::string solver = "auto";  // auto | nonlocal | entropy
  std::int64_t cells = 0;       // 0: window * N_max per axis
  double cfl = 0.45;
  double safety = 0.5;
  // Coupling.
  double coupling_c = 0.5;
  std::vector<std::int64_t> d_list{1};
  double region_a = -1.0;
  double region_b = 1.0;
  double t_end = 1.0;
  // Equilibrium table export.
  std::optional<double> rho_max;
  std::int64_t rho_points = 101;

  Branch branch() const { return branch_of(alpha); }
  Orientation kernel_orientation() const;
  std::int64_t block_half_width(std::int64_t big_n) const;
};

/// Reads and validates an experiment config; unknown keys and inconsistent values throw
/// ConfigError.
ExperimentConfig parse_experiment_config(const KeyValueConfig& kv);

/// Canonical key = value rendering of every field (manifests, reproduction).
std::map<std::string, std::string> describe(const ExperimentConfig& cfg);

/// Shortest round-trip decimal text of x ("%.17g" trimmed to the fewest digits that read back).
std::string format_real(double x);

}  // namespace hydroscale

#endif  // HYDROSCALE_CONFIG_HPP_
