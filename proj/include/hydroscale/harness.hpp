#ifndef HYDROSCALE_HARNESS_HPP_
#define HYDROSCALE_HARNESS_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "hydroscale/config.hpp"
#include "hydroscale/coupling.hpp"
#include "hydroscale/pde.hpp"
#include "hydroscale/simulator.hpp"

namespace hydroscale {

inline constexpr const char* kVersion = "0.1.0";

/// Ensemble mean of eta^l along axis 0 (2D: averaged over the other axis), one value per site.
struct LineProfile {
  std::int64_t big_n = 0;
  double t = 0.0;
  std::vector<double> x_over_n;
  std::vector<double> mean;
  std::vector<double> stderr_;
};

/// Empirical and solver values on the comparison cells of one (N, t).
struct ComparisonProfile {
  std::int64_t big_n = 0;
  double t = 0.0;
  std::vector<double> u;  // cell centres (axis 0; 2D cells are row-major)
  std::vector<double> empirical;
  std::vector<double> empirical_stderr;
  std::vector<double> solver;
};

struct ConvergenceRow {
  std::int64_t big_n = 0;
  double t = 0.0;
  double l1 = 0.0;
  double l1_stderr = 0.0;
};

struct EnsembleSummary {
  std::int64_t big_n = 0;
  std::int64_t side = 0;
  std::int64_t d_max = 0;
  std::int64_t block_half_width = 0;
  double gamma_n = 0.0;
  double kernel_rate = 0.0;
  RunStats stats;
  double wall_seconds = 0.0;
};

struct SolverSummary {
  std::string kind;  // nonlocal | entropy
  std::int64_t cells = 0;
  double window = 0.0;
  double gamma = 0.0;   // entropy branch speed
  double cutoff = 0.0;  // nonlocal jump cutoff
  SolveLog log;
  double wall_seconds = 0.0;
};

struct ConvergenceReport {
  ExperimentConfig config;
  std::vector<ConvergenceRow> rows;
  std::vector<ComparisonProfile> comparisons;
  std::vector<LineProfile> lines;
  std::vector<EnsembleSummary> ensembles;
  SolverSummary solver;
  std::vector<GridField> solver_snapshots;  // one per snapshot time
  double comparison_cell_width = 0.0;
};

/// Simulator ensembles for every N against one solver run: block averages with
/// l = max(1, floor(eps N)), ensemble means on the comparison cells (width 1/N_min over the
/// central half of the window), and L1 distances to the solver field filtered by the same
/// l-block average.
ConvergenceReport run_hydro_experiment(const ExperimentConfig& cfg);

/// Simulator ensembles only (no solver, no comparison).
ConvergenceReport run_simulation(const ExperimentConfig& cfg);

/// The matching PDE solution at every snapshot time.
ConvergenceReport run_solver(const ExperimentConfig& cfg);

/// l1_table.csv (N,t,l1,l1_stderr), comparison.csv, manifest.json (byte-stable) and timing.json.
void convergence_report_to_files(const ConvergenceReport& report, const std::string& dir);
/// profile_N<N>_t<t>.csv (x_over_N,eta_l_mean,eta_l_stderr) and manifest.json.
void simulation_report_to_files(const ConvergenceReport& report, const std::string& dir);
/// solution_t<t>.csv (u,rho; 2D u1,u2,rho) and manifest.json.
void solver_report_to_files(const ConvergenceReport& report, const std::string& dir);

std::string l1_table_csv(const ConvergenceReport& report);

struct OrderingReport {
  ExperimentConfig config;
  std::vector<OrderingRow> rows;
  double wall_seconds = 0.0;
};

OrderingReport run_ordering_experiment(const ExperimentConfig& cfg);
/// ordering.csv (N,d,unordered_time_integral,stderr) and manifest.json.
void ordering_report_to_files(const OrderingReport& report, const std::string& dir);
std::string ordering_csv(const OrderingReport& report);

/// rho,lambda,phi,psi,flux on rho_points equally spaced densities in [0, rho_max].
std::string equilibrium_csv(const ExperimentConfig& cfg);

/// Empirical line profile (ensemble mean of eta^l) of one N as a grid field on the lattice
/// sites, and the solver snapshot sampled on the same points; 1D only.
GridField empirical_field(const ConvergenceReport& report, std::int64_t big_n, std::size_t snapshot);
GridField solver_on_sites(const ConvergenceReport& report, std::int64_t big_n, std::size_t snapshot);

/// Linear interpolation of a grid field between cell centres; the boundary rule applies
/// beyond the outer centres.
double sample_field(const GridField& field, const MacroPoint& u);

}  // namespace hydroscale

#endif  // HYDROSCALE_HARNESS_HPP_
