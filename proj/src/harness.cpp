#include "hydroscale/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <sstream>

#include "hydroscale/errors.hpp"
#include "hydroscale/parallel.hpp"
#include "json.hpp"

namespace hydroscale {

namespace {

using Json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

constexpr std::uint64_t kHydroTag = 0x687964726fULL;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Setup {
  RateModel model;
  EquilibriumTable table;
  ConstitutiveTable constitutive;
  Profile profile;
  double window;
};

double table_range(const ExperimentConfig& cfg, const EquilibriumTable& table) {
  const double sup = std::max(profile_sup(cfg.profile, cfg.rho_star), cfg.rho_star);
  if (std::isfinite(table.rho_c())) return table.rho_c();
  return std::max(1.0, 1.25 * sup);
}

Setup make_setup(const ExperimentConfig& cfg) {
  RateModel model = parse_model(cfg.model);
  EquilibriumTable table(model);
  const double rho_max = table_range(cfg, table);
  ConstitutiveTable constitutive(table, rho_max);
  return {model, table, constitutive, make_profile(cfg.profile, cfg.rho_star, cfg.dim),
          cfg.window_factor};
}

std::int64_t side_of(const ExperimentConfig& cfg, std::int64_t big_n) {
  const double exact = cfg.window_factor * static_cast<double>(big_n);
  const auto side = static_cast<std::int64_t>(std::llround(exact));
  if (std::abs(exact - static_cast<double>(side)) > 1e-9) {
    throw ConfigError("window_factor * N must be an integer (N = " + std::to_string(big_n) + ")");
  }
  return side;
}

Profile solver_profile(const ExperimentConfig& cfg, const Setup& s) {
  if (cfg.no_wrap) return s.profile;
  return flatten_to_far_field(s.profile, cfg.rho_star, s.window, cfg.dim);
}

// Separable circular box sums of half-width l, divided by the block volume.
std::vector<double> box_filter(std::vector<double> v, const Lattice& lat, std::int64_t l) {
  const std::int64_t side = lat.side();
  const std::int64_t lines = lat.sites() / side;
  std::vector<double> line(static_cast<std::size_t>(side));
  std::vector<double> out(static_cast<std::size_t>(side));
  for (int axis = 0; axis < lat.dim(); ++axis) {
    const std::int64_t stride = (lat.dim() == 2 && axis == 0) ? side : 1;
    for (std::int64_t k = 0; k < lines; ++k) {
      const std::int64_t base = lat.dim() == 1 ? 0 : (axis == 0 ? k : k * side);
      for (std::int64_t m = 0; m < side; ++m) {
        line[static_cast<std::size_t>(m)] = v[static_cast<std::size_t>(base + m * stride)];
      }
      for (std::int64_t m = 0; m < side; ++m) {
        double acc = 0.0;
        for (std::int64_t y = -l; y <= l; ++y) {
          acc += line[static_cast<std::size_t>(((m + y) % side + side) % side)];
        }
        out[static_cast<std::size_t>(m)] = acc;
      }
      for (std::int64_t m = 0; m < side; ++m) {
        v[static_cast<std::size_t>(base + m * stride)] = out[static_cast<std::size_t>(m)];
      }
    }
  }
  const double vol = std::pow(static_cast<double>(2 * l + 1), lat.dim());
  for (double& x : v) x /= vol;
  return v;
}

// Comparison cells: width 1/N_min per axis over the central half of the window.
struct CellGeometry {
  std::int64_t per_axis = 0;  // cells per axis
  std::int64_t block = 0;     // sites per cell per axis
  std::int64_t first = 0;     // first site coordinate of cell 0
  double width = 0.0;
  double u0 = 0.0;            // left edge of cell 0
};

CellGeometry cell_geometry(const ExperimentConfig& cfg, std::int64_t big_n) {
  const std::int64_t n_min = cfg.n_list.front();
  if (big_n % n_min != 0) throw ConfigError("every N must be a multiple of the smallest N");
  const double exact = 0.5 * cfg.window_factor * static_cast<double>(n_min);
  const auto per_axis = static_cast<std::int64_t>(std::llround(exact));
  if (std::abs(exact - static_cast<double>(per_axis)) > 1e-9 || per_axis % 2 != 0 || per_axis < 2) {
    throw ConfigError("window_factor * N_min must be a positive multiple of 4");
  }
  CellGeometry g;
  g.per_axis = per_axis;
  g.block = big_n / n_min;
  const std::int64_t side = side_of(cfg, big_n);
  g.first = side / 2 - (per_axis / 2) * g.block;
  g.width = 1.0 / static_cast<double>(n_min);
  g.u0 = -0.5 * static_cast<double>(per_axis) * g.width;
  return g;
}

std::vector<double> cell_means(const std::vector<double>& site_values, const Lattice& lat,
                               const CellGeometry& g) {
  const std::int64_t side = lat.side();
  if (lat.dim() == 1) {
    std::vector<double> out(static_cast<std::size_t>(g.per_axis), 0.0);
    for (std::int64_t c = 0; c < g.per_axis; ++c) {
      double acc = 0.0;
      for (std::int64_t m = 0; m < g.block; ++m) {
        acc += site_values[static_cast<std::size_t>(g.first + c * g.block + m)];
      }
      out[static_cast<std::size_t>(c)] = acc / static_cast<double>(g.block);
    }
    return out;
  }
  std::vector<double> out(static_cast<std::size_t>(g.per_axis * g.per_axis), 0.0);
  for (std::int64_t a = 0; a < g.per_axis; ++a) {
    for (std::int64_t b = 0; b < g.per_axis; ++b) {
      double acc = 0.0;
      for (std::int64_t m = 0; m < g.block; ++m) {
        for (std::int64_t k = 0; k < g.block; ++k) {
          const std::int64_t x0 = g.first + a * g.block + m;
          const std::int64_t x1 = g.first + b * g.block + k;
          acc += site_values[static_cast<std::size_t>(x0 * side + x1)];
        }
      }
      out[static_cast<std::size_t>(a * g.per_axis + b)] =
          acc / static_cast<double>(g.block * g.block);
    }
  }
  return out;
}

std::vector<double> line_of(const std::vector<double>& site_values, const Lattice& lat) {
  if (lat.dim() == 1) return site_values;
  const std::int64_t side = lat.side();
  std::vector<double> out(static_cast<std::size_t>(side), 0.0);
  for (std::int64_t a = 0; a < side; ++a) {
    double acc = 0.0;
    for (std::int64_t b = 0; b < side; ++b) acc += site_values[static_cast<std::size_t>(a * side + b)];
    out[static_cast<std::size_t>(a)] = acc / static_cast<double>(side);
  }
  return out;
}

struct MeanStderr {
  std::vector<double> mean;
  std::vector<double> stderr_;
};

MeanStderr aggregate(const std::vector<std::vector<double>>& samples) {
  MeanStderr out;
  const std::size_t r = samples.size();
  const std::size_t n = samples.front().size();
  out.mean.assign(n, 0.0);
  out.stderr_.assign(n, 0.0);
  for (const auto& s : samples) {
    for (std::size_t i = 0; i < n; ++i) out.mean[i] += s[i];
  }
  for (double& m : out.mean) m /= static_cast<double>(r);
  if (r < 2) return out;
  for (const auto& s : samples) {
    for (std::size_t i = 0; i < n; ++i) {
      const double d = s[i] - out.mean[i];
      out.stderr_[i] += d * d;
    }
  }
  for (double& v : out.stderr_) v = std::sqrt(v / static_cast<double>(r - 1) / static_cast<double>(r));
  return out;
}

struct EnsembleResult {
  EnsembleSummary summary;
  std::vector<LineProfile> lines;                 // per snapshot
  std::vector<MeanStderr> cells;                  // per snapshot
};

EnsembleResult run_ensemble(const ExperimentConfig& cfg, const Setup& s, std::int64_t big_n,
                            bool with_cells) {
  const auto start = Clock::now();
  const std::int64_t side = side_of(cfg, big_n);
  const Lattice lat(cfg.dim, side, big_n);
  const JumpKernel kernel(cfg.dim, cfg.alpha, side / 2, cfg.kernel_orientation());
  const double gamma_n = gamma_n_scale(cfg.alpha, big_n);
  const std::int64_t l = cfg.block_half_width(big_n);
  if (2 * l + 1 > side) throw ConfigError("block half-width too large for N = " + std::to_string(big_n));
  const Profile shaped =
      cfg.no_wrap ? s.profile : flatten_to_far_field(s.profile, cfg.rho_star, lat.window(), cfg.dim);
  const InitialLaw law(s.table, lat, shaped);
  CellGeometry geom;
  if (with_cells) geom = cell_geometry(cfg, big_n);

  const auto replicas = static_cast<std::size_t>(cfg.replicas);
  const std::size_t snaps = cfg.t_snapshots.size();
  std::vector<std::vector<std::vector<double>>> line_samples(
      snaps, std::vector<std::vector<double>>(replicas));
  std::vector<std::vector<std::vector<double>>> cell_samples(
      snaps, std::vector<std::vector<double>>(replicas));
  std::vector<RunStats> stats(replicas);
  StepOptions opts;
  opts.no_wrap = cfg.no_wrap;
  opts.max_events = cfg.max_events;
  parallel_for(
      replicas,
      [&](std::size_t r) {
        Rng rng = make_stream(cfg.seed, kHydroTag, static_cast<std::uint64_t>(big_n), r);
        Configuration conf(lat, law.sample_occupancy(rng), s.model, gamma_n);
        for (std::size_t k = 0; k < snaps; ++k) {
          stats[r] += run_until(conf, kernel, cfg.t_snapshots[k], rng, opts);
          const EmpiricalField field = block_average(conf, l);
          line_samples[k][r] = line_of(field.values, lat);
          if (with_cells) cell_samples[k][r] = cell_means(field.values, lat, geom);
        }
      },
      cfg.workers);

  EnsembleResult out;
  out.summary.big_n = big_n;
  out.summary.side = side;
  out.summary.d_max = side / 2;
  out.summary.block_half_width = l;
  out.summary.gamma_n = gamma_n;
  out.summary.kernel_rate = kernel.truncated_total();
  for (const auto& st : stats) out.summary.stats += st;
  for (std::size_t k = 0; k < snaps; ++k) {
    const MeanStderr agg = aggregate(line_samples[k]);
    LineProfile line;
    line.big_n = big_n;
    line.t = cfg.t_snapshots[k];
    for (std::int64_t x = 0; x < side; ++x) line.x_over_n.push_back(lat.macro_coordinate(x));
    line.mean = agg.mean;
    line.stderr_ = agg.stderr_;
    out.lines.push_back(std::move(line));
    if (with_cells) out.cells.push_back(aggregate(cell_samples[k]));
  }
  out.summary.wall_seconds = seconds_since(start);
  return out;
}

struct SolverResult {
  SolverSummary summary;
  std::vector<GridField> snapshots;
};

SolverResult run_solver_snapshots(const ExperimentConfig& cfg, const Setup& s) {
  const auto start = Clock::now();
  SolverResult out;
  const Branch branch = cfg.branch();
  const bool nonlocal = branch == Branch::kAnomalous;
  out.summary.kind = nonlocal ? "nonlocal" : "entropy";
  const std::int64_t cells =
      cfg.cells > 0 ? cfg.cells
                    : static_cast<std::int64_t>(std::llround(s.window * static_cast<double>(cfg.n_list.back())));
  out.summary.cells = cells;
  out.summary.window = s.window;
  GridField field = make_grid_field(solver_profile(cfg, s), cfg.dim, cells, s.window, cfg.rho_star,
                                    cfg.no_wrap ? Boundary::kZeroGradient : Boundary::kFarField);
  if (nonlocal) {
    NonlocalOptions opts;
    opts.safety = cfg.safety;
    opts.cutoff = 0.5 * s.window;
    opts.workers = cfg.workers;
    out.summary.cutoff = opts.cutoff;
    for (double t : cfg.t_snapshots) {
      field = evolve_nonlocal(field, s.constitutive, cfg.alpha, t, opts, &out.summary.log);
      out.snapshots.push_back(field);
    }
  } else {
    if (cfg.orientation != "asymmetric") {
      throw ConfigError("the entropy solver needs the totally asymmetric orientation");
    }
    double gamma = 1.0;
    if (branch == Branch::kEuler) {
      const JumpKernel big(cfg.dim, cfg.alpha, cfg.dim == 1 ? 4096 : 256);
      gamma = big.gamma_alpha().value();
    }
    out.summary.gamma = gamma;
    const FluxModel flux = FluxModel::from_table(s.constitutive, gamma, cfg.dim);
    EntropyOptions opts;
    opts.cfl = cfg.cfl;
    for (double t : cfg.t_snapshots) {
      field = entropy_solve(field, flux, t, opts, &out.summary.log);
      out.snapshots.push_back(field);
    }
  }
  out.summary.wall_seconds = seconds_since(start);
  return out;
}

// Solver snapshot sampled at the lattice sites of N and filtered by the l-block average.
std::vector<double> solver_sites(const GridField& field, const Lattice& lat, std::int64_t l) {
  std::vector<double> v(static_cast<std::size_t>(lat.sites()));
  for (std::int64_t x = 0; x < lat.sites(); ++x) {
    v[static_cast<std::size_t>(x)] = sample_field(field, lat.macro_point(x));
  }
  return box_filter(std::move(v), lat, l);
}

ConvergenceReport run_parts(const ExperimentConfig& cfg, bool simulate, bool solve) {
  const Setup s = make_setup(cfg);
  ConvergenceReport report;
  report.config = cfg;
  const bool compare = simulate && solve;
  if (compare) report.comparison_cell_width = cell_geometry(cfg, cfg.n_list.front()).width;

  std::future<SolverResult> solver;
  if (solve) {
    solver = std::async(std::launch::async, [&cfg, &s] { return run_solver_snapshots(cfg, s); });
  }
  std::vector<EnsembleResult> ensembles;
  if (simulate) {
    try {
      for (std::int64_t big_n : cfg.n_list) ensembles.push_back(run_ensemble(cfg, s, big_n, compare));
    } catch (...) {
      if (solve) solver.wait();
      throw;
    }
  }
  if (solve) {
    SolverResult r = solver.get();
    report.solver = r.summary;
    report.solver_snapshots = std::move(r.snapshots);
  }
  for (auto& e : ensembles) {
    report.ensembles.push_back(e.summary);
    for (auto& line : e.lines) report.lines.push_back(std::move(line));
  }
  if (!compare) return report;

  for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
    const std::int64_t big_n = cfg.n_list[ni];
    const CellGeometry geom = cell_geometry(cfg, big_n);
    const Lattice lat(cfg.dim, side_of(cfg, big_n), big_n);
    const std::int64_t l = cfg.block_half_width(big_n);
    const double vol = std::pow(geom.width, cfg.dim);
    for (std::size_t k = 0; k < cfg.t_snapshots.size(); ++k) {
      const auto solver_cells = cell_means(solver_sites(report.solver_snapshots[k], lat, l), lat, geom);
      const MeanStderr& emp = ensembles[ni].cells[k];
      ComparisonProfile cp;
      cp.big_n = big_n;
      cp.t = cfg.t_snapshots[k];
      for (std::int64_t c = 0; c < geom.per_axis; ++c) {
        cp.u.push_back(geom.u0 + (static_cast<double>(c) + 0.5) * geom.width);
      }
      cp.empirical = emp.mean;
      cp.empirical_stderr = emp.stderr_;
      cp.solver = solver_cells;
      double l1 = 0.0;
      double var = 0.0;
      for (std::size_t c = 0; c < solver_cells.size(); ++c) {
        l1 += std::abs(emp.mean[c] - solver_cells[c]);
        var += emp.stderr_[c] * emp.stderr_[c];
      }
      report.rows.push_back({big_n, cp.t, l1 * vol, std::sqrt(var) * vol});
      report.comparisons.push_back(std::move(cp));
    }
  }
  return report;
}

// ---------------------------------------------------------------------------------------------
// Files

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::filesystem::path prepare_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create directory " + dir + ": " + ec.message());
  return dir;
}

Json config_json(const ExperimentConfig& cfg) {
  Json j = Json::object();
  for (const auto& [k, v] : describe(cfg)) j[k] = v;
  return j;
}

Json ensembles_json(const ConvergenceReport& r) {
  Json arr = Json::array();
  for (const auto& e : r.ensembles) {
    arr.push_back({{"N", e.big_n},
                   {"side", e.side},
                   {"d_max", e.d_max},
                   {"l_block", e.block_half_width},
                   {"gamma_N", e.gamma_n},
                   {"kernel_rate", e.kernel_rate},
                   {"proposals", e.stats.proposals},
                   {"accepted", e.stats.accepted},
                   {"acceptance_ratio", e.stats.acceptance_ratio()}});
  }
  return arr;
}

Json solver_json(const SolverSummary& s, bool full_dt) {
  Json j = {{"kind", s.kind},     {"cells", s.cells},       {"window", s.window},
            {"gamma", s.gamma},   {"cutoff", s.cutoff},     {"steps", s.log.steps},
            {"clamps", s.log.clamps}, {"max_mass_drift", s.log.max_mass_drift},
            {"boundary_flux", s.log.boundary_flux}};
  if (!s.log.dt.empty()) {
    j["dt_min"] = *std::min_element(s.log.dt.begin(), s.log.dt.end());
    j["dt_max"] = *std::max_element(s.log.dt.begin(), s.log.dt.end());
  }
  if (full_dt) j["dt"] = s.log.dt;
  return j;
}

Json manifest_base(const ExperimentConfig& cfg, const std::string& command) {
  return {{"tool", "hydroscale"},
          {"version", kVersion},
          {"command", command},
          {"seed", cfg.seed},
          {"branch", branch_name(cfg.branch())},
          {"config", config_json(cfg)}};
}

std::string t_label(double t) { return format_real(t); }

}  // namespace

double sample_field(const GridField& f, const MacroPoint& u) {
  auto value = [&](std::int64_t a, std::int64_t b) {
    if (f.boundary == Boundary::kZeroGradient) {
      a = std::clamp<std::int64_t>(a, 0, f.cells - 1);
      b = std::clamp<std::int64_t>(b, 0, f.cells - 1);
    } else if (a < 0 || a >= f.cells || b < 0 || b >= f.cells) {
      return f.rho_star;
    }
    return f.values[static_cast<std::size_t>(f.dim == 1 ? a : a * f.cells + b)];
  };
  const double p0 = (u[0] - f.origin) / f.du - 0.5;
  const auto i0 = static_cast<std::int64_t>(std::floor(p0));
  const double w0 = p0 - static_cast<double>(i0);
  if (f.dim == 1) return (1.0 - w0) * value(i0, 0) + w0 * value(i0 + 1, 0);
  const double p1 = (u[1] - f.origin) / f.du - 0.5;
  const auto i1 = static_cast<std::int64_t>(std::floor(p1));
  const double w1 = p1 - static_cast<double>(i1);
  return (1.0 - w0) * ((1.0 - w1) * value(i0, i1) + w1 * value(i0, i1 + 1)) +
         w0 * ((1.0 - w1) * value(i0 + 1, i1) + w1 * value(i0 + 1, i1 + 1));
}

ConvergenceReport run_hydro_experiment(const ExperimentConfig& cfg) { return run_parts(cfg, true, true); }
ConvergenceReport run_simulation(const ExperimentConfig& cfg) { return run_parts(cfg, true, false); }
ConvergenceReport run_solver(const ExperimentConfig& cfg) { return run_parts(cfg, false, true); }

std::string l1_table_csv(const ConvergenceReport& report) {
  std::ostringstream out;
  out << "N,t,l1,l1_stderr\n";
  for (const auto& r : report.rows) {
    out << r.big_n << ',' << format_real(r.t) << ',' << format_real(r.l1) << ','
        << format_real(r.l1_stderr) << '\n';
  }
  return out.str();
}

void convergence_report_to_files(const ConvergenceReport& report, const std::string& dir) {
  const auto root = prepare_dir(dir);
  write_file(root / "l1_table.csv", l1_table_csv(report));
  std::ostringstream cmp;
  cmp << "N,t,u,empirical,empirical_stderr,solver\n";
  for (const auto& c : report.comparisons) {
    for (std::size_t i = 0; i < c.empirical.size(); ++i) {
      const double u = c.u[i % c.u.size()];
      cmp << c.big_n << ',' << format_real(c.t) << ',' << format_real(u) << ','
          << format_real(c.empirical[i]) << ',' << format_real(c.empirical_stderr[i]) << ','
          << format_real(c.solver[i]) << '\n';
    }
  }
  write_file(root / "comparison.csv", cmp.str());
  Json m = manifest_base(report.config, "compare");
  m["ensembles"] = ensembles_json(report);
  m["solver"] = solver_json(report.solver, false);
  m["comparison"] = {{"cell_width", report.comparison_cell_width},
                     {"region", "central half of the window"}};
  write_file(root / "manifest.json", m.dump(2) + "\n");
  Json timing = Json::object();
  Json ens = Json::array();
  for (const auto& e : report.ensembles) ens.push_back({{"N", e.big_n}, {"wall_seconds", e.wall_seconds}});
  timing["ensembles"] = ens;
  timing["solver_wall_seconds"] = report.solver.wall_seconds;
  write_file(root / "timing.json", timing.dump(2) + "\n");
}

void simulation_report_to_files(const ConvergenceReport& report, const std::string& dir) {
  const auto root = prepare_dir(dir);
  Json files = Json::array();
  for (const auto& line : report.lines) {
    std::ostringstream out;
    out << "x_over_N,eta_l_mean,eta_l_stderr\n";
    for (std::size_t i = 0; i < line.mean.size(); ++i) {
      out << format_real(line.x_over_n[i]) << ',' << format_real(line.mean[i]) << ','
          << format_real(line.stderr_[i]) << '\n';
    }
    const std::string name =
        "profile_N" + std::to_string(line.big_n) + "_t" + t_label(line.t) + ".csv";
    write_file(root / name, out.str());
    files.push_back(name);
  }
  Json m = manifest_base(report.config, "simulate");
  m["ensembles"] = ensembles_json(report);
  m["files"] = files;
  double wall = 0.0;
  for (const auto& e : report.ensembles) wall += e.wall_seconds;
  m["wall_seconds"] = wall;
  write_file(root / "manifest.json", m.dump(2) + "\n");
}

void solver_report_to_files(const ConvergenceReport& report, const std::string& dir) {
  const auto root = prepare_dir(dir);
  Json files = Json::array();
  for (const auto& f : report.solver_snapshots) {
    std::ostringstream out;
    out << (f.dim == 1 ? "u,rho\n" : "u1,u2,rho\n");
    for (std::size_t i = 0; i < f.values.size(); ++i) {
      const MacroPoint p = f.cell_center(static_cast<std::int64_t>(i));
      out << format_real(p[0]) << ',';
      if (f.dim == 2) out << format_real(p[1]) << ',';
      out << format_real(f.values[i]) << '\n';
    }
    const std::string name = "solution_t" + t_label(f.t) + ".csv";
    write_file(root / name, out.str());
    files.push_back(name);
  }
  Json m = manifest_base(report.config, "solve");
  m["solver"] = solver_json(report.solver, true);
  m["files"] = files;
  write_file(root / "manifest.json", m.dump(2) + "\n");
}

OrderingReport run_ordering_experiment(const ExperimentConfig& cfg) {
  const auto start = Clock::now();
  if (cfg.branch() != Branch::kEuler) throw ConfigError("the ordering experiment needs alpha > 1");
  const Setup s = make_setup(cfg);
  if (!s.model.attractive()) throw ConfigError("the ordering experiment needs an attractive model");
  if (!(cfg.coupling_c >= 0.0 && cfg.coupling_c < s.table.rho_c())) {
    throw ConfigError("coupling density c must lie in [0, rho_c)");
  }
  OrderingSetup setup;
  setup.dim = cfg.dim;
  setup.alpha = cfg.alpha;
  setup.orientation = cfg.kernel_orientation();
  setup.window_factor = cfg.window_factor;
  setup.t_macro = cfg.t_end;
  setup.replicas = static_cast<std::size_t>(cfg.replicas);
  setup.n_list = cfg.n_list;
  for (auto d : cfg.d_list) {
    Displacement disp{};
    disp[0] = static_cast<std::int32_t>(d);
    setup.d_list.push_back(disp);
  }
  setup.region_a = cfg.region_a;
  setup.region_b = cfg.region_b;
  setup.seed = cfg.seed;
  setup.max_events = cfg.max_events;
  setup.workers = cfg.workers;
  for (auto big_n : cfg.n_list) side_of(cfg, big_n);
  OrderingReport report;
  report.config = cfg;
  report.rows = ordering_experiment(s.table, s.profile, cfg.rho_star, cfg.coupling_c, setup);
  report.wall_seconds = seconds_since(start);
  return report;
}

std::string ordering_csv(const OrderingReport& report) {
  std::ostringstream out;
  out << "N,d,unordered_time_integral,stderr\n";
  for (const auto& r : report.rows) {
    out << r.big_n << ',' << r.d[0];
    if (report.config.dim == 2) out << ':' << r.d[1];
    out << ',' << format_real(r.mean) << ',' << format_real(r.stderr_) << '\n';
  }
  return out.str();
}

void ordering_report_to_files(const OrderingReport& report, const std::string& dir) {
  const auto root = prepare_dir(dir);
  write_file(root / "ordering.csv", ordering_csv(report));
  Json m = manifest_base(report.config, "coupling");
  Json gammas = Json::array();
  for (auto big_n : report.config.n_list) {
    gammas.push_back({{"N", big_n}, {"gamma_N", gamma_n_scale(report.config.alpha, big_n)}});
  }
  m["scales"] = gammas;
  m["wall_seconds"] = report.wall_seconds;
  write_file(root / "manifest.json", m.dump(2) + "\n");
}

std::string equilibrium_csv(const ExperimentConfig& cfg) {
  const RateModel model = parse_model(cfg.model);
  const EquilibriumTable table(model);
  double rho_max = cfg.rho_max ? *cfg.rho_max : (std::isfinite(table.rho_c()) ? table.rho_c() : 5.0);
  if (rho_max > table.rho_c()) throw ConfigError("rho_max exceeds rho_c");
  std::ostringstream out;
  out << "rho,lambda,phi,psi,flux\n";
  for (std::int64_t i = 0; i < cfg.rho_points; ++i) {
    const double rho = i + 1 == cfg.rho_points
                           ? rho_max
                           : rho_max * static_cast<double>(i) / static_cast<double>(cfg.rho_points - 1);
    const bool at_c = rho == table.rho_c();
    const double phi = table.phi(rho);
    const double psi = table.psi(rho);
    out << format_real(rho) << ',' << (at_c ? std::string("inf") : format_real(table.lambda_of_density(rho)))
        << ',' << format_real(phi) << ',' << format_real(psi) << ',' << format_real(phi * psi) << '\n';
  }
  return out.str();
}

GridField empirical_field(const ConvergenceReport& report, std::int64_t big_n, std::size_t snapshot) {
  if (report.config.dim != 1) throw DomainError("empirical_field is 1D only");
  const double t = report.config.t_snapshots.at(snapshot);
  for (const auto& line : report.lines) {
    if (line.big_n != big_n || line.t != t) continue;
    GridField f;
    f.dim = 1;
    f.cells = static_cast<std::int64_t>(line.mean.size());
    f.du = 1.0 / static_cast<double>(big_n);
    f.origin = line.x_over_n.front() - 0.5 * f.du;
    f.values = line.mean;
    f.rho_star = report.config.rho_star;
    f.t = t;
    return f;
  }
  throw DomainError("no empirical profile for N = " + std::to_string(big_n));
}

GridField solver_on_sites(const ConvergenceReport& report, std::int64_t big_n, std::size_t snapshot) {
  GridField f = empirical_field(report, big_n, snapshot);
  const GridField& s = report.solver_snapshots.at(snapshot);
  for (std::int64_t i = 0; i < f.cells; ++i) {
    f.values[static_cast<std::size_t>(i)] = sample_field(s, {f.center(i), 0.0, 0.0});
  }
  return f;
}

}  // namespace hydroscale
