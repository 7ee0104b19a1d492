#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "hydroscale/config.hpp"
#include "hydroscale/errors.hpp"
#include "hydroscale/harness.hpp"

using namespace hydroscale;

namespace {

ExperimentConfig config_of(const std::string& text) {
  return parse_experiment_config(KeyValueConfig::parse(text));
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("config parsing") {
  const auto c = config_of(
      "# comment\nmodel = zero_range_capped(2)\nalpha = 0.5\nN_list = 16, 32\n"
      "t_snapshots = 0, 0.1\nseed = 42  # trailing\n");
  CHECK(c.alpha == 0.5);
  CHECK(c.n_list == std::vector<std::int64_t>{16, 32});
  CHECK(c.seed == 42);
  CHECK(c.branch() == Branch::kAnomalous);
  CHECK(c.block_half_width(64) == 3);
  CHECK(c.block_half_width(10) == 1);
  CHECK(parse_model(c.model).name() == parse_model("zero_range_capped(2)").name());

  CHECK_THROWS_AS(config_of("alpha = -1\n"), ConfigError);
  CHECK_THROWS_AS(config_of("colour = blue\n"), ConfigError);
  CHECK_THROWS_AS(config_of("alpha = 1\nalpha = 2\n"), ConfigError);
  CHECK_THROWS_AS(config_of("N_list = 32, 16\n"), ConfigError);
  CHECK_THROWS_AS(config_of("alpha = 2\nbranch = anomalous\n"), ConfigError);
  CHECK_THROWS_AS(config_of("model = bogus\n"), ConfigError);
  CHECK_THROWS_AS(config_of("alpha = two\n"), ConfigError);
  CHECK_THROWS_AS(config_of("just text\n"), ConfigError);
  CHECK_THROWS_AS(config_of("profile = bump(2,0.5)\nmodel = exclusion\n"), ConfigError);
  CHECK_THROWS_AS(KeyValueConfig::load("/nonexistent/config.txt"), ConfigError);
  CHECK(format_real(0.1) == "0.1");
  CHECK(format_real(0.5) == "0.5");
  CHECK(format_real(64.0) == "64");
}

TEST_CASE("csv tables") {
  ConvergenceReport empty;
  CHECK(l1_table_csv(empty) == "N,t,l1,l1_stderr\n");
  ConvergenceReport one;
  one.rows.push_back({64, 0.5, 0.25, 0.125});
  CHECK(l1_table_csv(one) == "N,t,l1,l1_stderr\n64,0.5,0.25,0.125\n");
  OrderingReport ord;
  CHECK(ordering_csv(ord) == "N,d,unordered_time_integral,stderr\n");
}

TEST_CASE("equilibrium table export") {
  const auto csv = equilibrium_csv(config_of("model = exclusion\nrho_points = 5\n"));
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "rho,lambda,phi,psi,flux");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 5);
  CHECK(csv.find("0.5,1,0.5,0.5,0.25") != std::string::npos);
}

TEST_CASE("an empty system has zero distance") {
  const auto cfg = config_of(
      "model = exclusion\nalpha = 2\nN_list = 16, 32\nreplicas = 3\nprofile = constant\n"
      "rho_star = 0\nt_snapshots = 0, 0.5\nseed = 3\nno_wrap = true\n");
  const auto report = run_hydro_experiment(cfg);
  REQUIRE(report.rows.size() == 4);
  for (const auto& r : report.rows) {
    CHECK(r.l1 == 0.0);
    CHECK(r.l1_stderr == 0.0);
  }
  for (const auto& e : report.ensembles) CHECK(e.stats.accepted == 0);
}

TEST_CASE("experiments rerun byte for byte") {
  const std::string text =
      "model = exclusion\nalpha = 2\nN_list = 16, 32\nreplicas = 4\nprofile = bump(0.6,0.5)\n"
      "rho_star = 0.2\nt_snapshots = 0, 0.25\nseed = 11\n";
  const auto dir = std::filesystem::temp_directory_path() / "hydroscale_harness_test";
  std::filesystem::remove_all(dir);
  convergence_report_to_files(run_hydro_experiment(config_of(text)), (dir / "a").string());
  convergence_report_to_files(run_hydro_experiment(config_of(text + "workers = 1\n")), (dir / "b").string());
  for (const char* f : {"l1_table.csv", "comparison.csv", "manifest.json"}) {
    const auto a = slurp(dir / "a" / f);
    CHECK(!a.empty());
    CHECK(a == slurp(dir / "b" / f));
  }
  CHECK(std::filesystem::exists(dir / "a" / "timing.json"));
  std::string reseeded = text;
  reseeded.replace(reseeded.find("seed = 11"), 9, "seed = 12");
  const auto other = run_hydro_experiment(config_of(reseeded));
  CHECK(l1_table_csv(other) != slurp(dir / "a" / "l1_table.csv"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("solver and simulation outputs") {
  const auto cfg = config_of(
      "model = zero_range_capped(3)\nalpha = 0.5\nN = 32\nreplicas = 2\nt_snapshots = 0, 0.1\n");
  const auto sim = run_simulation(cfg);
  REQUIRE(sim.lines.size() == 2);
  CHECK(sim.lines[0].x_over_n.size() == 128);
  const auto sol = run_solver(cfg);
  CHECK(sol.solver.kind == "nonlocal");
  REQUIRE(sol.solver_snapshots.size() == 2);
  const auto& f = sol.solver_snapshots[0];
  CHECK(sample_field(f, {f.center(5), 0.0, 0.0}) == doctest::Approx(f.values[5]));
  CHECK(sample_field(f, {100.0, 0.0, 0.0}) == doctest::Approx(cfg.rho_star));
  const auto euler = run_solver(config_of("alpha = 2\nN = 32\nt_snapshots = 0.1\n"));
  CHECK(euler.solver.kind == "entropy");
  CHECK(euler.solver.gamma == doctest::Approx(1.6449).epsilon(1e-3));
  const auto log_branch = run_solver(config_of("alpha = 1\nN = 32\nt_snapshots = 0.1\n"));
  CHECK(log_branch.solver.gamma == 1.0);
}

TEST_CASE("ordering experiment needs the euler branch") {
  CHECK_THROWS_AS(run_ordering_experiment(config_of("alpha = 0.5\n")), ConfigError);
  const auto rep = run_ordering_experiment(
      config_of("alpha = 2\nN_list = 16, 32\nreplicas = 2\nd_list = 1, 2\nt_end = 0.1\nc = 0.5\n"));
  CHECK(rep.rows.size() == 4);
  for (const auto& r : rep.rows) CHECK(r.mean >= 0.0);
}

}
