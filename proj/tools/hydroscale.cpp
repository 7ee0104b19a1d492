// hydroscale command line: equilibrium tables, ensembles, solvers, comparisons, coupling.
#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "hydroscale/errors.hpp"
#include "hydroscale/harness.hpp"

namespace {

enum ExitCode { kOk = 0, kFailure = 1, kConfigError = 2, kRunError = 3 };

struct Args {
  std::string config;
  std::uint64_t seed = 0;
  std::string out;
};

hydroscale::ExperimentConfig load(const Args& args, const CLI::App& sub) {
  auto kv = hydroscale::KeyValueConfig::load(args.config);
  if (sub.count("--seed") > 0) kv.set("seed", std::to_string(args.seed));
  return hydroscale::parse_experiment_config(kv);
}

int run(const std::string& command, const Args& args, const CLI::App& sub) {
  using namespace hydroscale;
  const ExperimentConfig cfg = load(args, sub);
  const std::string out = args.out.empty() ? std::string("hydroscale_out") : args.out;
  if (command == "equilibrium") {
    const std::string csv = equilibrium_csv(cfg);
    if (args.out.empty()) {
      std::cout << csv;
    } else {
      std::filesystem::create_directories(args.out);
      std::ofstream f(std::filesystem::path(args.out) / "equilibrium.csv");
      if (!f) throw std::runtime_error("cannot write " + args.out + "/equilibrium.csv");
      f << csv;
    }
  } else if (command == "simulate") {
    simulation_report_to_files(run_simulation(cfg), out);
  } else if (command == "solve") {
    solver_report_to_files(run_solver(cfg), out);
  } else if (command == "compare") {
    const ConvergenceReport report = run_hydro_experiment(cfg);
    convergence_report_to_files(report, out);
    std::cout << l1_table_csv(report);
  } else if (command == "coupling") {
    const OrderingReport report = run_ordering_experiment(cfg);
    ordering_report_to_files(report, out);
    std::cout << ordering_csv(report);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Long-range misanthrope processes: simulation and hydrodynamic limits"};
  app.require_subcommand(1);
  Args args;
  const char* commands[][2] = {
      {"equilibrium", "Tabulate rho, lambda, Phi, Psi and the flux"},
      {"simulate", "Run simulator ensembles and write block-averaged profiles"},
      {"solve", "Solve the limiting equation and write snapshots"},
      {"compare", "Simulator ensembles against the solver: L1 table"},
      {"coupling", "Basic-coupling ordering experiment"},
  };
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c[0], c[1]);
    sub->add_option("--config", args.config, "Key = value config file")->required();
    sub->add_option("--seed", args.seed, "Override the config seed");
    sub->add_option("--out", args.out, "Output directory");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }
  CLI::App* sub = app.get_subcommands().front();
  try {
    return run(sub->get_name(), args, *sub);
  } catch (const hydroscale::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const hydroscale::StabilityError& e) {
    std::cerr << "stability error: " << e.what() << '\n';
    return kRunError;
  } catch (const hydroscale::BudgetError& e) {
    std::cerr << "event budget exceeded after " << e.events() << " events: " << e.what() << '\n';
    return kRunError;
  } catch (const hydroscale::DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}
