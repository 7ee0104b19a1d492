#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hydroscale/config.hpp"
#include "hydroscale/equilibrium.hpp"
#include "hydroscale/errors.hpp"
#include "hydroscale/harness.hpp"
#include "hydroscale/kernel.hpp"
#include "hydroscale/model.hpp"
#include "hydroscale/pde.hpp"

namespace py = pybind11;
using namespace hydroscale;

namespace {

ExperimentConfig config_from_text(const std::string& text) {
  return parse_experiment_config(KeyValueConfig::parse(text));
}

py::list rows_of(const ConvergenceReport& r) {
  py::list out;
  for (const auto& row : r.rows) out.append(py::make_tuple(row.big_n, row.t, row.l1, row.l1_stderr));
  return out;
}

}  // namespace

PYBIND11_MODULE(_hydroscale, m) {
  m.doc() = "Long-range misanthrope processes and their hydrodynamic equations";
  m.attr("__version__") = kVersion;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<StabilityError>(m, "StabilityError", PyExc_RuntimeError);
  py::register_exception<BudgetError>(m, "BudgetError", PyExc_RuntimeError);

  py::class_<RateModel>(m, "RateModel")
      .def_static("zero_range", &RateModel::zero_range)
      .def_static("zero_range_capped", &RateModel::zero_range_capped, py::arg("cap"))
      .def_static("exclusion", &RateModel::exclusion)
      .def_static("parse", &parse_model, py::arg("spec"))
      .def("g", &RateModel::g)
      .def("h", &RateModel::h)
      .def_property_readonly("name", &RateModel::name)
      .def_property_readonly("kappa", &RateModel::kappa)
      .def_property_readonly("h_sup", &RateModel::h_sup)
      .def_property_readonly("m0", &RateModel::m0)
      .def_property_readonly("attractive", &RateModel::attractive)
      .def("validate", [](const RateModel& r, std::int64_t k_max) {
        const auto rep = validate_rates(r, k_max);
        return py::make_tuple(rep.ok(), rep.to_string());
      }, py::arg("k_max") = 64);

  py::class_<EquilibriumTable>(m, "EquilibriumTable")
      .def(py::init<RateModel>(), py::arg("model"))
      .def_property_readonly("lambda_c", &EquilibriumTable::lambda_c)
      .def_property_readonly("rho_c", &EquilibriumTable::rho_c)
      .def("density_of_lambda", &EquilibriumTable::density_of_lambda)
      .def("lambda_of_density", &EquilibriumTable::lambda_of_density)
      .def("pmf", &EquilibriumTable::pmf_of_density, py::arg("rho"))
      .def("phi", &EquilibriumTable::phi)
      .def("psi", &EquilibriumTable::psi)
      .def("flux", [](const EquilibriumTable& t, double rho) { return t.phi(rho) * t.psi(rho); });

  py::class_<JumpKernel>(m, "JumpKernel")
      .def(py::init([](int dim, double alpha, std::int64_t d_max) { return JumpKernel(dim, alpha, d_max); }),
           py::arg("dim"), py::arg("alpha"), py::arg("d_max"))
      .def("jump_rate", [](const JumpKernel& k, std::vector<std::int32_t> d) {
        Displacement x{};
        for (std::size_t i = 0; i < d.size() && i < x.size(); ++i) x[i] = d[i];
        return k.jump_rate(x);
      })
      .def("total_rate", [](const JumpKernel& k) { return k.total_rate().value(); })
      .def("gamma_alpha", [](const JumpKernel& k) { return k.gamma_alpha().value(); });

  m.def("gamma_n", &gamma_n_scale, py::arg("alpha"), py::arg("n"));

  m.def("riemann_exclusion", [](double rho_left, double rho_right, double t, const std::vector<double>& u,
                                double gamma) {
    return riemann_exact(FluxModel::exclusion(gamma), rho_left, rho_right, t, u);
  }, py::arg("rho_left"), py::arg("rho_right"), py::arg("t"), py::arg("u"), py::arg("gamma") = 1.0);

  m.def("equilibrium_csv", [](const std::string& text) { return equilibrium_csv(config_from_text(text)); },
        py::arg("config"));
  m.def("compare", [](const std::string& text) {
    py::gil_scoped_release release;
    auto rep = run_hydro_experiment(config_from_text(text));
    py::gil_scoped_acquire acquire;
    return rows_of(rep);
  }, py::arg("config"), "Run simulator ensembles against the PDE solver; rows (N, t, l1, l1_stderr).");
  m.def("solve", [](const std::string& text) {
    const auto rep = run_solver(config_from_text(text));
    py::list out;
    for (const auto& f : rep.solver_snapshots) out.append(py::make_tuple(f.t, f.origin, f.du, f.values));
    return out;
  }, py::arg("config"), "Solver snapshots (t, origin, du, values).");
  m.def("coupling", [](const std::string& text) {
    const auto rep = run_ordering_experiment(config_from_text(text));
    py::list out;
    for (const auto& r : rep.rows) out.append(py::make_tuple(r.big_n, r.d[0], r.mean, r.stderr_));
    return out;
  }, py::arg("config"));
}
