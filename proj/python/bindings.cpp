#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "hjlab/commands.hpp"
#include "hjlab/config.hpp"
#include "hjlab/functional.hpp"
#include "hjlab/oracle.hpp"
#include "hjlab/parallel.hpp"
#include "hjlab/solver.hpp"
#include "hjlab/verify.hpp"

namespace py = pybind11;
using namespace hjlab;

namespace {

py::array_t<double> to_numpy(const Field& f) {
  py::array_t<double> a({f.nv, f.nx});
  std::copy(f.data.begin(), f.data.end(), a.mutable_data());
  return a;
}

py::array_t<double> to_numpy(const std::vector<Field>& traj) {
  const std::size_t nv = traj.empty() ? 0 : traj[0].nv, nx = traj.empty() ? 0 : traj[0].nx;
  py::array_t<double> a({traj.size(), nv, nx});
  double* p = a.mutable_data();
  for (const Field& f : traj) p = std::copy(f.data.begin(), f.data.end(), p);
  return a;
}

Field from_numpy(const Scenario& sc, py::array_t<double, py::array::c_style | py::array::forcecast> a) {
  const std::size_t nv = sc.eq.G.nv, nx = sc.eq.G.nx;
  if (a.ndim() == 1 && nx == 1 && static_cast<std::size_t>(a.shape(0)) == nv) {
  } else if (a.ndim() != 2 || static_cast<std::size_t>(a.shape(0)) != nv || static_cast<std::size_t>(a.shape(1)) != nx) {
    throw py::value_error("field must have shape (velocity nodes, space nodes)");
  }
  Field f(nv, nx);
  std::copy(a.data(), a.data() + f.size(), f.data.begin());
  return f;
}

py::dict report_dict(const FunctionalReport& r) {
  py::dict d;
  d["t"] = r.horizon;
  d["i_def"] = r.i_def;
  d["i_decomp"] = r.i_decomp;
  d["discrepancy"] = r.discrepancy;
  d["i_inf"] = r.i_inf;
  d["gap"] = r.gap;
  d["residual"] = r.residual;
  d["residual_abs"] = r.residual_abs;
  d["hamiltonian_terminal"] = r.hamiltonian_terminal;
  d["converged"] = r.converged;
  d["status"] = r.status;
  return d;
}

}  // namespace

PYBIND11_MODULE(_hjlab, m) {
  m.doc() = "Coupled forward-backward Boltzmann solver and Hamilton-Jacobi functional";
  m.attr("__version__") = kVersion;

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);

  py::enum_<Regime>(m, "Regime").value("theorem1", Regime::theorem1).value("theorem2", Regime::theorem2);
  py::enum_<TerminalKind>(m, "TerminalKind")
      .value("orthogonal", TerminalKind::orthogonal)
      .value("polynomial", TerminalKind::polynomial)
      .value("degenerate", TerminalKind::degenerate)
      .value("zero", TerminalKind::zero);
  py::enum_<InitialKind>(m, "InitialKind")
      .value("projected", InitialKind::projected)
      .value("raw", InitialKind::raw)
      .value("zero", InitialKind::zero);

  py::class_<ScenarioConfig>(m, "ScenarioConfig")
      .def(py::init<>())
      .def_readwrite("dim", &ScenarioConfig::dim)
      .def_readwrite("radius", &ScenarioConfig::radius)
      .def_readwrite("nodes_per_axis", &ScenarioConfig::nodes_per_axis)
      .def_readwrite("space_nodes", &ScenarioConfig::space_nodes)
      .def_readwrite("sphere_order", &ScenarioConfig::sphere_order)
      .def_readwrite("alpha", &ScenarioConfig::alpha)
      .def_readwrite("beta", &ScenarioConfig::beta)
      .def_readwrite("sigma", &ScenarioConfig::sigma)
      .def_readwrite("regime", &ScenarioConfig::regime)
      .def_readwrite("horizon", &ScenarioConfig::horizon)
      .def_readwrite("time_step", &ScenarioConfig::time_step)
      .def_readwrite("substep", &ScenarioConfig::substep)
      .def_readwrite("perturbation_scale", &ScenarioConfig::perturbation_scale)
      .def_readwrite("initial_kind", &ScenarioConfig::initial_kind)
      .def_readwrite("initial_seed", &ScenarioConfig::initial_seed)
      .def_readwrite("initial_modulation", &ScenarioConfig::initial_modulation)
      .def_readwrite("terminal_kind", &ScenarioConfig::terminal_kind)
      .def_readwrite("terminal_seed", &ScenarioConfig::terminal_seed)
      .def_readwrite("terminal_modulation", &ScenarioConfig::terminal_modulation)
      .def_readwrite("tolerance", &ScenarioConfig::tolerance)
      .def_readwrite("max_iterations", &ScenarioConfig::max_iterations)
      .def("validate", [](const ScenarioConfig& c) { validate(c); });

  m.def("tiny_config", &tiny_config, "Small d = 2 instance used for oracle comparisons.");
  m.def(
      "load_config", [](const std::string& path) { return load_config(path).scenario; }, py::arg("path"));
  m.def(
      "parse_config", [](const std::string& text) { return parse_config(text).scenario; }, py::arg("text"));

  py::class_<Scenario>(m, "Scenario")
      .def(py::init(&build_scenario), py::arg("config"))
      .def_property_readonly("velocity_nodes", [](const Scenario& s) { return s.grid.velocity.size(); })
      .def_property_readonly("space_nodes", [](const Scenario& s) { return s.grid.space.size(); })
      .def_property_readonly("steps", [](const Scenario& s) { return s.steps; })
      .def_property_readonly("dv", [](const Scenario& s) { return s.grid.velocity.dv; })
      .def_property_readonly("speed2", [](const Scenario& s) { return s.grid.velocity.speed2; })
      .def_property_readonly("triple_count", [](const Scenario& s) { return s.table.triple_count(); })
      .def_property_readonly("G", [](const Scenario& s) { return to_numpy(s.eq.G); })
      .def_property_readonly("M", [](const Scenario& s) { return to_numpy(s.eq.M); })
      .def_property_readonly("nu", [](const Scenario& s) { return s.K.nu; })
      .def_property_readonly("psi0", [](const Scenario& s) { return to_numpy(s.psi0_p); })
      .def_property_readonly("etaT", [](const Scenario& s) { return to_numpy(s.etaT_p); })
      .def(
          "biased_collision",
          [](const Scenario& s, py::array_t<double> eta, py::array_t<double> a, py::array_t<double> b) {
            return to_numpy(biased_collision(from_numpy(s, eta), from_numpy(s, a), from_numpy(s, b), s.table));
          },
          py::arg("eta"), py::arg("psi1"), py::arg("psi2"))
      .def(
          "hamiltonian",
          [](const Scenario& s, py::array_t<double> phi, py::array_t<double> p) {
            return hamiltonian(from_numpy(s, phi), from_numpy(s, p), s.table, s.grid);
          },
          py::arg("phi"), py::arg("p"))
      .def(
          "hamiltonian_sym",
          [](const Scenario& s, py::array_t<double> psi, py::array_t<double> eta) {
            return hamiltonian_sym(from_numpy(s, psi), from_numpy(s, eta), s.table, s.grid);
          },
          py::arg("psi"), py::arg("eta"))
      .def(
          "stationary_functional",
          [](const Scenario& s, py::array_t<double> g) { return stationary_functional(from_numpy(s, g), s.eq, s.grid); },
          py::arg("g_hat"))
      .def("solve", [](const Scenario& s) {
        py::gil_scoped_release nogil;
        CoupledSolution sol = solve_coupled(s);
        py::gil_scoped_acquire gil;
        py::dict d;
        d["converged"] = sol.converged;
        d["status"] = sol.status;
        d["iterations"] = sol.history.size();
        d["max_ratio_after_first"] = sol.max_ratio_after_first;
        d["fixed_point_residual"] = sol.fixed_point_residual;
        py::list hist;
        for (const auto& h : sol.history) hist.append(py::make_tuple(h.iterate, h.delta_psi, h.delta_eta, h.ratio));
        d["history"] = hist;
        d["psi"] = to_numpy(sol.pair.psi);
        d["eta"] = to_numpy(sol.pair.eta);
        if (sol.converged) d["functional"] = report_dict(functional_report(sol, s));
        return d;
      });

  m.def(
      "hj_residual",
      [](const ScenarioConfig& c, const std::vector<double>& ts, double dt) {
        py::list out;
        for (const auto& r : hj_residual(c, ts, dt)) out.append(report_dict(r));
        return out;
      },
      py::arg("config"), py::arg("t_list"), py::arg("delta_t"));

  m.def(
      "convolution_bound_check",
      [](double s1, double s2, const std::vector<double>& ts, int n) {
        const auto r = oracle::convolution_bound_check(s1, s2, ts, n);
        py::dict d;
        d["constants"] = r.constants;
        d["witnessed"] = r.witnessed;
        d["spread"] = r.spread;
        return d;
      },
      py::arg("sigma1"), py::arg("sigma2"), py::arg("times"), py::arg("n_points") = 4000);

  m.def("set_threads", &set_thread_count, py::arg("n"));

  m.def(
      "run",
      [](const std::string& command, const std::string& config, std::optional<std::string> out, int threads,
         std::optional<std::uint64_t> seed) {
        CommandOptions o;
        o.config_path = config;
        o.out_dir = out;
        o.threads = threads;
        o.seed = seed;
        std::ostringstream so, se;
        const int code = run_command(command, o, so, se);
        return py::make_tuple(code, so.str(), se.str());
      },
      py::arg("command"), py::arg("config"), py::arg("out") = py::none(), py::arg("threads") = 0,
      py::arg("seed") = py::none(), "Runs a CLI command; returns (exit code, stdout, stderr).");
}
