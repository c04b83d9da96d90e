#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "turnpike/errors.hpp"
#include "turnpike/horizon_solver.hpp"
#include "turnpike/io/commands.hpp"
#include "turnpike/io/config.hpp"
#include "turnpike/io/json_io.hpp"
#include "turnpike/riccati.hpp"
#include "turnpike/steady_solver.hpp"
#include "turnpike/subspace_lab.hpp"
#include "turnpike/system_model.hpp"
#include "turnpike/turnpike_metrics.hpp"

namespace py = pybind11;
using namespace turnpike;

namespace {

py::object to_python(const io::Json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

PdeSpec pde(PdeKind kind, int modes, double length, double potential, double x_con, double x_obs,
            double target) {
  PdeSpec spec;
  spec.kind = kind;
  spec.modes = modes;
  spec.length = length;
  spec.potential = potential;
  spec.x_con = x_con;
  spec.x_obs = x_obs;
  spec.target = target;
  return spec;
}

io::ExperimentConfig config_from(const std::string& text) { return io::parse_config(text); }

}  // namespace

PYBIND11_MODULE(_turnpike, m) {
  m.doc() = "Turnpike analysis of finite-dimensional linear-quadratic control problems";

  static py::exception<Error> base(m, "TurnpikeError", PyExc_RuntimeError);
  static py::exception<PreconditionError> precondition(m, "PreconditionError", base.ptr());
  static py::exception<NumericalError> numerical(m, "NumericalError", base.ptr());
  static py::exception<BlowUpError> blow_up(m, "BlowUpError", numerical.ptr());
  static py::exception<ConfigError> config(m, "ConfigError", base.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const BlowUpError& e) {
      py::set_error(blow_up, e.what());
    } catch (const NumericalError& e) {
      py::set_error(numerical, e.what());
    } catch (const PreconditionError& e) {
      py::set_error(precondition, e.what());
    } catch (const ConfigError& e) {
      py::set_error(config, e.what());
    } catch (const Error& e) {
      py::set_error(base, e.what());
    }
  });

  py::class_<SystemSpec>(m, "SystemSpec")
      .def(py::init([](const Matrix& A, const Matrix& B, const Matrix& C, const Vector& z,
                       const Vector& x0, std::optional<Vector> x1) {
             SystemSpec s{A, B, C, z, x0, std::move(x1)};
             s.validate();
             return s;
           }),
           py::arg("A"), py::arg("B"), py::arg("C"), py::arg("z"), py::arg("x0"),
           py::arg("x1") = py::none())
      .def_readwrite("A", &SystemSpec::A)
      .def_readwrite("B", &SystemSpec::B)
      .def_readwrite("C", &SystemSpec::C)
      .def_readwrite("z", &SystemSpec::z)
      .def_readwrite("x0", &SystemSpec::x0)
      .def_readwrite("x1", &SystemSpec::x1)
      .def_property_readonly("n", &SystemSpec::n)
      .def_property_readonly("m", &SystemSpec::m)
      .def_property_readonly("p", &SystemSpec::p);

  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("t", &Trajectory::t)
      .def_readonly("u", &Trajectory::u)
      .def_readonly("x", &Trajectory::x)
      .def_readonly("p", &Trajectory::p)
      .def_readonly("residual", &Trajectory::residual)
      .def_readonly("boundary_error", &Trajectory::boundary_error)
      .def_readonly("solver", &Trajectory::solver_tag);

  m.def(
      "build_heat",
      [](int modes, double length, double potential, double x_con, double x_obs, double target) {
        return build_heat(pde(PdeKind::heat, modes, length, potential, x_con, x_obs, target));
      },
      py::arg("modes"), py::arg("length"), py::arg("potential") = 0.0, py::arg("x_con"),
      py::arg("x_obs"), py::arg("target") = 0.0, "Sine-Galerkin heat system.");
  m.def(
      "build_wave",
      [](int modes, double length, double x_con, double x_obs, double target) {
        return build_wave(pde(PdeKind::wave, modes, length, 0.0, x_con, x_obs, target));
      },
      py::arg("modes"), py::arg("length"), py::arg("x_con"), py::arg("x_obs"),
      py::arg("target") = 0.0, "Sine-Galerkin wave system in (position, velocity) form.");
  m.def(
      "heat_predicate",
      [](int modes, double length, double potential, double x_con, double x_obs) {
        return to_python(io::to_json(
            heat_turnpike_predicate(pde(PdeKind::heat, modes, length, potential, x_con, x_obs, 0.0))));
      },
      py::arg("modes"), py::arg("length"), py::arg("potential") = 0.0, py::arg("x_con"),
      py::arg("x_obs"));
  m.def(
      "wave_predicate",
      [](int modes, double length, double x_con, double x_obs) {
        return to_python(io::to_json(
            wave_turnpike_predicate(pde(PdeKind::wave, modes, length, 0.0, x_con, x_obs, 0.0))));
      },
      py::arg("modes"), py::arg("length"), py::arg("x_con"), py::arg("x_obs"));

  m.def(
      "is_c_stabilizable",
      [](const Matrix& A, const Matrix& B, const Matrix& C) {
        const CStabilizability r = is_C_stabilizable(A, B, C);
        return py::make_tuple(r.holds, r.defect);
      },
      py::arg("A"), py::arg("B"), py::arg("C"), "Returns (holds, defect).");
  m.def(
      "weak_hautus", [](const Matrix& A, const Matrix& C) { return weak_hautus(A, C).holds; },
      py::arg("A"), py::arg("C"));
  m.def("is_controllable", &is_controllable, py::arg("A"), py::arg("B"));
  m.def("is_stabilizable", &is_stabilizable, py::arg("A"), py::arg("B"));

  m.def(
      "solve_steady",
      [](const Matrix& A, const Matrix& B, const Matrix& C, const Vector& z) {
        const SteadySolution s = solve_steady(A, B, C, z);
        py::dict d;
        d["u_bar"] = s.u_bar;
        d["x_bar"] = s.x_bar;
        d["J"] = s.j_value;
        d["kernel_dir"] = s.kernel_dir;
        return d;
      },
      py::arg("A"), py::arg("B"), py::arg("C"), py::arg("z"));
  m.def(
      "solve_are",
      [](const Matrix& A, const Matrix& B, const Matrix& C) {
        const RiccatiResult r = solve_are_antistrong(A, B, C);
        py::dict d;
        d["E_hat"] = r.E_hat;
        d["A_plus"] = r.A_plus;
        d["residual"] = r.residual;
        d["critical_dim"] = r.critical_dim;
        return d;
      },
      py::arg("A"), py::arg("B"), py::arg("C"),
      "Maximal-antistrong solution of the algebraic Riccati equation.");

  m.def(
      "solve_free_endpoint",
      [](const SystemSpec& sys, double T, int steps) { return solve_free_endpoint(sys, {T, steps}); },
      py::arg("system"), py::arg("T"), py::arg("steps"), py::call_guard<py::gil_scoped_release>());
  m.def(
      "solve_fixed_endpoint",
      [](const SystemSpec& sys, double T, int steps) { return solve_fixed_endpoint(sys, {T, steps}); },
      py::arg("system"), py::arg("T"), py::arg("steps"), py::call_guard<py::gil_scoped_release>());
  m.def(
      "solve_cg_oracle",
      [](const SystemSpec& sys, double T, int steps) {
        return solve_cg_oracle(sys, {T, steps}).trajectory;
      },
      py::arg("system"), py::arg("T"), py::arg("steps"), py::call_guard<py::gil_scoped_release>());
  m.def("midpoint_rule_defect", &midpoint_rule_defect, py::arg("trajectory"), py::arg("system"));

  m.def(
      "verify_c_turnpike",
      [](const SystemSpec& sys, const std::vector<double>& horizons, int steps) {
        const SteadySolution steady = solve_steady(sys.A, sys.B, sys.C, sys.z);
        VerifyOptions options;
        options.steps = steps;
        CTurnpikeReport report;
        {
          py::gil_scoped_release release;
          report = verify_c_turnpike(sys, steady, horizons, options);
        }
        return to_python(io::to_json(report));
      },
      py::arg("system"), py::arg("horizons") = std::vector<double>{10, 20, 40},
      py::arg("steps") = 4000);

  m.def(
      "preset", [](const std::string& name) { return io::preset(name).system(); }, py::arg("name"),
      "System of a named preset.");
  m.def("preset_names", &io::preset_names);

  auto command = [&m](const char* name, io::CommandOutput (*fn)(const io::ExperimentConfig&)) {
    m.def(
        name, [fn](const std::string& config_json) { return to_python(fn(config_from(config_json)).summary); },
        py::arg("config_json"), "Runs the CLI command on a JSON config and returns its summary.");
  };
  command("analyze", &io::cmd_analyze);
  command("solve", &io::cmd_solve);
  command("sweep", &io::cmd_sweep);
  command("reproduce", &io::cmd_reproduce);
}
