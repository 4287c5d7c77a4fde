#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ote/commands.hpp"
#include "ote/config.hpp"
#include "ote/errors.hpp"
#include "ote/materials.hpp"
#include "ote/planar.hpp"

namespace py = pybind11;

namespace {

std::string run(const std::string& command, const std::string& config_text, int workers) {
  const ote::RunConfig c = ote::RunConfig::parse(config_text, "<python>");
  const ote::RunOptions options{workers, nullptr};
  py::gil_scoped_release release;
  if (command == "pressure") return ote::cmd_pressure(c, options);
  if (command == "sweep") return ote::cmd_sweep(c, options);
  if (command == "spectrum") return ote::cmd_spectrum(c, options);
  if (command == "pfa") return ote::cmd_pfa(c, options);
  if (command == "scan-truncation") return ote::cmd_scan_truncation(c, options);
  throw ote::UsageError("unknown command '" + command + "'");
}

py::dict half_space_pressure(const std::string& lower, const std::string& upper, double distance, double T1,
                             double T2, double Te, double tolerance) {
  ote::QuadratureSpec spec;
  spec.tolerance = tolerance;
  const ote::SlabPair pair{ote::slab(ote::builtin_material(lower), std::nullopt),
                           ote::slab(ote::builtin_material(upper), std::nullopt), distance};
  ote::PressureResult r;
  {
    py::gil_scoped_release release;
    r = ote::slab_pressure(pair, {T1, T2, Te}, spec);
  }
  py::dict d;
  d["total"] = r.total;
  d["eq_part"] = r.eq_part;
  d["delta_part"] = r.delta_part;
  d["error"] = r.error_estimate;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Casimir-Lifshitz pressure between lamellar gratings out of thermal equilibrium";
  m.attr("__version__") = OTE_VERSION;

  // translators run newest first, so the base class goes in before its children
  py::register_exception<ote::Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<ote::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ote::UsageError>(m, "UsageError", PyExc_ValueError);
  py::register_exception<ote::ValidationError>(m, "ValidationError", PyExc_ValueError);

  m.def("builtin_materials", &ote::builtin_material_names);
  m.def(
      "permittivity", [](const std::string& name, double omega) { return ote::builtin_material(name).permittivity(omega); },
      py::arg("material"), py::arg("omega"), "Complex permittivity at real angular frequency omega (rad/s).");
  m.def(
      "permittivity_imag",
      [](const std::string& name, double xi) { return ote::builtin_material(name).permittivity_imag_axis(xi); },
      py::arg("material"), py::arg("xi"), "Permittivity at imaginary frequency i*xi.");
  m.def(
      "echo_config", [](const std::string& text) { return ote::RunConfig::parse(text, "<python>").echo(); },
      py::arg("text"), "Parse, validate and re-emit a configuration in canonical form.");
  m.def("run", &run, py::arg("command"), py::arg("config"), py::arg("workers") = 1,
        "Run a CLI command on a JSON configuration and return the CSV text.");
  m.def("half_space_pressure", &half_space_pressure, py::arg("lower"), py::arg("upper"), py::arg("distance"),
        py::arg("T1") = 300.0, py::arg("T2") = 300.0, py::arg("Te") = 300.0, py::arg("tolerance") = 1e-4,
        "Pressure (N/m^2) between two planar half-spaces of built-in materials; negative attracts.");
}
