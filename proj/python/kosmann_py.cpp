// Python bindings for the main operations: loading geometry files, running
// check suites, the reduction and bundle-oracle reports, direct Killing
// checks, and scalar expression evaluation with exact jets.

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "kosmann/checks.hpp"
#include "kosmann/covlie.hpp"
#include "kosmann/error.hpp"
#include "kosmann/expr.hpp"
#include "kosmann/geospec.hpp"
#include "kosmann/scalarfield.hpp"

namespace py = pybind11;
using namespace kosmann;

namespace {

py::object parse_json(const std::string& text) {
  return py::module_::import("json").attr("loads")(text);
}

py::object run_check(const GeometrySpec& spec, const std::string& suite,
                     std::uint64_t seed, std::optional<double> tol) {
  if (!is_suite_name(suite))
    throw ValidationError("unknown suite '" + suite + "'");
  SuiteConfig cfg;
  cfg.seed = seed;
  cfg.tol = tol;
  const auto start = std::chrono::steady_clock::now();
  const auto records = run_suite(spec, suite, cfg);
  const double ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - start)
                        .count();
  return parse_json(check_report_json(spec, suite, cfg, records, ms));
}

py::dict run_killing(const GeometrySpec& spec, const std::string& field,
                     int points, std::uint64_t seed) {
  const VectorFieldSpec* vf = spec.find_field(field);
  if (!vf)
    throw ValidationError("no vector field named '" + field + "' in " + spec.path);
  const KillingReport kr =
      killing_check(spec.coframe, vf->field, spec.points(points, seed));
  py::dict out;
  out["killing"] = kr.killing;
  out["residual"] = kr.residual;
  out["metric_killing"] = kr.metricKilling;
  out["metric_residual"] = kr.metricResidual;
  return out;
}

SF compile(const std::string& text, const std::vector<std::string>& coords) {
  return sf_expr(parse_expression(text, coords));
}

}  // namespace

PYBIND11_MODULE(_kosmann, m) {
  m.doc() = "coframe geometry engine: kosmann derivatives, check suites, "
            "kaluza-klein reduction, bundle oracle";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ParseError>(m, "ExpressionError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ArithmeticError);

  py::class_<GeometrySpec>(m, "Spec")
      .def_property_readonly("path", [](const GeometrySpec& s) { return s.path; })
      .def_property_readonly("chart", [](const GeometrySpec& s) { return s.chart.name; })
      .def_property_readonly("coords", [](const GeometrySpec& s) { return s.chart.coords; })
      .def_property_readonly("dim", [](const GeometrySpec& s) { return s.chart.dim(); })
      .def_property_readonly("signature",
                             [](const GeometrySpec& s) {
                               return py::make_tuple(s.sig.p, s.sig.q);
                             })
      .def_property_readonly("fields",
                             [](const GeometrySpec& s) {
                               std::vector<std::string> names;
                               for (const auto& vf : s.vfields) names.push_back(vf.name);
                               return names;
                             })
      .def_property_readonly("has_reduction",
                             [](const GeometrySpec& s) { return s.kk.present; })
      .def_property_readonly("expected",
                             [](const GeometrySpec& s) {
                               py::dict out;
                               for (const auto& [name, want] : s.expect.suites)
                                 out[py::str(name)] = want;
                               return out;
                             })
      .def("sample_points",
           [](const GeometrySpec& s, int count, std::uint64_t seed) {
             return s.points(count, seed);
           },
           py::arg("count") = 8, py::arg("seed") = 4242)
      .def("__repr__", [](const GeometrySpec& s) {
        return "<Spec '" + s.chart.name + "' dim " + std::to_string(s.chart.dim()) +
               " from " + s.path + ">";
      });

  m.def("load", &load_spec, py::arg("path"),
        "Load and fully validate a geometry file.");
  m.def("load_text", &load_spec_text, py::arg("text"),
        py::arg("name") = std::string("<string>"),
        "Parse a geometry description from a string.");

  m.def("suite_names", [] { return suite_names(); },
        "Names accepted by check(), including 'all'.");
  m.def("check", &run_check, py::arg("spec"), py::arg("suite"),
        py::arg("seed") = 4242, py::arg("tol") = std::nullopt,
        "Run one check suite and return the report as a dict.");
  m.def("reduce",
        [](const GeometrySpec& spec, std::uint64_t seed) {
          return parse_json(reduction_report(spec, seed).json);
        },
        py::arg("spec"), py::arg("seed") = 4242,
        "Run the reduction pipeline on the file's fiber block.");
  m.def("oracle",
        [](const GeometrySpec& spec, const std::string& group, std::uint64_t seed,
           std::optional<double> tol) {
          return parse_json(oracle_report(spec, group_from_tag(group), seed, tol).json);
        },
        py::arg("spec"), py::arg("group"), py::arg("seed") = 4242,
        py::arg("tol") = std::nullopt,
        "Compare bundle-level Lie derivatives against the base formulas.");
  m.def("killing", &run_killing, py::arg("spec"), py::arg("field"),
        py::arg("points") = 16, py::arg("seed") = 4242,
        "Killing verdict for a named vector field of a loaded spec.");

  m.def("evaluate",
        [](const std::string& text, const std::vector<std::string>& coords,
           const std::vector<double>& point) {
          return sf_value(compile(text, coords), point);
        },
        py::arg("text"), py::arg("coords"), py::arg("point"),
        "Evaluate a scalar expression at a chart point.");
  m.def("partial",
        [](const std::string& text, const std::vector<std::string>& coords,
           int axis, const std::vector<double>& point) {
          return sf_value(sf_partial(compile(text, coords), axis), point);
        },
        py::arg("text"), py::arg("coords"), py::arg("axis"), py::arg("point"),
        "Exact partial derivative of an expression at a point.");
  m.def("canonical",
        [](const std::string& text, const std::vector<std::string>& coords) {
          return print_expression(parse_expression(text, coords));
        },
        py::arg("text"), py::arg("coords"),
        "Parse an expression and print it back.");
}
