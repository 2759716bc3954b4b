#include "svi/geometry.hpp"
#include "svi/increase.hpp"
#include "svi/setmaps.hpp"
#include "svi/spec_io.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace py = pybind11;

namespace {

std::tuple<std::string, bool> run(const std::string& text, const std::string& command,
                                  const std::vector<std::string>& only, int jobs, bool timings,
                                  std::optional<std::uint64_t> seed) {
  svi::RunResult res;
  {
    py::gil_scoped_release release;
    const auto spec = svi::parse_spec(text, seed, svi::tolerance_override_from_env());
    res = svi::run_spec(spec, svi::RunOptions{command, only, jobs, timings});
  }
  return {svi::dump_report(res.report), res.violated};
}

std::tuple<int, int> validate(const std::string& text) {
  const auto spec = svi::parse_spec(text);
  return {static_cast<int>(spec.instances.size()), static_cast<int>(spec.analyses.size())};
}

std::string csv(const std::string& report, const std::string& series) {
  return svi::emit_csv(svi::Json::parse(report), series);
}

double polytope_excess(const std::vector<svi::Vector>& a, const std::vector<svi::Vector>& b) {
  return svi::excess(svi::ConvexBody::polytope(a), svi::ConvexBody::polytope(b));
}

svi::ConeSpec cone_of(const std::optional<std::vector<svi::Vector>>& generators, int dim) {
  return generators ? svi::ConeSpec::from_generators(*generators, dim) : svi::ConeSpec::orthant(dim);
}

double fan_phi(const std::vector<svi::Matrix>& matrices, const svi::Vector& x,
               const std::optional<svi::Matrix>& p_matrix, const std::optional<svi::Vector>& p,
               const std::optional<std::vector<svi::Vector>>& cone) {
  if (matrices.empty()) throw svi::InputError("a fan needs at least one matrix");
  const int m = static_cast<int>(matrices.front().rows());
  const svi::Vector pv = p ? *p : svi::Vector::Zero(p_matrix ? p_matrix->cols() : 1);
  return svi::phi(svi::SetMap::fan(matrices, p_matrix), cone_of(cone, m), pv, x);
}

}  // namespace

PYBIND11_MODULE(_svi, m) {
  m.doc() = "Stability analysis of parametric set-valued inclusions";
  m.attr("__version__") = SVI_VERSION;

  py::register_exception<svi::InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<svi::InstanceError>(m, "InstanceError", PyExc_ValueError);

  m.def("run_spec", &run, py::arg("text"), py::arg("command") = "certify",
        py::arg("only") = std::vector<std::string>{}, py::arg("jobs") = 1, py::arg("timings") = false,
        py::arg("seed") = py::none(),
        "Parse a spec document and run it; returns (report text, violated).");
  m.def("validate", &validate, py::arg("text"), "Parse a spec document; returns (instances, analyses).");
  m.def("emit_csv", &csv, py::arg("report"), py::arg("series"));
  m.def("input_hash", [](const std::string& s) { return svi::fnv1a_hex(s); }, py::arg("text"));
  m.def("excess", &polytope_excess, py::arg("a"), py::arg("b"),
        "Excess e(conv a, conv b) between two polytopes given by their points.");
  m.def("fan_phi", &fan_phi, py::arg("matrices"), py::arg("x"), py::arg("p_matrix") = py::none(),
        py::arg("p") = py::none(), py::arg("cone") = py::none(),
        "phi_F(p, x) for F(p,x) = conv{L x} + P p; the cone defaults to the nonnegative orthant.");
  m.def("cov", &svi::cov_matrix, py::arg("matrix"), "Covering constant of a linear map.");
}
