#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <vector>

#include "ahi/dataio.hpp"
#include "ahi/distributions.hpp"
#include "ahi/error.hpp"
#include "ahi/exact_expectation.hpp"
#include "ahi/indices.hpp"
#include "ahi/montecarlo.hpp"

namespace py = pybind11;
using namespace ahi;

namespace {

Sample to_sample(const py::array_t<double, py::array::c_style | py::array::forcecast>& x) {
  const auto buf = x.unchecked<1>();
  std::vector<double> v(buf.data(0), buf.data(0) + buf.shape(0));
  return Sample(std::move(v));
}

ExactRoute parse_route(const std::string& route) {
  if (route == "auto") return ExactRoute::automatic;
  if (route == "generic") return ExactRoute::generic;
  if (route == "family") return ExactRoute::family;
  throw DomainError("route must be auto, generic or family, got " + route);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Arithmetic-harmonic inequality index";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<MomentExistenceError>(m, "MomentExistenceError", base.ptr());
  py::register_exception<IndexUndefinedError>(m, "IndexUndefinedError", base.ptr());
  py::register_exception<UnsupportedCaseError>(m, "UnsupportedCaseError", base.ptr());
  py::register_exception<EvaluationError>(m, "EvaluationError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<DataError>(m, "DataError", base.ptr());
  py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());

  py::class_<DistributionSpec>(m, "DistributionSpec")
      .def_static("gig", &DistributionSpec::gig, py::arg("p"), py::arg("a"), py::arg("b"))
      .def_static("inverse_gaussian", &DistributionSpec::inverse_gaussian, py::arg("mu"), py::arg("lam"))
      .def_static("gamma", &DistributionSpec::gamma, py::arg("alpha"), py::arg("beta") = 1.0)
      .def_property_readonly("family", &DistributionSpec::family_name)
      .def_property_readonly("params", &DistributionSpec::params_string)
      .def("__eq__", [](const DistributionSpec& a, const DistributionSpec& b) { return a == b; })
      .def("__repr__", &DistributionSpec::label);

  m.def("gig", &DistributionSpec::gig, py::arg("p"), py::arg("a"), py::arg("b"));
  m.def("inverse_gaussian", &DistributionSpec::inverse_gaussian, py::arg("mu"), py::arg("lam"));
  m.def("gamma", &DistributionSpec::gamma, py::arg("alpha"), py::arg("beta") = 1.0);

  py::class_<MomentSet>(m, "MomentSet")
      .def_readonly("mu", &MomentSet::mu)
      .def_readonly("nu", &MomentSet::nu)
      .def_readonly("var_x", &MomentSet::var_x)
      .def_readonly("var_inv", &MomentSet::var_inv)
      .def_readonly("cov", &MomentSet::cov);

  py::class_<IndexEstimate>(m, "IndexEstimate")
      .def_readonly("j_hat", &IndexEstimate::j_hat)
      .def_readonly("std_error", &IndexEstimate::std_error)
      .def_readonly("ci_low", &IndexEstimate::ci_low)
      .def_readonly("ci_high", &IndexEstimate::ci_high)
      .def_readonly("confidence_level", &IndexEstimate::confidence_level)
      .def_readonly("bias_correction", &IndexEstimate::bias_correction)
      .def_readonly("n", &IndexEstimate::n)
      .def_readonly("degenerate", &IndexEstimate::degenerate)
      .def("corrected", &IndexEstimate::corrected);

  py::class_<ExactExpectation>(m, "ExactExpectation")
      .def_readonly("value", &ExactExpectation::value)
      .def_readonly("error_estimate", &ExactExpectation::error_estimate)
      .def_property_readonly("method", [](const ExactExpectation& e) { return method_name(e.method); });

  m.def("moment_set", &moment_set, py::arg("spec"));
  m.def("population_index", &population_index, py::arg("spec"));
  m.def("population_atkinson", &population_atkinson, py::arg("spec"), py::arg("eps"));
  m.def("asymptotic_variance", [](const DistributionSpec& s) { return asymptotic_variance(moment_set(s)); },
        py::arg("spec"));
  m.def("first_order_bias", &first_order_bias, py::arg("spec"), py::arg("n"));
  m.def(
      "estimate_index",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& x, double level) {
        return estimate_index(to_sample(x), level);
      },
      py::arg("x"), py::arg("level") = 0.95);
  m.def(
      "estimate_atkinson",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& x, double eps) {
        return estimate_atkinson(to_sample(x), eps);
      },
      py::arg("x"), py::arg("eps"));
  m.def(
      "expected_jhat",
      [](const DistributionSpec& spec, std::size_t n, const std::string& route) {
        py::gil_scoped_release release;
        return expected_jhat(spec, n, parse_route(route));
      },
      py::arg("spec"), py::arg("n"), py::arg("route") = "auto");
  m.def(
      "sample",
      [](const DistributionSpec& spec, std::size_t n, std::uint64_t seed) {
        const Sample s = sample(spec, n, seed);
        py::array_t<double> out(static_cast<py::ssize_t>(s.n()));
        std::copy(s.values().begin(), s.values().end(), out.mutable_data());
        return out;
      },
      py::arg("spec"), py::arg("n"), py::arg("seed"));
  m.def(
      "summarize",
      [](const py::array_t<double, py::array::c_style | py::array::forcecast>& x) {
        return py::module_::import("json").attr("loads")(summary_to_json(summarize(to_sample(x))));
      },
      py::arg("x"));

  py::class_<SimulationConfig>(m, "SimulationConfig")
      .def(py::init<>())
      .def_static("from_json", &config_from_json, py::arg("text"))
      .def_readwrite("specs", &SimulationConfig::specs)
      .def_readwrite("n_grid", &SimulationConfig::n_grid)
      .def_readwrite("replications", &SimulationConfig::replications)
      .def_readwrite("eps_grid", &SimulationConfig::eps_grid)
      .def_readwrite("master_seed", &SimulationConfig::master_seed)
      .def_readwrite("confidence_level", &SimulationConfig::confidence_level)
      .def_readwrite("workers", &SimulationConfig::workers);

  py::class_<CellResult>(m, "CellResult")
      .def_readonly("spec", &CellResult::spec)
      .def_readonly("n", &CellResult::n)
      .def_readonly("eps", &CellResult::eps)
      .def_readonly("true_value", &CellResult::true_value)
      .def_readonly("bias", &CellResult::bias)
      .def_readonly("mse", &CellResult::mse)
      .def_readonly("variance", &CellResult::variance)
      .def_readonly("bias_se", &CellResult::bias_se)
      .def_readonly("coverage", &CellResult::coverage)
      .def_readonly("skipped", &CellResult::skipped)
      .def_readonly("note", &CellResult::note);

  py::class_<SimulationResult>(m, "SimulationResult")
      .def_readonly("cells", &SimulationResult::cells)
      .def_readonly("replications", &SimulationResult::replications)
      .def_readonly("master_seed", &SimulationResult::master_seed)
      .def("to_csv", [](const SimulationResult& r) { return to_csv(r); })
      .def("to_json", [](const SimulationResult& r) { return to_json(r); });

  m.def("run_grid", &run_grid, py::arg("config"), py::call_guard<py::gil_scoped_release>());
  m.def("atkinson_sweep", &atkinson_sweep, py::arg("config"), py::call_guard<py::gil_scoped_release>());
  m.def("ci_coverage", &ci_coverage, py::arg("config"), py::call_guard<py::gil_scoped_release>());
}
