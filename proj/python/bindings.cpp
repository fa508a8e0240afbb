#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "dossfbm/bench.hpp"
#include "dossfbm/config.hpp"
#include "dossfbm/errors.hpp"
#include "dossfbm/fbm.hpp"
#include "dossfbm/scheme.hpp"

namespace py = pybind11;
using namespace dossfbm;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
  return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

py::tuple sample_path(std::size_t steps, double horizon, double hurst, std::uint64_t seed,
                      const std::string& generator) {
  const FbmPath p = generate_path(parse_generator(generator), steps, horizon, hurst, seed);
  return py::make_tuple(to_array(p.times), to_array(p.values));
}

py::dict simulate(const std::string& config_json) {
  const RunConfig cfg = parse_run_config(config_json);
  const SchemeConfig& sc = cfg.scheme;
  SchemeRun run;
  ReferenceRun ref;
  {
    py::gil_scoped_release release;
    run = solve_x_scheme(sc);
    ref = solve_x_reference_on(make_coefficients(sc.coeffs), run.path, sc.x0, sc.oracle_tol);
  }
  const Trajectory x_ref = restrict_to(ref.x_fine, static_cast<std::size_t>(sc.q));
  py::dict out;
  out["times"] = to_array(run.x_n.times);
  out["x_n"] = to_array(run.x_n.values);
  out["x_ref"] = to_array(x_ref.values);
  out["y_nn"] = to_array(run.y_nn.values);
  out["path_times"] = to_array(run.path.times);
  out["path"] = to_array(run.path.values);
  out["sup_error"] = sup_error(run.x_n, x_ref);
  out["log_bound"] = run.constants.log_theorem_bound(sc.n);
  out["constants_json"] = to_json(run.constants).dump();
  return out;
}

std::string converge(const std::string& config_json) {
  const RunConfig cfg = parse_run_config(config_json);
  ConvergenceReport rep;
  {
    py::gil_scoped_release release;
    rep = run_convergence(convergence_config(cfg));
  }
  return to_json(rep).dump();
}

std::string verify(const std::string& config_json) {
  const RunConfig cfg = parse_run_config(config_json);
  nlohmann::json lemmas = nlohmann::json::array();
  bool passed = false;
  {
    py::gil_scoped_release release;
    const LemmaReport rep = run_lemma_suite(lemma_config(cfg));
    for (const auto& r : rep.results) lemmas.push_back(to_json(r));
    passed = rep.passed();
  }
  return nlohmann::json{{"passed", passed}, {"lemmas", lemmas}}.dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Doss-Sussmann scheme for SDEs driven by fractional Brownian motion";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  m.def("covariance", &covariance, py::arg("s"), py::arg("t"), py::arg("hurst"),
        "E[B_s B_t] for fractional Brownian motion.");
  m.def("sample_path", &sample_path, py::arg("steps"), py::arg("horizon"), py::arg("hurst"),
        py::arg("seed"), py::arg("generator") = "circulant",
        "Seeded fBm path on a uniform grid; returns (times, values).");
  m.def("simulate", &simulate, py::arg("config_json"));
  m.def("converge", &converge, py::arg("config_json"));
  m.def("verify", &verify, py::arg("config_json"));
}
