#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "jacobi_watson/abel.hpp"
#include "jacobi_watson/cli.hpp"
#include "jacobi_watson/errors.hpp"
#include "jacobi_watson/estimates.hpp"
#include "jacobi_watson/harmonic.hpp"
#include "jacobi_watson/kernels.hpp"
#include "jacobi_watson/measure.hpp"
#include "jacobi_watson/polynomials.hpp"
#include "jacobi_watson/test_functions.hpp"

namespace py = pybind11;

namespace {

jw::KernelEval kernel(double alpha, double beta, double r, double x, double y, const std::string& method) {
  const jw::JacobiParams p(alpha, beta);
  const jw::AbelParameter ab(r);
  if (method == "series") return jw::watson_kernel_series(p, ab, x, y);
  if (method == "bailey") return jw::watson_kernel_bailey(p, ab, x, y);
  if (method == "integral") return jw::watson_kernel_integral(p, ab, x, y);
  if (method == "auto") return jw::watson_kernel(p, ab, x, y);
  jw::fail(jw::ErrorKind::domain, "unknown kernel method: " + method);
}

py::dict cz(const std::string& measure, const std::string& f, double lambda) {
  const auto m = jw::WeightedMeasure::parse(measure);
  jw::JacobiParams p(0, 0);
  if (m.family() == "jacobi") p = {m.params()[0], m.params()[1]};
  const auto d = jw::cz_decompose(m, jw::test_functions::parse(f, p), lambda);
  py::list intervals;
  for (const auto& I : d.intervals)
    intervals.append(py::dict(py::arg("left") = I.left, py::arg("right") = I.right, py::arg("mass") = I.mass,
                              py::arg("average") = I.average()));
  return py::dict(py::arg("lambda") = d.lambda, py::arg("l1_norm") = d.l1_norm, py::arg("trivial") = d.trivial,
                  py::arg("intervals") = intervals, py::arg("mass_G") = d.mass_G,
                  py::arg("mass_Gstar") = d.mass_Gstar, py::arg("pass") = d.all_pass());
}

py::tuple run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = jw::cli::run(std::move(args), out, err);
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Jacobi expansions, Watson kernels and the harmonic-analysis estimates around them.";

  static py::exception<jw::Error> error(m, "Error", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr ep) {
    try {
      if (ep) std::rethrow_exception(ep);
    } catch (const jw::Error& e) {
      const std::string msg = std::string(jw::to_string(e.kind())) + ": " + e.what();
      PyErr_SetString(error.ptr(), msg.c_str());
    }
  });

  m.def("jacobi_eval", [](double a, double b, int n, double x) { return jw::jacobi_eval({a, b}, n, x); },
        py::arg("alpha"), py::arg("beta"), py::arg("n"), py::arg("x"));
  m.def("jacobi_norm", [](double a, double b, int n) { return jw::jacobi_norm({a, b}, n); }, py::arg("alpha"),
        py::arg("beta"), py::arg("n"), "h_n = int P_n^2 dJ.");
  m.def(
      "gauss_jacobi",
      [](double a, double b, int n) {
        auto rule = jw::compute_gauss_jacobi({a, b}, n);
        return py::make_tuple(rule.nodes, rule.weights);
      },
      py::arg("alpha"), py::arg("beta"), py::arg("n"), "Nodes and weights of the n-point rule.");

  py::class_<jw::KernelEval>(m, "KernelEval")
      .def_readonly("value", &jw::KernelEval::value)
      .def_readonly("error_estimate", &jw::KernelEval::error_estimate)
      .def_readonly("terms_or_nodes", &jw::KernelEval::terms_or_nodes)
      .def_property_readonly("method", [](const jw::KernelEval& k) { return std::string(jw::to_string(k.method)); })
      .def("__repr__", [](const jw::KernelEval& k) {
        return "KernelEval(value=" + std::to_string(k.value) + ", method=" + std::string(jw::to_string(k.method)) +
               ")";
      });
  m.def("watson_kernel", &kernel, py::arg("alpha"), py::arg("beta"), py::arg("r"), py::arg("x"), py::arg("y"),
        py::arg("method") = "auto", "K(r, x, y) by 'series', 'bailey', 'integral' or 'auto'.");
  m.def(
      "kernel_mass",
      [](double a, double b, double r, double x) { return jw::kernel_mass({a, b}, jw::AbelParameter(r), x); },
      py::arg("alpha"), py::arg("beta"), py::arg("r"), py::arg("x"));

  m.def(
      "abel_mean",
      [](const std::string& f, double a, double b, double r, double x) {
        const jw::JacobiParams p(a, b);
        return jw::abel_mean(jw::test_functions::parse(f, p), p, r, x);
      },
      py::arg("f"), py::arg("alpha"), py::arg("beta"), py::arg("r"), py::arg("x"),
      "Abel mean of a named test function ('sign', 'P:3', 'bump', ...).");

  m.def("cz_decompose", &cz, py::arg("measure"), py::arg("f"), py::arg("lambda_"));

  m.def(
      "poisson_mass", [](const std::string& tag, double alpha) {
        return jw::poisson_mass(jw::parse_poisson_tag(tag), alpha).value;
      },
      py::arg("tag"), py::arg("alpha") = 0.0);
  m.def(
      "kernel_shift_violations",
      [](double eta, const std::vector<double>& z, const std::vector<double>& a) {
        return jw::kernel_shift_check(eta, z, a).violations;
      },
      py::arg("eta"), py::arg("z_grid"), py::arg("a_grid"));

  m.def("run_cli", &run_cli, py::arg("args"),
        "Runs the command-line front end in process; returns (exit code, stdout, stderr).");
}
