#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <numbers>
#include <optional>
#include <sstream>

#include "whitham/cli.hpp"
#include "whitham/constructions.hpp"
#include "whitham/errors.hpp"
#include "whitham/experiments.hpp"
#include "whitham/solver.hpp"

namespace py = pybind11;
using namespace whitham;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Field to_field(const Array& values, double length) {
  if (values.ndim() != 1) throw ConfigError("field values must be a one-dimensional array");
  std::vector<double> data(values.data(), values.data() + values.size());
  const PeriodicGrid grid(length, data.size());
  return Field::from_values(grid, std::move(data));
}

Array to_array(const Field& f) {
  Array out(static_cast<py::ssize_t>(f.size()));
  auto w = out.mutable_unchecked<1>();
  for (std::size_t j = 0; j < f.size(); ++j) w(static_cast<py::ssize_t>(j)) = f[j];
  return out;
}

Array to_array(const std::vector<double>& v) {
  Array out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

py::object report_dict(const ExperimentReport& rep) {
  return py::module_::import("json").attr("loads")(render_json(rep.to_json()));
}

const char* status_name(RunStatus s) {
  switch (s) {
    case RunStatus::completed:
      return "completed";
    case RunStatus::blowup:
      return "blowup";
    case RunStatus::step_underflow:
      return "step_underflow";
  }
  return "unknown";
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spectral solver and experiments for Whitham-type equations";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<OutOfRangeError>(m, "OutOfRangeError", PyExc_IndexError);
  py::register_exception<GridMismatchError>(m, "GridMismatchError", PyExc_ValueError);
  py::register_exception<InsufficientDataError>(m, "InsufficientDataError", PyExc_RuntimeError);
  py::register_exception<UnsupportedFamilyError>(m, "UnsupportedFamilyError", PyExc_TypeError);

  py::class_<Symbol>(m, "Symbol")
      .def_static("parse", &Symbol::parse, py::arg("spelling"))
      .def_static("whitham", &Symbol::whitham)
      .def_static("fkdv", &Symbol::fkdv, py::arg("alpha"))
      .def_static("kdv", &Symbol::kdv)
      .def_static("bo", &Symbol::bo)
      .def_static("zero", &Symbol::zero)
      .def_static("custom", &Symbol::custom, py::arg("xi"), py::arg("m"))
      .def("__call__", [](const Symbol& s, const py::array_t<double>& xi) {
        return py::vectorize([&s](double x) { return s(x); })(xi);
      })
      .def_property_readonly("spelling", &Symbol::spelling)
      .def_property_readonly("growth_exponent", &Symbol::growth_exponent)
      .def_property_readonly("gamma", &Symbol::gamma)
      .def("__repr__", [](const Symbol& s) { return "Symbol('" + s.spelling() + "')"; });

  m.def("grid_points", [](double length, std::size_t n) { return to_array(PeriodicGrid(length, n).points()); },
        py::arg("length"), py::arg("n_modes"));

  m.def("sobolev_norm", [](const Array& u, double length, double s) {
        return sobolev_norm(to_field(u, length), s);
      }, py::arg("values"), py::arg("length"), py::arg("s"));
  m.def("derivative", [](const Array& u, double length) {
        return to_array(derivative(to_field(u, length)));
      }, py::arg("values"), py::arg("length"));
  m.def("apply_multiplier", [](const Array& u, double length, const Symbol& sym) {
        return to_array(apply_multiplier(to_field(u, length), sym));
      }, py::arg("values"), py::arg("length"), py::arg("symbol"));
  m.def("dealiased_product", [](const Array& a, const Array& b, double length) {
        return to_array(dealiased_product(to_field(a, length), to_field(b, length)));
      }, py::arg("a"), py::arg("b"), py::arg("length"));
  m.def("shift", [](const Array& u, double length, double a) {
        return to_array(shift(to_field(u, length), a));
      }, py::arg("values"), py::arg("length"), py::arg("a"));

  m.def("conserved_quantities", [](const Array& u, double length, const Symbol& sym) {
        const auto c = conserved_quantities(to_field(u, length), sym);
        py::dict d;
        d["mean"] = c.mean;
        d["l2"] = c.l2;
        d["hamiltonian"] = c.hamiltonian;
        return d;
      }, py::arg("values"), py::arg("length"), py::arg("symbol"));

  m.def(
      "evolve",
      [](const Array& u0, double length, const Symbol& sym, double t_end, std::optional<double> dt,
         double cfl, double s, int monitor_every, double blowup_threshold) {
        SolverConfig cfg;
        if (dt) cfg.dt_policy = FixedStep{*dt};
        else cfg.dt_policy = CflStep{cfl};
        cfg.t_end = t_end;
        cfg.monitor_every = monitor_every;
        cfg.blowup_threshold = blowup_threshold;
        cfg.validate();
        const Field f = to_field(u0, length);
        std::optional<EvolveResult> run;
        {
          py::gil_scoped_release release;
          run.emplace(evolve(f, sym, cfg, s));
        }
        const EvolveResult& res = *run;
        py::dict out;
        out["final"] = to_array(res.final);
        out["status"] = status_name(res.status);
        out["stop_time"] = res.stop_time;
        out["steps"] = res.steps;
        out["times"] = to_array(res.diagnostics.times);
        out["mean"] = to_array(res.diagnostics.mean);
        out["l2"] = to_array(res.diagnostics.l2);
        out["hamiltonian"] = to_array(res.diagnostics.hamiltonian);
        out["hs_norm"] = to_array(res.diagnostics.hs_norm);
        out["fitted_cs"] = res.diagnostics.fitted_cs;
        return out;
      },
      py::arg("u0"), py::arg("length"), py::arg("symbol"), py::arg("t_end"),
      py::arg("dt") = py::none(), py::arg("cfl") = 0.5, py::arg("s") = 2.0,
      py::arg("monitor_every") = 10, py::arg("blowup_threshold") = 1e6);

  m.def("bump", py::vectorize(&bump), py::arg("x"));
  m.def("bump_tilde", py::vectorize(&bump_tilde), py::arg("x"));
  m.def("bump_l2_norm", &bump_l2_norm);
  m.def("bump_tilde_l2_norm", &bump_tilde_l2_norm);

  m.def("periodic_approx", [](int n, double omega, double s, const Symbol& sym, double t, std::size_t modes) {
        const PeriodicFamilyParams p{n, omega, s};
        p.validate();
        return to_array(periodic_approx(p, sym, t, PeriodicGrid(2.0 * std::numbers::pi, modes)));
      }, py::arg("n"), py::arg("omega"), py::arg("s"), py::arg("symbol"), py::arg("t"), py::arg("modes"));
  m.def("periodic_residual", [](int n, double omega, double s, const Symbol& sym, double t, std::size_t modes) {
        const PeriodicFamilyParams p{n, omega, s};
        p.validate();
        const PeriodicGrid g(2.0 * std::numbers::pi, modes);
        py::dict d;
        d["computed"] = to_array(residual(PeriodicFamily(p, sym, g), sym, t));
        d["exact"] = to_array(periodic_error_exact(p, sym, t, g));
        return d;
      }, py::arg("n"), py::arg("omega"), py::arg("s"), py::arg("symbol"), py::arg("t"), py::arg("modes"));

  m.def("verify_error_decay", [](const Symbol& sym, double s, double sigma, std::vector<int> n, int jobs) {
        ErrorDecayConfig cfg;
        cfg.s = s;
        cfg.sigma = sigma;
        cfg.n_list = std::move(n);
        ExperimentReport rep;
        {
          py::gil_scoped_release release;
          rep = verify_error_decay(sym, cfg, {jobs, {}});
        }
        return report_dict(rep);
      }, py::arg("symbol"), py::arg("s") = 2.0, py::arg("sigma") = 0.0,
      py::arg("n") = std::vector<int>{8, 16, 32, 64}, py::arg("jobs") = 1);
  m.def("verify_symbol_conditions", [](std::vector<std::string> symbols) {
        SymbolConditionsConfig cfg;
        cfg.symbols = std::move(symbols);
        return report_dict(verify_symbol_conditions(cfg));
      }, py::arg("symbols") = std::vector<std::string>{});
  m.def("run_periodic_nonuniform", [](const Symbol& sym, double s, std::vector<int> n, double t_star, int jobs) {
        PeriodicNonuniformConfig cfg;
        cfg.s = s;
        cfg.n_list = std::move(n);
        cfg.t_star = t_star;
        ExperimentReport rep;
        {
          py::gil_scoped_release release;
          rep = run_periodic_nonuniform(sym, cfg, {jobs, {}});
        }
        return report_dict(rep);
      }, py::arg("symbol"), py::arg("s") = 2.0, py::arg("n") = std::vector<int>{32, 64, 128, 256},
      py::arg("t_star") = 1.0, py::arg("jobs") = 1);

  m.def("cli", [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      }, py::arg("args"), "Runs the command line tool in-process; returns (exit_code, stdout, stderr).");
}
