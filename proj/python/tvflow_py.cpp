#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tvflow/asymptotics.hpp"
#include "tvflow/error.hpp"
#include "tvflow/flow.hpp"
#include "tvflow/io.hpp"
#include "tvflow/profiles.hpp"
#include "tvflow/prox.hpp"
#include "tvflow/sfde.hpp"
#include "tvflow/stepfn.hpp"

namespace py = pybind11;
using namespace tvflow;

namespace {

std::vector<double> to_vec(std::span<const double> s) { return {s.begin(), s.end()}; }

std::vector<std::pair<double, double>> atom_pairs(const DeltaMeasure& v) {
  std::vector<std::pair<double, double>> out;
  for (const Atom& a : v.atoms()) out.emplace_back(a.x, a.a);
  return out;
}

DeltaMeasure measure_from(const std::vector<std::pair<double, double>>& atoms) {
  std::vector<Atom> out;
  for (const auto& [x, a] : atoms) out.push_back({x, a});
  return DeltaMeasure(std::move(out));
}

SfdeProblem sfde_problem(const std::optional<std::pair<double, double>>& dirichlet) {
  if (!dirichlet) return {};
  return {SfdeMode::Dirichlet, {dirichlet->first, dirichlet->second}};
}

py::dict rate_sample_dict(const RateSample& s) {
  py::dict d;
  d["t"] = s.t;
  d["remaining"] = s.remaining;
  d["applicable"] = s.applicable;
  d["error_lower"] = s.error_lower;
  d["error_upper"] = s.error_upper;
  d["error_exact"] = s.error_exact;
  d["bound"] = s.bound;
  d["bound_pass"] = s.bound_pass;
  d["sup_lower"] = s.sup_lower;
  d["sup_upper"] = s.sup_upper;
  d["sup_pass"] = s.sup_pass;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact total variation flow for step data in one dimension.";

  static py::exception<Error> tvflow_error(m, "TvflowError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = tvflow_error;
      py::object inst = exc(e.what());
      inst.attr("code") = qualified_name(e.code());
      PyErr_SetObject(exc.ptr(), inst.ptr());
    }
  });

  py::enum_<BoundaryMode>(m, "BoundaryMode")
      .value("CAUCHY", BoundaryMode::Cauchy)
      .value("NEUMANN", BoundaryMode::Neumann);

  py::class_<StepFunction>(m, "StepFunction")
      .def(py::init<>())
      .def_static("cauchy", &StepFunction::cauchy, py::arg("breakpoints"), py::arg("values"))
      .def_static(
          "neumann",
          [](std::pair<double, double> domain, std::vector<double> bps, std::vector<double> vals) {
            return StepFunction::neumann({domain.first, domain.second}, std::move(bps),
                                         std::move(vals));
          },
          py::arg("domain"), py::arg("breakpoints"), py::arg("values"))
      .def_static("indicator", &StepFunction::indicator, py::arg("lo"), py::arg("hi"),
                  py::arg("c") = 1.0)
      .def_property_readonly("mode", &StepFunction::mode)
      .def_property_readonly("domain",
                             [](const StepFunction& u) {
                               return std::make_pair(u.domain().lo, u.domain().hi);
                             })
      .def_property_readonly("breakpoints", [](const StepFunction& u) { return to_vec(u.breakpoints()); })
      .def_property_readonly("values", [](const StepFunction& u) { return to_vec(u.values()); })
      .def("__call__", &StepFunction::operator(), py::arg("x"))
      .def("__eq__", &StepFunction::operator==)
      .def("__len__", &StepFunction::num_intervals)
      .def("to_json", [](const StepFunction& u) { return dump(to_json(u)); })
      .def_static("from_json",
                  [](const std::string& text) { return step_function_from_json(parse_json(text)); })
      .def("__repr__", [](const StepFunction& u) { return "StepFunction(" + dump(to_json(u)) + ")"; });

  m.def("mass", &mass);
  m.def("total_variation", &total_variation);
  m.def("extrema_count", &extrema_count);
  m.def("sup_norm", &sup_norm);
  m.def("lp_distance", &lp_distance, py::arg("u"), py::arg("v"), py::arg("p") = 1.0);

  m.def("advance", &advance, py::arg("u0"), py::arg("t"));
  m.def("states_at", &states_at, py::arg("u0"), py::arg("times"));
  m.def("extinction_time", &extinction_time);
  m.def(
      "events",
      [](const StepFunction& u0, double t_end) {
        std::vector<std::pair<double, std::string>> out;
        const Trajectory traj = evolve(u0, t_end);
        for (const FlowEvent& e : traj.events()) out.emplace_back(e.time, to_string(e.kind));
        return out;
      },
      py::arg("u0"), py::arg("t_end") = kInf);
  m.def(
      "relative_error",
      [](const StepFunction& u0, double t) { return relative_error(evolve(u0, kInf), t); },
      py::arg("u0"), py::arg("t"));

  m.def(
      "tv_prox",
      [](const StepFunction& u0, double h) {
        const ProxResult r = tv_prox(u0, h);
        return py::make_tuple(r.u_h, r.objective, check_certificate(u0, r).max());
      },
      py::arg("u0"), py::arg("h"),
      "Returns (u_h, objective, largest certificate residual).");
  m.def("discrete_flow", &discrete_flow, py::arg("u0"), py::arg("h"), py::arg("steps"));

  m.def(
      "level_cut",
      [](const std::vector<double>& knots, const std::vector<double>& values, double t) {
        const LevelCut c = evolve_unimodal(PiecewiseLinear(knots, values), t);
        return py::make_tuple(c.level, c.rate);
      },
      py::arg("knots"), py::arg("values"), py::arg("t"), "Returns (level, dlevel/dt).");

  m.def(
      "evolve_deltas",
      [](const std::vector<std::pair<double, double>>& atoms, double t,
         std::optional<std::pair<double, double>> dirichlet) {
        return atom_pairs(evolve_deltas(measure_from(atoms), t, sfde_problem(dirichlet)));
      },
      py::arg("atoms"), py::arg("t"), py::arg("dirichlet") = py::none());
  m.def(
      "evolve_via_tvf",
      [](const std::vector<std::pair<double, double>>& atoms, double t,
         std::optional<std::pair<double, double>> dirichlet) {
        return atom_pairs(evolve_via_tvf(measure_from(atoms), t, sfde_problem(dirichlet)));
      },
      py::arg("atoms"), py::arg("t"), py::arg("dirichlet") = py::none());
  m.def(
      "deltas_extinction_time",
      [](const std::vector<std::pair<double, double>>& atoms,
         std::optional<std::pair<double, double>> dirichlet) {
        return deltas_extinction_time(measure_from(atoms), sfde_problem(dirichlet));
      },
      py::arg("atoms"), py::arg("dirichlet") = py::none());

  m.def(
      "verify_rate",
      [](const std::string& xi, const std::string& mode, const std::vector<double>& remaining,
         double eps) {
        const RateReport r = verify_rate(parse_rate(xi), parse_rate_mode(mode), remaining, eps);
        py::dict d;
        d["xi"] = r.xi;
        d["c0"] = r.c0;
        d["T"] = r.T;
        py::list samples;
        for (const RateSample& s : r.samples) samples.append(rate_sample_dict(s));
        d["samples"] = samples;
        return d;
      },
      py::arg("xi") = "sqrt", py::arg("mode") = "no-rate",
      py::arg("remaining") = std::vector<double>{0.5, 0.1, 0.01}, py::arg("eps") = 1e-4);
}
