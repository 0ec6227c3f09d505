#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "micromorph/error.hpp"
#include "micromorph/runner.hpp"

namespace py = pybind11;
using namespace micromorph;

namespace {

py::array_t<double> to_array(const Tensor& t) {
  std::vector<py::ssize_t> shape(static_cast<std::size_t>(t.rank()), kDim);
  py::array_t<double> out(shape);
  std::copy(t.entries().begin(), t.entries().end(), out.mutable_data());
  return out;
}

std::vector<Point> to_points(const py::array_t<double, py::array::c_style | py::array::forcecast>& pts) {
  if (pts.ndim() != 2 || pts.shape(1) != 3) throw py::value_error("points must have shape (N, 3)");
  std::vector<Point> out(static_cast<std::size_t>(pts.shape(0)));
  auto r = pts.unchecked<2>();
  for (py::ssize_t k = 0; k < pts.shape(0); ++k) out[k] = {r(k, 0), r(k, 1), r(k, 2)};
  return out;
}

py::dict pair_dict(const IntegralPair& p) {
  py::dict d;
  d["surface"] = to_array(p.surface);
  d["volume"] = to_array(p.volume);
  d["discrepancy"] = p.discrepancy;
  return d;
}

std::vector<Command> commands_from(const std::optional<std::vector<std::string>>& names) {
  if (!names) return RunConfig{}.commands;
  std::vector<Command> out;
  for (const auto& n : *names) {
    const auto c = parse_command(n);
    if (!c) throw py::value_error("unknown command: " + n);
    out.push_back(*c);
  }
  return out;
}

py::dict report_dict(const Report& r) {
  py::list rows;
  for (const auto& row : r.rows) {
    py::dict d;
    d["quantity"] = row.quantity;
    d["component"] = row.component;
    d["surface"] = row.surface ? py::object(py::float_(*row.surface)) : py::none();
    d["volume"] = row.volume ? py::object(py::float_(*row.volume)) : py::none();
    d["value"] = row.value;
    d["tolerance"] = row.tolerance;
    d["kind"] = row.kind == ReportRow::Kind::kAtMost ? "at_most" : row.kind == ReportRow::Kind::kAtLeast ? "at_least" : "info";
    d["pass"] = row.pass();
    rows.append(d);
  }
  py::dict d;
  d["scenario"] = r.scenario;
  d["passed"] = r.passed();
  d["seed"] = r.seed;
  d["points"] = r.points;
  d["surface_order"] = r.surface_order;
  d["volume_order"] = r.volume_order;
  d["geometry"] = r.geometry;
  d["rows"] = rows;
  d["warnings"] = r.warnings;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Micromorphic elasticity: field checks, balance laws and J, L, M integrals";

  static py::exception<Error> base(m, "Error", PyExc_RuntimeError);
  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", base.ptr());
  py::register_exception<ShapeError>(m, "ShapeError", base.ptr());
  py::register_exception<ConstitutiveError>(m, "ConstitutiveError", base.ptr());
  py::register_exception<NumericError>(m, "NumericError", base.ptr());

  py::class_<Scenario>(m, "Scenario")
      .def_static("load", &resolve_scenario, py::arg("name_or_path"), "Builtin name or scenario file path.")
      .def_static("parse", [](const std::string& text) { return parse_scenario(text); }, py::arg("text"))
      .def_readonly("name", &Scenario::name)
      .def_readonly("description", &Scenario::description)
      .def_property_readonly("isotropic", [](const Scenario& s) { return s.material.isotropic(); })
      .def_property_readonly("homogeneous", [](const Scenario& s) { return s.material.homogeneous(); })
      .def_property_readonly("manufactured", [](const Scenario& s) { return s.provenance == Provenance::kManufactured; })
      .def("__repr__", [](const Scenario& s) { return "<Scenario " + s.name + ">"; })
      .def(
          "sample_points",
          [](const Scenario& s, std::size_t count, std::uint64_t seed) {
            const auto pts = sample_points(s.fields.domain(), count, seed, 0.9);
            py::array_t<double> out({static_cast<py::ssize_t>(pts.size()), py::ssize_t{3}});
            auto w = out.mutable_unchecked<2>();
            for (std::size_t k = 0; k < pts.size(); ++k) {
              for (int i = 0; i < 3; ++i) w(k, i) = pts[k][i];
            }
            return out;
          },
          py::arg("count") = 100, py::arg("seed") = 1)
      .def(
          "el_residual",
          [](const Scenario& s, const py::array_t<double, py::array::c_style | py::array::forcecast>& pts) {
            const auto xs = to_points(pts);
            py::array_t<double> out(static_cast<py::ssize_t>(xs.size()));
            for (std::size_t k = 0; k < xs.size(); ++k) {
              out.mutable_at(k) = max_norm(euler_lagrange_residual(s.fields, s.material, xs[k]));
            }
            return out;
          },
          py::arg("points"), "Max-norm of the Euler-Lagrange residual at each point.")
      .def(
          "balance_residuals",
          [](const Scenario& s, const py::array_t<double, py::array::c_style | py::array::forcecast>& pts, bool fd) {
            const auto xs = to_points(pts);
            py::array_t<double> out({static_cast<py::ssize_t>(xs.size()), py::ssize_t{3}});
            auto w = out.mutable_unchecked<2>();
            for (std::size_t k = 0; k < xs.size(); ++k) {
              const BalanceResiduals r = fd ? balance_residuals_fd(s.fields, s.material, xs[k], s.dims, s.options)
                                            : balance_residuals(s.fields, s.material, xs[k], s.dims, s.options);
              w(k, 0) = max_abs(r.momentum);
              w(k, 1) = max_abs(r.angular);
              w(k, 2) = std::abs(r.scaling);
            }
            return out;
          },
          py::arg("points"), py::arg("fd") = false,
          "Columns: momentum, angular momentum and scaling balance residuals (max-norms).")
      .def(
          "integrals",
          [](const Scenario& s, std::optional<int> surface_order, std::optional<int> volume_order) {
            QuadratureRule rule = s.rule;
            if (surface_order) rule.surface_order = *surface_order;
            if (volume_order) rule.volume_order = *volume_order;
            IntegralReport r;
            {
              py::gil_scoped_release release;
              r = compute_integrals(s.fields, s.material, rule, s.dims, s.options);
            }
            py::dict d;
            d["J"] = pair_dict(r.J);
            d["L"] = pair_dict(r.L);
            d["M"] = pair_dict(r.M);
            d["kappa_m_volume"] = r.kappa_m_volume;
            d["geometry"] = r.geometry;
            d["surface_order"] = r.surface_order;
            d["volume_order"] = r.volume_order;
            return d;
          },
          py::arg("surface_order") = py::none(), py::arg("volume_order") = py::none());

  m.def("list_scenarios", [] {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& b : builtin_list()) out.emplace_back(b.name, b.description);
    return out;
  });
  m.def("scenario_source", [](const std::string& name) { return std::string(builtin_source(name)); },
        py::arg("name"));

  m.def(
      "run",
      [](const std::string& scenario, std::optional<std::vector<std::string>> commands, std::size_t points,
         std::uint64_t seed, std::optional<int> surface_order, std::optional<int> volume_order,
         bool energy_without_sources, int threads) {
        RunConfig c;
        c.scenario = scenario;
        c.commands = commands_from(commands);
        c.points = points;
        c.seed = seed;
        c.surface_order = surface_order;
        c.volume_order = volume_order;
        c.energy_without_sources = energy_without_sources;
        c.threads = threads;
        const Scenario sc = resolve_scenario(scenario);
        if (threads > 0) set_evaluation_threads(threads);
        Report r;
        {
          py::gil_scoped_release release;
          r = run_scenario(sc, c);
        }
        return report_dict(r);
      },
      py::arg("scenario") = "a", py::arg("commands") = py::none(), py::arg("points") = 100, py::arg("seed") = 1,
      py::arg("surface_order") = py::none(), py::arg("volume_order") = py::none(),
      py::arg("energy_without_sources") = false, py::arg("threads") = 0,
      "Run a scenario and return the report as a dict.");

  m.def(
      "format_report",
      [](const std::string& scenario, const std::string& format, std::size_t points, std::uint64_t seed) {
        const auto f = parse_format(format);
        if (!f) throw py::value_error("unknown format: " + format);
        RunConfig c;
        c.scenario = scenario;
        c.points = points;
        c.seed = seed;
        const Scenario sc = resolve_scenario(scenario);
        Report r;
        {
          py::gil_scoped_release release;
          r = run_scenario(sc, c);
        }
        return format_report(r, *f);
      },
      py::arg("scenario") = "a", py::arg("format") = "csv", py::arg("points") = 100, py::arg("seed") = 1);

  m.def(
      "isotropic_basis",
      [](int rank) {
        std::vector<py::array_t<double>> out;
        for (const Tensor& t : isotropic_basis(rank)) out.push_back(to_array(t));
        return out;
      },
      py::arg("rank"));

  m.def(
      "gauss_legendre",
      [](int n) {
        std::vector<double> x, w;
        gauss_legendre(n, x, w);
        return std::make_pair(x, w);
      },
      py::arg("n"));

  m.def("set_threads", &set_evaluation_threads, py::arg("threads"));
}
