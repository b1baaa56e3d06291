#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "ahcount/aggregation.hpp"
#include "ahcount/boundary_spectrum.hpp"
#include "ahcount/errors.hpp"
#include "ahcount/harness.hpp"
#include "ahcount/oracle.hpp"
#include "ahcount/potential.hpp"
#include "ahcount/prufer.hpp"
#include "ahcount/tail.hpp"

namespace py = pybind11;
using namespace ahc;

namespace {

py::object count_to_python(const CountValue& c) {
  if (c.is_exact()) return py::int_(*c.exact());
  return py::none();
}

py::dict zresult_dict(const ZResult& r) {
  py::dict d;
  d["Z"] = r.Z;
  d["ambiguous"] = r.ambiguous;
  d["note"] = r.note;
  d["rho_stop"] = r.rho_stop;
  d["rho_end"] = r.rho_end;
  d["rho_switch"] = r.rho_switch;
  d["certificate"] = to_string(r.certificate);
  d["steps"] = r.steps;
  return d;
}

BoundarySpectrum make_boundary(const std::string& kind, int n, const std::vector<double>& lengths) {
  ExperimentConfig cfg;
  cfg.boundary = kind;
  cfg.n = n;
  cfg.lengths = lengths;
  return cfg.boundary_spectrum();
}

}  // namespace

PYBIND11_MODULE(_ahcount, m) {
  m.doc() = "Eigenvalue counting for radial Schrodinger operators on asymptotically hyperbolic ends";

  py::enum_<BoundaryCondition>(m, "BoundaryCondition")
      .value("Dirichlet", BoundaryCondition::Dirichlet)
      .value("Neumann", BoundaryCondition::Neumann);
  py::enum_<Family>(m, "Family")
      .value("PowerLaw", Family::PowerLaw)
      .value("Critical", Family::Critical)
      .value("IteratedLog", Family::IteratedLog);

  py::class_<PotentialSpec>(m, "PotentialSpec")
      .def_static("power_law", &PotentialSpec::power_law, py::arg("c"), py::arg("delta"))
      .def_static("critical", &PotentialSpec::critical, py::arg("c"))
      .def_static("iterated_log", &PotentialSpec::iterated_log, py::arg("N"), py::arg("cN"))
      .def("with_perturbation", &PotentialSpec::with_perturbation, py::arg("a"), py::arg("eps"))
      .def("with_rho0", &PotentialSpec::with_rho0, py::arg("rho0"))
      .def(
          "with_B",
          [](const PotentialSpec& s, std::function<double(double)> fn, double sup) {
            return s.with_B({std::move(fn), sup});
          },
          py::arg("fn"), py::arg("sup"))
      .def(
          "with_X",
          [](const PotentialSpec& s, std::function<double(double)> fn, double sup) {
            return s.with_X({std::move(fn), sup});
          },
          py::arg("fn"), py::arg("sup"))
      .def_property_readonly("family", &PotentialSpec::family)
      .def_property_readonly("c", &PotentialSpec::c)
      .def_property_readonly("delta", &PotentialSpec::delta)
      .def_property_readonly("rho0", &PotentialSpec::rho0)
      .def("__repr__", &PotentialSpec::describe);

  m.def("eval_Q", &eval_Q, py::arg("spec"), py::arg("zeta"), py::arg("rho"));
  m.def("iter_log", py::overload_cast<int, double>(&iter_log), py::arg("j"), py::arg("rho"));
  m.def("auto_rho0", &auto_rho0, py::arg("spec"));

  m.def(
      "sphere_mode",
      [](int n, std::uint64_t k) {
        const auto l = sphere_mode(n, k);
        return py::make_tuple(l.zeta, l.multiplicity);
      },
      py::arg("n"), py::arg("k"));
  m.def(
      "cumulative_multiplicity",
      [](const std::string& kind, int n, double bound, const std::vector<double>& lengths) {
        return count_to_python(make_boundary(kind, n, lengths).cumulative_multiplicity(bound));
      },
      py::arg("kind"), py::arg("n"), py::arg("bound"), py::arg("lengths") = std::vector<double>{});

  m.def(
      "prufer_count",
      [](const PotentialSpec& spec, double zeta, double E, BoundaryCondition bc, std::optional<double> window) {
        const RadialProblem p(spec, zeta, E, bc);
        const ZResult r = window ? prufer_count(p, StopRule::fixed_window(*window)) : prufer_count(p);
        return zresult_dict(r);
      },
      py::arg("spec"), py::arg("zeta"), py::arg("E"), py::arg("bc"), py::arg("window") = py::none());

  m.def(
      "truncation_point",
      [](const PotentialSpec& spec, double zeta, double E) { return truncation_interval(spec, zeta, E).rho_stop; },
      py::arg("spec"), py::arg("zeta"), py::arg("E"));

  m.def(
      "tail_certificate",
      [](const PotentialSpec& spec, double zeta, double E, double rho_star) {
        const TailCertificate c = certify_tail_positive(spec, zeta, E, rho_star);
        py::dict d;
        d["verdict"] = to_string(c.verdict);
        d["margin"] = c.margin;
        d["reason"] = c.reason;
        return d;
      },
      py::arg("spec"), py::arg("zeta"), py::arg("E"), py::arg("rho_star"));

  m.def(
      "zeta_breakpoints",
      [](const PotentialSpec& spec, double E, BoundaryCondition bc) {
        const BreakpointSearch s = zeta_breakpoints(spec, E, bc);
        std::vector<double> logs;
        for (const auto& b : s.breakpoints) logs.push_back(b.log_zeta);
        return logs;
      },
      py::arg("spec"), py::arg("E"), py::arg("bc"), "Natural logs of the breakpoints, level 1 first.");

  m.def(
      "count_eigenvalues",
      [](const PotentialSpec& spec, double E, BoundaryCondition bc, const std::string& kind, int n,
         const std::vector<double>& lengths) {
        const CountResult r = assemble_count(spec, make_boundary(kind, n, lengths), E, bc);
        py::dict d;
        d["N_E"] = count_to_python(r.N_E);
        d["log10_N_E"] = r.N_E.log10();
        d["log10_error"] = r.N_E.log10_error();
        d["Z0"] = r.Z0;
        d["breakpoints"] = r.breakpoints.size();
        d["flags"] = r.flags;
        return d;
      },
      py::arg("spec"), py::arg("E"), py::arg("bc"), py::arg("boundary") = "sphere", py::arg("n") = 1,
      py::arg("lengths") = std::vector<double>{});

  m.def(
      "oracle_count",
      [](const PotentialSpec& spec, double E, BoundaryCondition bc, double L, double h, const std::string& kind,
         int n) {
        const OracleCount c = full_oracle_count(spec, make_boundary(kind, n, {}), E, L, h, bc);
        return py::int_(py::str(c.N.str()));
      },
      py::arg("spec"), py::arg("E"), py::arg("bc"), py::arg("L"), py::arg("h"), py::arg("boundary") = "sphere",
      py::arg("n") = 1);

  m.def(
      "run_sweep",
      [](const std::string& config_text) {
        std::istringstream in(config_text);
        const ExperimentConfig cfg = parse_config(in);
        std::vector<SweepRow> rows;
        {
          py::gil_scoped_release release;
          rows = run_sweep(cfg);
        }
        std::ostringstream out;
        write_csv(out, rows);
        return out.str();
      },
      py::arg("config_text"), "Runs a sweep from INI text and returns the CSV.");

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
}
