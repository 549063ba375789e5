#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "urlab/brownian.hpp"
#include "urlab/config.hpp"
#include "urlab/dispatch.hpp"
#include "urlab/errors.hpp"
#include "urlab/linear_process.hpp"
#include "urlab/monte_carlo.hpp"
#include "urlab/rls.hpp"
#include "urlab/stats.hpp"

namespace py = pybind11;
using namespace urlab;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

FilterSpec filter_from(const py::object& obj) {
  if (py::isinstance<FilterSpec>(obj)) return obj.cast<FilterSpec>();
  if (py::isinstance<FiniteFilter>(obj)) return {obj.cast<FiniteFilter>()};
  if (py::isinstance<GeometricFilter>(obj)) return {obj.cast<GeometricFilter>()};
  if (py::isinstance<PolynomialFilter>(obj)) return {obj.cast<PolynomialFilter>()};
  return {FiniteFilter{obj.cast<std::vector<double>>()}};
}

py::dict trajectory_dict(const Trajectory& t) {
  py::dict d;
  d["n"] = t.n;
  d["beta"] = t.beta;
  d["omega"] = to_array(t.omega);
  d["eta"] = to_array(t.eta);
  d["x"] = to_array(t.x);
  d["epsilon"] = to_array(t.epsilon);
  d["y"] = to_array(t.y);
  return d;
}

}  // namespace

PYBIND11_MODULE(_urlab, m) {
  m.doc() = "Unit-root regression prediction experiments";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DegeneratePath>(m, "DegeneratePath", PyExc_RuntimeError);

  py::enum_<Family>(m, "Family")
      .value("gaussian", Family::gaussian)
      .value("laplace", Family::laplace)
      .value("uniform", Family::uniform);

  py::class_<InnovationSpec>(m, "InnovationSpec")
      .def(py::init([](double sigma_omega_sq, double sigma_sq, double pi, Family family) {
             return InnovationSpec{sigma_omega_sq, sigma_sq, pi, family};
           }),
           py::arg("sigma_omega_sq") = 1.0, py::arg("sigma_sq") = 1.0, py::arg("pi") = 0.0,
           py::arg("family") = Family::gaussian)
      .def_readwrite("sigma_omega_sq", &InnovationSpec::sigma_omega_sq)
      .def_readwrite("sigma_sq", &InnovationSpec::sigma_sq)
      .def_readwrite("pi", &InnovationSpec::pi)
      .def_readwrite("family", &InnovationSpec::family);

  m.def("derived_correlation", [](const InnovationSpec& s) {
    const auto c = derived_correlation(s);
    return py::make_tuple(c.rho, c.sigma_theta_sq);
  });
  m.def("validation_errors", py::overload_cast<const InnovationSpec&>(&validation_errors));

  py::class_<FiniteFilter>(m, "FiniteFilter")
      .def(py::init<std::vector<double>>(), py::arg("coeffs"))
      .def_readwrite("coeffs", &FiniteFilter::coeffs);
  py::class_<GeometricFilter>(m, "GeometricFilter")
      .def(py::init<double, double>(), py::arg("a"), py::arg("r"))
      .def_readwrite("a", &GeometricFilter::a)
      .def_readwrite("r", &GeometricFilter::r);
  py::class_<PolynomialFilter>(m, "PolynomialFilter")
      .def(py::init<double, double>(), py::arg("a"), py::arg("p"))
      .def_readwrite("a", &PolynomialFilter::a)
      .def_readwrite("p", &PolynomialFilter::p);

  py::class_<MaterializedFilter>(m, "MaterializedFilter")
      .def_readonly("coeffs", &MaterializedFilter::coeffs)
      .def_readonly("theta", &MaterializedFilter::theta)
      .def_readonly("tails", &MaterializedFilter::tails)
      .def_readonly("neglected_abs_tail", &MaterializedFilter::neglected_abs_tail)
      .def_property_readonly("lag", &MaterializedFilter::lag)
      .def_property_readonly("iota_sq", &MaterializedFilter::iota_sq)
      .def("lambda_", &MaterializedFilter::lambda, py::arg("sigma_omega"));

  m.def(
      "materialize_filter",
      [](const py::object& family, double tail_tol) {
        FilterSpec spec = filter_from(family);
        spec.tail_tol = tail_tol;
        return materialize_filter(spec);
      },
      py::arg("family"), py::arg("tail_tol") = 1e-8);

  m.def(
      "generate_path",
      [](const py::object& filter, const InnovationSpec& innov, double beta, std::size_t n, std::uint64_t seed,
         std::uint64_t replication) {
        Stream stream(seed, replication, StreamRole::innovations);
        return trajectory_dict(
            generate_path(materialize_filter(filter_from(filter)), InnovationSampler(innov), beta, n, stream));
      },
      py::arg("filter"), py::arg("innovations"), py::arg("beta"), py::arg("n"), py::arg("seed"),
      py::arg("replication") = 0);

  m.def(
      "run_path",
      [](const py::object& filter, const InnovationSpec& innov, double beta, std::size_t n, std::uint64_t seed,
         std::uint64_t replication) {
        Stream stream(seed, replication, StreamRole::innovations);
        const PathStats s = run_path(
            generate_path(materialize_filter(filter_from(filter)), InnovationSampler(innov), beta, n, stream));
        py::dict d;
        d["n"] = s.n;
        d["ape"] = s.ape;
        d["excess_ape"] = s.excess_ape;
        d["fpe_stat"] = s.fpe_stat();
        d["norm_est_sq"] = s.norm_est_sq();
        d["x_n_sq_over_n"] = s.x_n_sq_over_n();
        d["beta_hat"] = s.beta_hat;
        return d;
      },
      py::arg("filter"), py::arg("innovations"), py::arg("beta"), py::arg("n"), py::arg("seed"),
      py::arg("replication") = 0);

  m.def(
      "rls_fit",
      [](const std::vector<double>& x, const std::vector<double>& y_next) {
        if (x.size() != y_next.size()) throw ConfigError("x and y_next must have equal length");
        RlsState s;
        for (std::size_t i = 0; i < x.size(); ++i) s.update(x[i], y_next[i]);
        return s.beta_hat();
      },
      py::arg("x"), py::arg("y_next"));

  m.def("ito_integral", [](const std::vector<double>& w, const std::vector<double>& dv) { return ito_integral(w, dv); });
  m.def("time_integral_sq", [](const std::vector<double>& w) { return time_integral_sq(w); });
  m.def("ks_distance", &ks_distance);

  m.def(
      "mse_limit_formula",
      [](double rho, double sigma_omega, double sigma_theta, double iota_sq, double k1, double k2) {
        LimitParams p;
        p.rho = rho;
        p.sigma_omega = sigma_omega;
        p.sigma_theta = sigma_theta;
        p.iota_sq = iota_sq;
        return mse_limit_formula(p, k1, k2);
      },
      py::arg("rho"), py::arg("sigma_omega"), py::arg("sigma_theta"), py::arg("iota_sq") = 1.0,
      py::arg("k1") = kCanonicalK1, py::arg("k2") = kCanonicalK2);

  m.def(
      "estimate_constants",
      [](std::size_t grid, std::size_t reps, std::uint64_t seed, unsigned workers, bool with_cross) {
        ConstantsConfig cfg;
        cfg.m = grid;
        cfg.reps = reps;
        cfg.base_seed = seed;
        cfg.workers = workers;
        cfg.with_cross = with_cross;
        py::gil_scoped_release release;
        const ConstantsReport rep = estimate_constants(cfg);
        py::gil_scoped_acquire acquire;
        py::dict d;
        for (const auto& e : rep.estimates) {
          py::dict row;
          row["value"] = e.value;
          row["se"] = e.se;
          row["m"] = e.m;
          row["reps"] = e.reps;
          row["seed"] = e.seed;
          d[py::str(e.name)] = row;
        }
        return d;
      },
      py::arg("grid") = 4096, py::arg("reps") = 100000, py::arg("seed") = 20240501, py::arg("workers") = 0,
      py::arg("with_cross") = true);

  m.def(
      "run_config",
      [](const std::string& text) {
        const LabConfig cfg = parse_config(text);
        std::vector<McSummary> rows;
        {
          py::gil_scoped_release release;
          rows = run(cfg.experiment);
        }
        py::list out;
        for (const auto& r : rows) {
          py::dict d;
          d["statistic"] = r.statistic;
          d["n"] = r.n;
          d["mean"] = r.mean;
          d["mc_se"] = r.mc_se;
          d["reps"] = r.reps;
          d["seed"] = r.seed;
          d["target"] = r.target;
          out.append(d);
        }
        return out;
      },
      py::arg("config_text"), "Runs [experiment] of a config and returns one summary row per statistic and n.");

  m.def("parse_config", [](const std::string& text) { return serialize_config(parse_config(text)); },
        py::arg("config_text"), "Validates a config and returns its canonical text.");

  m.def(
      "dispatch",
      [](const std::string& subcommand, const std::string& config_text, const std::filesystem::path& out_dir,
         std::optional<std::uint64_t> seed, std::optional<unsigned> workers, bool strict) {
        RunOptions opt;
        opt.subcommand = subcommand;
        opt.output_dir = out_dir;
        opt.seed = seed;
        opt.workers = workers;
        opt.strict = strict;
        const LabConfig cfg = parse_config(config_text);
        std::ostringstream log;
        DispatchResult res;
        {
          py::gil_scoped_release release;
          res = dispatch(opt, cfg, log);
        }
        py::list checks;
        for (const auto& c : res.checks) {
          py::dict d;
          d["name"] = c.name;
          d["target"] = c.target;
          d["estimate"] = c.estimate;
          d["se"] = c.se;
          d["tolerance"] = c.tolerance;
          d["pass"] = c.pass;
          checks.append(d);
        }
        return py::make_tuple(res.exit_code, checks, res.manifest.dump());
      },
      py::arg("subcommand"), py::arg("config_text"), py::arg("out_dir"), py::arg("seed") = py::none(),
      py::arg("workers") = py::none(), py::arg("strict") = false);
}
