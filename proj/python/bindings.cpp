// Python bindings for the main laboratory operations. Fields cross the
// boundary as numpy arrays: 1D shape (n,), 2D shape (n, n) row-major.
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ekp/chks_solver.hpp"
#include "ekp/ekp_solver.hpp"
#include "ekp/galerkin.hpp"
#include "ekp/harness.hpp"
#include "ekp/poisson.hpp"

namespace py = pybind11;
using namespace ekp;

namespace {

ScalarField field_from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& arr) {
  const auto info = arr.request();
  Grid g;
  if (info.ndim == 1) {
    g = Grid::make(1, int(info.shape[0]));
  } else if (info.ndim == 2 && info.shape[0] == info.shape[1]) {
    g = Grid::make(2, int(info.shape[0]));
  } else {
    throw std::invalid_argument("expected shape (n,) or (n, n)");
  }
  ScalarField f(g);
  const double* src = static_cast<const double*>(info.ptr);
  std::copy(src, src + g.size(), f.values.begin());
  return f;
}

py::array_t<double> array_from_field(const ScalarField& f) {
  py::array_t<double> arr(f.grid.dim == 1 ? std::vector<py::ssize_t>{f.grid.n}
                                          : std::vector<py::ssize_t>{f.grid.n, f.grid.n});
  std::copy(f.values.begin(), f.values.end(), static_cast<double*>(arr.request().ptr));
  return arr;
}

VectorField vector_from_arrays(const std::vector<py::array_t<double>>& comps) {
  if (comps.empty() || comps.size() > 2) throw std::invalid_argument("expected 1 or 2 components");
  std::vector<ScalarField> fields;
  for (const auto& c : comps) fields.push_back(field_from_array(c));
  if (int(fields.size()) != fields[0].grid.dim)
    throw std::invalid_argument("component count must match dimension");
  VectorField v(fields[0].grid);
  for (std::size_t a = 0; a < fields.size(); ++a) v.comp[a] = fields[a].values;
  return v;
}

std::vector<py::array_t<double>> arrays_from_vector(const VectorField& v) {
  std::vector<py::array_t<double>> out;
  for (int a = 0; a < v.grid.dim; ++a) {
    ScalarField f(v.grid);
    f.values = v.comp[a];
    out.push_back(array_from_field(f));
  }
  return out;
}

py::dict row_dict(const SweepRow& row) {
  py::dict d;
  d["epsilon"] = row.epsilon;
  d["E_rel_0"] = row.e_rel_0;
  d["E_rel_tau"] = row.e_rel_tau;
  d["dissipation"] = row.dissipation;
  d["wasserstein"] = row.wasserstein;
  d["err_e_l2"] = row.err_e_l2;
  d["energy_margin"] = row.energy_margin;
  d["mass_drift"] = row.mass_drift;
  d["min_rho"] = row.min_rho;
  d["max_rho"] = row.max_rho;
  d["failed"] = row.failed;
  d["config_hash"] = row.config_hash;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "pseudo-spectral laboratory for the high-friction relaxation limit";

  py::class_<Params>(m, "Params")
      .def(py::init<>())
      .def_readwrite("a", &Params::a)
      .def_readwrite("b", &Params::b)
      .def_readwrite("c", &Params::c)
      .def_readwrite("gamma", &Params::gamma)
      .def_readwrite("epsilon", &Params::epsilon)
      .def("validate", &Params::validate, py::arg("dim"));

  m.def("gradient", [](py::array_t<double> f) { return arrays_from_vector(gradient(field_from_array(f))); });
  m.def("laplacian", [](py::array_t<double> f) { return array_from_field(laplacian(field_from_array(f))); });
  m.def("integrate", [](py::array_t<double> f) { return integrate(field_from_array(f)); });
  m.def("dealias", [](py::array_t<double> f) { return array_from_field(dealias(field_from_array(f))); });

  m.def("solve_poisson", [](py::array_t<double> rho) {
    const PotentialSolve sol = solve_poisson(field_from_array(rho));
    return py::make_tuple(array_from_field(sol.phi), arrays_from_vector(sol.grad_phi));
  });

  m.def("rhs_chks",
        [](py::array_t<double> rho, const Params& p) { return array_from_field(rhs_chks(field_from_array(rho), p)); });
  m.def("chks_free_energy",
        [](py::array_t<double> rho, const Params& p) { return chks_free_energy(field_from_array(rho), p); });
  m.def(
      "chks_evolve",
      [](py::array_t<double> rho, const Params& p, double dt, double t_end) {
        ChksConfig cfg;
        cfg.params = p;
        cfg.dt = dt;
        cfg.t_end = t_end;
        const ChksRunResult res = chks_run(field_from_array(rho), cfg);
        return py::make_tuple(array_from_field(res.samples.back().rho), res.free_energy_monotone,
                              res.envelope_ok);
      },
      py::arg("rho"), py::arg("params"), py::arg("dt"), py::arg("t_end"));

  m.def(
      "ekp_evolve",
      [](py::array_t<double> rho, std::vector<py::array_t<double>> momentum, const Params& p, double dt,
         double t_end) {
        State init{field_from_array(rho), vector_from_arrays(momentum), 0.0};
        EkpConfig cfg;
        cfg.params = p;
        cfg.dt = dt;
        cfg.t_end = t_end;
        const EkpRunResult res = ekp_run(init, cfg);
        const State& last = res.samples.back();
        return py::make_tuple(array_from_field(last.rho), arrays_from_vector(last.momentum),
                              res.energy_inequality_ok, res.energy_margin);
      },
      py::arg("rho"), py::arg("momentum"), py::arg("params"), py::arg("dt"), py::arg("t_end"));

  m.def("identity_residuals",
        [](py::array_t<double> rho, const Params& p) { return identity_residuals(field_from_array(rho), p); });

  m.def("relative_entropy", [](py::array_t<double> rho, std::vector<py::array_t<double>> momentum,
                               py::array_t<double> r, const Params& p) {
    State st{field_from_array(rho), vector_from_arrays(momentum), 0.0};
    return relative_entropy(st, field_from_array(r), p);
  });

  m.def("make_profile", [](int dim, int n, const std::string& name, double mean, double amplitude,
                           unsigned long seed) {
    return array_from_field(make_profile(Grid::make(dim, n), name, mean, amplitude, seed));
  });

  m.def("well_prepared_init", [](py::array_t<double> r0, const Params& p) {
    const State st = well_prepared_init(field_from_array(r0), p);
    return py::make_tuple(array_from_field(st.rho), arrays_from_vector(st.momentum));
  });

  m.def("fit_rate", [](std::vector<double> eps, std::vector<double> values) {
    const FitResult fit = fit_rate(eps, values);
    return py::make_tuple(fit.slope, fit.intercept, fit.residual);
  });

  m.def(
      "run_sweep",
      [](const std::string& config_path, const std::string& out_dir) {
        SweepConfig cfg = parse_sweep_config(config_path);
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        const SweepReport report = run_sweep(cfg);
        emit_report(report, cfg.output_dir);
        py::list rows;
        for (const auto& row : report.rows) rows.append(row_dict(row));
        return rows;
      },
      py::arg("config_path"), py::arg("out_dir") = std::string());
}
