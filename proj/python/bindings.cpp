#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ptsol/analytic.hpp"
#include "ptsol/config.hpp"
#include "ptsol/error.hpp"
#include "ptsol/linearization.hpp"
#include "ptsol/propagation.hpp"
#include "ptsol/spectral_grid.hpp"
#include "ptsol/spectrum.hpp"
#include "ptsol/sweep.hpp"

namespace py = pybind11;
using namespace ptsol;

namespace {

Knowns make_knowns(const std::string& family, double a, double b, double kappa,
                   std::optional<double> phi0, std::optional<double> g1,
                   std::optional<double> g2, std::optional<double> v1) {
  Knowns k;
  if (family == "class_i") k.family = Family::ClassI;
  else if (family == "class_ii") k.family = Family::ClassII;
  else throw Error(ErrorCode::InvalidArgument, "family must be 'class_i' or 'class_ii'");
  k.a = a;
  k.b = b;
  k.kappa = kappa;
  k.phi0 = phi0;
  k.g1 = g1;
  k.g2 = g2;
  k.v1 = v1;
  return k;
}

py::dict report_dict(const StabilityReport& r) {
  py::dict d;
  d["verdict"] = to_string(r.verdict);
  d["max_growth"] = r.max_growth;
  d["zero_modes"] = r.zero_modes;
  d["discrete"] = r.discrete;
  d["band"] = py::make_tuple(r.continuous_band.re_offset, r.continuous_band.im_edge);
  d["tol_instab"] = r.tol_instab;
  d["tol_zero"] = r.tol_zero;
  d["pairing_defect"] = r.pairing_defect;
  d["conjugate_defect"] = r.conjugate_defect;
  return d;
}

}  // namespace

PYBIND11_MODULE(_ptsol, m) {
  m.doc() = "Soliton stability toolkit: closed-form solutions, linear spectra, sweeps, propagation";

  py::register_exception<Error>(m, "PtsolError", PyExc_RuntimeError);
  m.def("error_code", [](const std::string& what) { return what.substr(0, what.find(':')); },
        "Leading error code of a PtsolError message.");

  py::enum_<Family>(m, "Family").value("CLASS_I", Family::ClassI).value("CLASS_II", Family::ClassII);

  py::class_<Grid>(m, "Grid")
      .def(py::init<int, double>(), py::arg("n"), py::arg("half_width"))
      .def_property_readonly("n", &Grid::size)
      .def_property_readonly("half_width", &Grid::half_width)
      .def_property_readonly("spacing", &Grid::spacing)
      .def_property_readonly("points", &Grid::points)
      .def("__repr__", [](const Grid& g) {
        return "Grid(n=" + std::to_string(g.size()) + ", half_width=" + std::to_string(g.half_width()) + ")";
      });

  py::class_<ModelSpec>(m, "ModelSpec")
      .def_readonly("a", &ModelSpec::a)
      .def_readonly("b", &ModelSpec::b)
      .def_readonly("v1", &ModelSpec::v1)
      .def_readonly("kappa", &ModelSpec::kappa)
      .def_readonly("g1", &ModelSpec::g1)
      .def_readonly("g2", &ModelSpec::g2)
      .def_readonly("family", &ModelSpec::family);

  py::class_<StationarySolution>(m, "StationarySolution")
      .def_readonly("phi0", &StationarySolution::phi0)
      .def_readonly("mu", &StationarySolution::mu)
      .def_readonly("lam", &StationarySolution::lambda);

  py::class_<SolvedModel>(m, "SolvedModel")
      .def_readonly("spec", &SolvedModel::spec)
      .def_readonly("solution", &SolvedModel::solution);

  m.def("solve_constraints", [](const std::string& family, double a, double b, double kappa,
                                std::optional<double> phi0, std::optional<double> g1,
                                std::optional<double> g2, std::optional<double> v1) {
    return solve_constraints(make_knowns(family, a, b, kappa, phi0, g1, g2, v1));
  }, py::arg("family"), py::arg("a"), py::arg("b"), py::arg("kappa"), py::arg("phi0") = py::none(),
     py::arg("g1") = py::none(), py::arg("g2") = py::none(), py::arg("v1") = py::none());

  m.def("evaluate_solution", [](const SolvedModel& s, const Grid& g) {
    return evaluate_solution(s.spec, s.solution, g);
  });
  m.def("sample_potential", [](const SolvedModel& s, const Grid& g) {
    const PotentialSamples p = sample_potential(s.spec, g);
    return py::make_tuple(p.v, p.w);
  });
  m.def("stationary_residual", [](const SolvedModel& s, const Grid& g, std::optional<ComplexField> field) {
    const ComplexField f = field ? *field : evaluate_solution(s.spec, s.solution, g);
    const ResidualReport r = stationary_residual(f, s.spec, s.solution.lambda, g);
    py::dict d;
    d["sup_norm"] = r.sup_norm;
    d["boundary_modulus"] = r.boundary_modulus;
    d["grid_too_coarse"] = r.grid_too_coarse;
    return d;
  }, py::arg("model"), py::arg("grid"), py::arg("field") = py::none());
  m.def("power_flow", [](const ComplexField& f, const Grid& g) { return power_flow(f, g).values; });
  m.def("spectral_derivative", &spectral_derivative, py::arg("field"), py::arg("grid"), py::arg("order"));
  m.def("fourier_diff_matrix", &fourier_diff_matrix, py::arg("grid"), py::arg("order"));

  m.def("block_operator", [](const SolvedModel& s, const Grid& g) {
    return build_operators(s.spec, s.solution, g).block;
  });
  m.def("continuous_band", [](const SolvedModel& s) {
    const ContinuousBand b = continuous_band(s.spec, s.solution);
    return py::make_tuple(b.re_offset, b.im_edge);
  });

  m.def("analyze_stability", [](const SolvedModel& s, const Grid& g) {
    const StabilityAnalysis a = [&] {
      py::gil_scoped_release release;
      return analyze_stability(s, g);
    }();
    std::vector<cplx> eta;
    std::vector<double> residual;
    std::vector<std::string> label;
    for (std::size_t k = 0; k < a.spectrum.pairs.size(); ++k) {
      eta.push_back(a.spectrum.pairs[k].eta);
      residual.push_back(a.spectrum.pairs[k].residual);
      label.push_back(to_string(a.partition.labels[k]));
    }
    py::dict d = report_dict(a.report);
    d["eta"] = eta;
    d["residual"] = residual;
    d["class"] = label;
    d["spectral_radius"] = a.spectrum.spectral_radius;
    d["trace_defect"] = a.spectrum.trace_defect;
    d["rejected"] = a.spectrum.rejected;
    return d;
  });

  m.def("run_sweep", [](const std::string& family, double a, double b, double kappa,
                        std::optional<double> phi0, std::optional<double> g1,
                        std::optional<double> g2, std::optional<double> v1, const Grid& grid,
                        const std::string& parameter, const std::vector<double>& values, int workers) {
    const Knowns k = make_knowns(family, a, b, kappa, phi0, g1, g2, v1);
    SweepOptions opts;
    opts.workers = workers;
    SweepResult sw;
    std::vector<BifurcationEvent> events;
    {
      py::gil_scoped_release release;
      sw = run_sweep_values(k, grid, parameter, values, opts);
      events = detect_bifurcation(sw);
    }
    py::list points;
    for (const SweepPoint& p : sw.points) {
      py::dict d;
      d["value"] = p.value;
      d["ok"] = p.ok();
      d["error"] = p.error;
      std::vector<cplx> eta;
      for (const DiscreteMode& mode : p.discrete) eta.push_back(mode.eta);
      d["discrete"] = eta;
      if (p.report) d["verdict"] = to_string(p.report->verdict);
      points.append(d);
    }
    py::list ev;
    for (const BifurcationEvent& e : events) {
      py::dict d;
      d["kind"] = to_string(e.kind);
      d["param_low"] = e.param_low;
      d["param_high"] = e.param_high;
      d["real_pair"] = std::vector<cplx>{e.real_pair[0], e.real_pair[1]};
      d["imaginary_pair"] = std::vector<cplx>{e.imaginary_pair[0], e.imaginary_pair[1]};
      ev.append(d);
    }
    py::dict out;
    out["points"] = points;
    out["events"] = ev;
    out["trajectories"] = sw.trajectories.size();
    return out;
  }, py::arg("family"), py::arg("a"), py::arg("b"), py::arg("kappa"), py::arg("phi0") = py::none(),
     py::arg("g1") = py::none(), py::arg("g2") = py::none(), py::arg("v1") = py::none(),
     py::kw_only(), py::arg("grid"), py::arg("parameter"), py::arg("values"), py::arg("workers") = 0);

  m.def("select_step", [](const SolvedModel& s, const Grid& g, const ComplexField& initial, double z_end,
                          double dz, double tol, int max_halvings) {
    PropagationOptions opts;
    opts.z_end = z_end;
    opts.dz = dz;
    const StepSelection step = [&] {
      py::gil_scoped_release release;
      return select_step(initial, s.spec, g, opts, tol, max_halvings);
    }();
    py::dict d;
    d["dz"] = step.dz;
    d["gap"] = step.gap;
    d["halvings"] = step.halvings;
    return d;
  }, py::arg("model"), py::arg("grid"), py::arg("initial"), py::arg("z_end"), py::arg("dz"),
     py::arg("tol") = 1e-6, py::arg("max_halvings") = 8);

  m.def("perturb", &perturb, py::arg("reference"), py::arg("amplitude"), py::arg("seed"));

  m.def("propagate", [](const SolvedModel& s, const Grid& g, const ComplexField& initial, double z_end,
                        double dz, int sample_every) {
    PropagationOptions opts;
    opts.z_end = z_end;
    opts.dz = dz;
    opts.sample_every = sample_every;
    PropagationRecord rec;
    {
      py::gil_scoped_release release;
      rec = split_step(initial, s.spec, g, opts);
    }
    ComplexMatrix snaps(rec.snapshots.size(), g.size());
    for (std::size_t k = 0; k < rec.snapshots.size(); ++k) snaps.row(k) = rec.snapshots[k].transpose();
    return py::make_tuple(rec.z, snaps);
  }, py::arg("model"), py::arg("grid"), py::arg("initial"), py::arg("z_end"), py::arg("dz") = 1e-3,
     py::arg("sample_every") = 10);

  m.def("measure_growth", [](const std::vector<double>& z, const ComplexMatrix& snapshots,
                             const ComplexField& reference, const Grid& g) {
    PropagationRecord rec;
    rec.z = z;
    for (Eigen::Index k = 0; k < snapshots.rows(); ++k) rec.snapshots.push_back(snapshots.row(k).transpose());
    const GrowthEstimate e = measure_growth(rec, reference, g);
    py::dict d;
    d["found"] = e.found;
    d["rate"] = e.rate;
    d["z_start"] = e.z_start;
    d["z_stop"] = e.z_stop;
    d["samples"] = e.samples;
    return d;
  });

  m.attr("__version__") = PTSOL_VERSION;
}
