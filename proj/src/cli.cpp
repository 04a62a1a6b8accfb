#include "ptsol/cli.hpp"

#include <fftw3.h>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "ptsol/error.hpp"
#include "ptsol/linearization.hpp"
#include "ptsol/propagation.hpp"
#include "ptsol/svg.hpp"
#include "ptsol/sweep.hpp"

#ifndef PTSOL_VERSION
#define PTSOL_VERSION "0.0.0"
#endif

extern "C" char* openblas_get_config(void);

namespace ptsol {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

json cplx_json(cplx z) { return json::array({z.real(), z.imag()}); }

const char* kDiscreteColor = "#d62728";
const char* kContinuousColor = "#1f77b4";
const char* kSpuriousColor = "#9e9e9e";
const char* kBandColor = "#2ca02c";

// Rounded values a preset must reproduce after solve_constraints.
struct QuotedCheck {
  std::string parameter;
  double quoted = 0.0;
  double tolerance = 0.0;  // half a unit in the last quoted digit
};

struct Run {
  RunConfig config;
  std::string command;
  std::string preset;
  std::string dir;
  std::vector<std::string> files;
  std::ostream& out;

  void write(const std::string& name, const std::string& content) {
    fs::create_directories(dir);
    const fs::path path = fs::path(dir) / name;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw fs::filesystem_error("cannot write", path, std::make_error_code(std::errc::io_error));
    f << content;
    if (!f) throw fs::filesystem_error("write failed", path, std::make_error_code(std::errc::io_error));
    files.push_back(name);
  }

  void write_json(const std::string& name, const json& j) { write(name, j.dump(2) + "\n"); }
};

SolvedModel solve(const RunConfig& cfg) { return solve_constraints(cfg.model); }

Grid make_grid(const RunConfig& cfg) { return Grid(cfg.grid.n, cfg.grid.half_width); }

json model_json(const SolvedModel& m) {
  return {{"family", to_string(m.spec.family)},
          {"a", m.spec.a},
          {"b", m.spec.b},
          {"kappa", m.spec.kappa},
          {"v1", m.spec.v1},
          {"g1", m.spec.g1},
          {"g2", m.spec.g2},
          {"phi0", m.solution.phi0},
          {"mu", m.solution.mu},
          {"lambda", m.solution.lambda}};
}

json band_json(const ContinuousBand& band) {
  json edges = json::array();
  for (cplx e : band.edges()) edges.push_back(cplx_json(e));
  return {{"re_offset", band.re_offset}, {"im_edge", band.im_edge}, {"edges", edges}};
}

void check_quoted(const SolvedModel& model, const std::vector<QuotedCheck>& checks, json& out) {
  for (const QuotedCheck& c : checks) {
    const double solved = c.parameter == "g1"   ? model.spec.g1
                          : c.parameter == "g2" ? model.spec.g2
                          : c.parameter == "v1" ? model.spec.v1
                                                : model.solution.phi0;
    const bool ok = std::abs(solved - c.quoted) <= c.tolerance;
    out.push_back({{"parameter", c.parameter},
                   {"quoted", c.quoted},
                   {"solved", solved},
                   {"tolerance", c.tolerance},
                   {"consistent", ok}});
    if (!ok)
      throw Error(ErrorCode::InconsistentParameters,
                  "quoted value " + c.parameter + " = " + g17(c.quoted) +
                      " disagrees with the constraint solution " + g17(solved));
  }
}

// ---- validate -------------------------------------------------------------

json validation_json(const SolvedModel& model, const Grid& grid) {
  const ComplexField phi = evaluate_solution(model.spec, model.solution, grid);
  const ResidualReport res = stationary_residual(phi, model.spec, model.solution.lambda, grid);
  const PotentialSamples pot = sample_potential(model.spec, grid);
  double v_defect = 0.0, w_defect = 0.0;
  for (int j = 1; j < grid.size(); ++j) {
    v_defect = std::max(v_defect, std::abs(pot.v[j] - pot.v[grid.mirror(j)]));
    w_defect = std::max(w_defect, std::abs(pot.w[j] + pot.w[grid.mirror(j)]));
  }
  const double v_scale = std::max(pot.v.cwiseAbs().maxCoeff(), 1e-300);
  const double w_scale = std::max(pot.w.cwiseAbs().maxCoeff(), 1e-300);

  // S against mu phi0^2 sech^{2p}(x).
  const PowerFlowProfile flow = power_flow(phi, grid);
  const double p = model.spec.profile_exponent();
  double flow_error = 0.0;
  for (int j = 0; j < grid.size(); ++j) {
    const double x = grid.point(j);
    if (std::abs(x) > kInteriorFraction * grid.half_width()) continue;
    const double exact = model.solution.mu * model.solution.phi0 * model.solution.phi0 *
                         std::pow(1.0 / std::cosh(x), 2.0 * p);
    flow_error = std::max(flow_error, std::abs(flow.values[j] - exact));
  }
  const int mid = grid.size() / 2;  // x = 0
  return {{"format_version", kArtifactFormatVersion},
          {"model", model_json(model)},
          {"grid", {{"n", grid.size()}, {"half_width", grid.half_width()}}},
          {"residual",
           {{"sup_norm", res.sup_norm},
            {"interior_fraction", kInteriorFraction},
            {"boundary_modulus", res.boundary_modulus},
            {"grid_too_coarse", res.grid_too_coarse}}},
          {"pt_symmetry", {{"v_even_defect", v_defect / v_scale}, {"w_odd_defect", w_defect / w_scale}}},
          {"power_flow", {{"s_at_zero", flow.values[mid]}, {"max_error_vs_closed_form", flow_error}}}};
}

void cmd_validate(Run& run, const std::vector<QuotedCheck>& quoted = {}) {
  const SolvedModel model = solve(run.config);
  const Grid grid = make_grid(run.config);
  json report = validation_json(model, grid);
  if (!quoted.empty()) check_quoted(model, quoted, report["quoted_checks"]);
  run.write_json("validation.json", report);
  const auto& m = report["model"];
  run.out << "family   " << m["family"].get<std::string>() << "\n"
          << "phi0     " << g17(model.solution.phi0) << "\n"
          << "g1       " << g17(model.spec.g1) << "\n"
          << "g2       " << g17(model.spec.g2) << "\n"
          << "v1       " << g17(model.spec.v1) << "\n"
          << "mu       " << g17(model.solution.mu) << "\n"
          << "lambda   " << g17(model.solution.lambda) << "\n"
          << "residual " << short_num(report["residual"]["sup_norm"].get<double>()) << "\n";
  if (report["residual"]["grid_too_coarse"].get<bool>())
    run.out << "advisory: |phi| at the grid ends exceeds " << kBoundaryAdvisory
            << " (GridTooCoarse)\n";
}

// ---- spectrum --------------------------------------------------------------

std::string portrait_title(const SolvedModel& m) {
  return std::string(m.spec.family == Family::ClassI ? "Class I" : "Class II") +
         ": a=" + short_num(m.spec.a) + ", b=" + short_num(m.spec.b) +
         ", g1=" + short_num(m.spec.g1) + ", g2=" + short_num(m.spec.g2) +
         ", kappa=" + short_num(m.spec.kappa);
}

void write_spectrum_artifacts(Run& run, const StabilityAnalysis& analysis, const std::string& stem,
                              const json& extra = json::object()) {
  run.write(stem + ".csv", spectrum_csv(analysis.spectrum, analysis.partition));
  json report = report_json(analysis);
  for (auto it = extra.begin(); it != extra.end(); ++it) report[it.key()] = it.value();
  run.write_json(stem == "spectrum" ? "report.json" : stem + "_report.json", report);
  if (run.config.output.plots) {
    run.write(stem + ".svg", spectrum_svg(analysis, portrait_title(analysis.model)));
  }
}

void print_report(std::ostream& out, const StabilityAnalysis& a) {
  const StabilityReport& r = a.report;
  out << "verdict        " << to_string(r.verdict) << "\n"
      << "max_growth     " << short_num(r.max_growth) << "\n"
      << "zero_modes     " << r.zero_modes << "\n"
      << "discrete       " << a.partition.discrete.size() << "\n"
      << "continuous     " << a.partition.continuous.size() << "\n"
      << "spurious       " << a.partition.spurious.size() << "\n"
      << "rejected       " << a.spectrum.rejected << "\n"
      << "pairing_defect " << short_num(r.pairing_defect) << " (tol " << short_num(1e-6 * a.spectrum.spectral_radius) << ")\n"
      << "conj_defect    " << short_num(r.conjugate_defect) << "\n";
}

StabilityAnalysis cmd_spectrum(Run& run, const std::vector<QuotedCheck>& quoted = {},
                               bool zoom = false) {
  const SolvedModel model = solve(run.config);
  json extra = json::object();
  if (!quoted.empty()) check_quoted(model, quoted, extra["quoted_checks"]);
  const Grid grid = make_grid(run.config);
  StabilityAnalysis analysis = analyze_stability(model, grid, run.config.spectrum);
  write_spectrum_artifacts(run, analysis, "spectrum", extra);
  if (zoom && run.config.output.plots)
    run.write("spectrum_origin.svg",
              spectrum_svg(analysis, portrait_title(model) + " (near origin)", true));
  print_report(run.out, analysis);
  return analysis;
}

// ---- band ------------------------------------------------------------------

void cmd_band(Run& run) {
  const SolvedModel model = solve(run.config);
  const ContinuousBand band = continuous_band(model.spec, model.solution);
  json j = {{"format_version", kArtifactFormatVersion},
            {"model", model_json(model)},
            {"band", band_json(band)},
            {"locus", "Re eta = +-2|b|, |Im eta| >= lambda"}};
  run.write_json("band.json", j);

  std::ostringstream csv;
  csv << "# format_version=" << kArtifactFormatVersion << "\n";
  csv << "branch,k,re_eta,im_eta\n";
  const int samples = 101;
  const double k_max = 5.0;
  int branch = 0;
  for (int rs : {1, -1}) {
    for (int is : {1, -1}) {
      for (int s = 0; s < samples; ++s) {
        const double k = k_max * s / (samples - 1);
        const cplx eta = band.point(k, rs, is);
        csv << branch << "," << g17(k) << "," << g17(eta.real()) << "," << g17(eta.imag()) << "\n";
      }
      ++branch;
    }
  }
  run.write("band.csv", csv.str());
  run.out << "band: Re eta = +-" << g17(band.re_offset) << ", |Im eta| >= " << g17(band.im_edge)
          << "\n";
}

// ---- sweep -----------------------------------------------------------------

json event_json(const BifurcationEvent& e) {
  return {{"param_low", e.param_low},
          {"param_high", e.param_high},
          {"kind", to_string(e.kind)},
          {"real_pair", {cplx_json(e.real_pair[0]), cplx_json(e.real_pair[1])}},
          {"imaginary_pair", {cplx_json(e.imaginary_pair[0]), cplx_json(e.imaginary_pair[1])}}};
}

std::string sweep_svg(const SweepResult& sweep) {
  SvgPlot plot("Discrete eigenvalues along the " + sweep.parameter + " sweep", "Re eta", "Im eta");
  const int n = static_cast<int>(sweep.points.size());
  for (int p = 0; p < n; ++p) {
    if (!sweep.points[p].ok()) continue;
    SvgPlot::Points pts;
    for (const DiscreteMode& m : sweep.points[p].discrete) pts.push_back({m.eta.real(), m.eta.imag()});
    // Blue (first value) to red (last value).
    const double t = n > 1 ? double(p) / (n - 1) : 0.0;
    char color[16];
    std::snprintf(color, sizeof color, "#%02x%02x%02x", int(30 + 200 * t), 60, int(230 - 200 * t));
    const bool labeled = p == 0 || p == n - 1;
    plot.scatter(labeled ? sweep.parameter + "=" + short_num(sweep.points[p].value) : "", color, pts);
  }
  return plot.render();
}

void cmd_sweep(Run& run) {
  const RunConfig& cfg = run.config;
  const Grid grid = make_grid(cfg);
  const SweepOptions opts = sweep_options(cfg);
  const SweepResult sweep =
      run_sweep(cfg.model, grid, cfg.sweep.parameter, cfg.sweep.start, cfg.sweep.stop,
                cfg.sweep.steps, opts);
  std::vector<BifurcationEvent> events = detect_bifurcation(sweep, detection_options(cfg));

  std::ostringstream csv;
  csv << "# format_version=" << kArtifactFormatVersion << "\n"
      << "index,value,ok,verdict,max_growth,zero_modes,n_discrete,phi0,g1,g2,v1,mu,lambda,error\n";
  int failures = 0;
  for (std::size_t k = 0; k < sweep.points.size(); ++k) {
    const SweepPoint& p = sweep.points[k];
    csv << k << "," << g17(p.value) << "," << (p.ok() ? 1 : 0) << ",";
    if (p.ok()) {
      const SolvedModel& m = *p.model;
      csv << to_string(p.report->verdict) << "," << g17(p.report->max_growth) << ","
          << p.report->zero_modes << "," << p.discrete.size() << "," << g17(m.solution.phi0) << ","
          << g17(m.spec.g1) << "," << g17(m.spec.g2) << "," << g17(m.spec.v1) << ","
          << g17(m.solution.mu) << "," << g17(m.solution.lambda) << ",\n";
    } else {
      ++failures;
      std::string msg = p.error;
      std::replace(msg.begin(), msg.end(), ',', ';');
      std::replace(msg.begin(), msg.end(), '\n', ' ');
      csv << ",,,,,,,,,," << msg << "\n";
    }
  }
  run.write("sweep.csv", csv.str());

  std::ostringstream traj;
  traj << "# format_version=" << kArtifactFormatVersion << "\n"
       << "trajectory,point,value,re_eta,im_eta\n";
  for (std::size_t t = 0; t < sweep.trajectories.size(); ++t) {
    for (const TrajectoryNode& node : sweep.trajectories[t])
      traj << t << "," << node.point << "," << g17(sweep.points[node.point].value) << ","
           << g17(node.eta.real()) << "," << g17(node.eta.imag()) << "\n";
  }
  run.write("trajectories.csv", traj.str());

  json ev = json::array();
  for (const BifurcationEvent& e : events) {
    json j = event_json(e);
    if (cfg.sweep.refine) {
      if (auto fine = refine_event(cfg.model, grid, cfg.sweep.parameter, e, opts, detection_options(cfg)))
        j["refined"] = event_json(*fine);
      else
        j["refined"] = nullptr;
    }
    ev.push_back(j);
  }
  run.write_json("events.json", {{"format_version", kArtifactFormatVersion},
                                 {"parameter", sweep.parameter},
                                 {"collision_tol", cfg.sweep.collision_tol},
                                 {"axis_tol", cfg.sweep.axis_tol},
                                 {"lookahead", cfg.sweep.lookahead},
                                 {"points", sweep.points.size()},
                                 {"failed_points", failures},
                                 {"events", ev}});
  if (cfg.output.plots) run.write("sweep.svg", sweep_svg(sweep));

  for (double value : cfg.sweep.portrait_values) {
    Knowns knowns = cfg.model;
    set_parameter(knowns, cfg.sweep.parameter, value);
    const SolvedModel model = solve_constraints(knowns);
    const StabilityAnalysis a = analyze_stability(model, grid, cfg.spectrum);
    write_spectrum_artifacts(run, a, "spectrum_" + cfg.sweep.parameter + "_" + short_num(value));
  }

  run.out << "points " << sweep.points.size() << " (failed " << failures << "), events "
          << events.size() << "\n";
  for (const BifurcationEvent& e : events)
    run.out << "  " << to_string(e.kind) << " between " << cfg.sweep.parameter << " = "
            << short_num(e.param_low) << " and " << short_num(e.param_high) << "\n";
}

// ---- propagate ---------------------------------------------------------------

void cmd_propagate(Run& run) {
  const RunConfig& cfg = run.config;
  const PropagationConfig& pc = cfg.propagation;
  const SolvedModel model = solve(cfg);
  const Grid grid = make_grid(cfg);
  const ComplexField phi = evaluate_solution(model.spec, model.solution, grid);

  PropagationOptions opts;
  opts.z_end = pc.z_end;
  opts.dz = pc.dz;
  opts.sample_every = pc.sample_every;
  opts.blowup_factor = pc.blowup_factor;
  if (pc.stop_deviation) opts.stop_deviation = *pc.stop_deviation * model.solution.phi0;

  json growth_j = {{"format_version", kArtifactFormatVersion}, {"model", model_json(model)}};
  if (pc.check_step) {
    // The gate runs on the exact soliton: a growing perturbation would turn
    // any discretization error into an amplified difference of its own.
    if (pc.max_halvings < 0)
      throw Error(ErrorCode::ConfigError, "propagation.max_halvings must be >= 0");
    const StepSelection step = select_step(phi, model.spec, grid, opts, pc.step_tol, pc.max_halvings);
    opts.dz = step.dz;
    opts.sample_every = pc.sample_every << step.halvings;  // same sampling in z
    growth_j["step_halving_gap"] = step.gap;
    growth_j["step_tol"] = pc.step_tol;
    growth_j["halvings"] = step.halvings;
  }
  growth_j["dz"] = opts.dz;

  const ComplexField start = perturb(phi, pc.noise * model.solution.phi0, cfg.seed);
  const PropagationRecord record = split_step(start, model.spec, grid, opts);
  const GrowthEstimate growth =
      measure_growth(record, phi, grid, {pc.start_factor, pc.stop_fraction, 1e-6});

  const double root_h = std::sqrt(grid.spacing());
  const RealVector ref = phi.cwiseAbs();
  std::ostringstream csv;
  csv << "# format_version=" << kArtifactFormatVersion << "\n"
      << "z,peak,power,deviation,l2_deviation\n";
  SvgPlot::Points dev_points;
  for (std::size_t k = 0; k < record.z.size(); ++k) {
    const PropagationDiagnostics& d = record.diagnostics[k];
    const double l2 = root_h * (record.snapshots[k].cwiseAbs() - ref).norm();
    csv << g17(record.z[k]) << "," << g17(d.peak) << "," << g17(d.power) << "," << g17(d.deviation)
        << "," << g17(l2) << "\n";
    dev_points.push_back({record.z[k], l2});
  }
  run.write("propagation.csv", csv.str());

  growth_j["seed"] = cfg.seed;
  growth_j["noise"] = pc.noise;
  growth_j["z_reached"] = record.z.back();
  growth_j["growth"] = {{"found", growth.found},
                        {"rate", growth.rate},
                        {"z_start", growth.z_start},
                        {"z_stop", growth.z_stop},
                        {"samples", growth.samples}};
  double predicted = 0.0;
  if (pc.compare_spectrum) {
    const StabilityAnalysis a = analyze_stability(model, grid, cfg.spectrum);
    predicted = a.report.verdict == Verdict::Unstable ? a.report.max_growth : 0.0;
    growth_j["predicted_rate"] = predicted;
    growth_j["verdict"] = to_string(a.report.verdict);
    if (predicted > 0.0) growth_j["relative_difference"] = std::abs(growth.rate - predicted) / predicted;
  }
  run.write_json("growth.json", growth_j);

  if (cfg.output.plots) {
    SvgPlot plot("Modulus deviation under propagation", "z", "||  |Psi| - |phi|  ||_2");
    plot.set_log_y(true);
    plot.line("measured", kDiscreteColor, dev_points);
    if (growth.found) {
      // Fitted exponential through the window midpoint.
      double zm = 0.5 * (growth.z_start + growth.z_stop), ym = 0.0;
      for (std::size_t k = 0; k < record.z.size(); ++k)
        if (record.z[k] <= zm) ym = dev_points[k].second;
      SvgPlot::Points fit;
      for (double z : {growth.z_start, growth.z_stop}) fit.push_back({z, ym * std::exp(growth.rate * (z - zm))});
      plot.line("fit rate " + short_num(growth.rate), kBandColor, fit, true);
    }
    run.write("propagation.svg", plot.render());
  }

  run.out << "z reached      " << short_num(record.z.back()) << "\n"
          << "growth window  " << (growth.found ? "found" : "none (NoGrowthWindow)") << "\n"
          << "measured rate  " << short_num(growth.rate) << "\n";
  if (pc.compare_spectrum) run.out << "predicted rate " << short_num(predicted) << "\n";
}

// ---- dispatch ------------------------------------------------------------------

RunConfig default_run_config() {
  RunConfig c;
  c.model.family = Family::ClassI;
  c.model.a = 0.01;
  c.model.b = 0.3;
  c.model.kappa = 3.0;
  c.model.phi0 = 1.0;
  c.model.v1 = -4.0;
  c.model.g2 = -4.0;
  return c;
}

struct Preset {
  std::string label;
  RunConfig config;
  std::string command;
  std::vector<QuotedCheck> quoted;
  bool zoom = false;
};

std::vector<Preset> presets(const std::string& figure) {
  std::vector<Preset> out;
  if (figure == "fig1") {
    RunConfig c = default_run_config();
    out.push_back({"fig1", c, "spectrum", {{"g1", 2.01, 0.005}}, false});
  } else if (figure == "fig2") {
    RunConfig c = default_run_config();
    c.model.a = 0.03;
    c.model.b = 0.003;
    c.sweep.parameter = "a";
    c.sweep.start = 0.03;
    c.sweep.stop = 0.09;
    c.sweep.steps = 13;
    c.sweep.portrait_values = {0.03, 0.04, 0.05, 0.09};
    out.push_back({"fig2", c, "sweep", {}, false});
  } else if (figure == "fig3") {
    RunConfig c = default_run_config();
    c.model = Knowns{Family::ClassI, 1.0, 0.003, 3.0, std::nullopt, 4.0, -4.0, -4.0};
    out.push_back({"fig3", c, "spectrum", {}, false});
  } else if (figure == "fig4") {
    RunConfig a = default_run_config();
    a.model = Knowns{Family::ClassI, 1.0, 0.003, 3.0, std::nullopt, 4.0, 4.0, std::nullopt};
    out.push_back({"fig4a", a, "spectrum", {}, false});
    RunConfig b = default_run_config();
    b.model = Knowns{Family::ClassII, 1.0, 0.003, 3.0, std::nullopt, 4.0, 2.44, std::nullopt};
    out.push_back({"fig4b", b, "spectrum", {}, true});
  } else {
    throw Error(ErrorCode::ConfigError, "unknown figure preset '" + figure + "' (fig1|fig2|fig3|fig4)");
  }
  return out;
}

void run_one(Run& run, const std::vector<QuotedCheck>& quoted, bool zoom) {
  if (run.command == "validate") cmd_validate(run, quoted);
  else if (run.command == "spectrum") cmd_spectrum(run, quoted, zoom);
  else if (run.command == "sweep") cmd_sweep(run);
  else if (run.command == "propagate") cmd_propagate(run);
  else if (run.command == "band") cmd_band(run);
  else throw Error(ErrorCode::ConfigError, "unknown command '" + run.command + "'");

  run.write("config.yaml", to_yaml(run.config));
  std::vector<std::string> artifacts = run.files;
  artifacts.push_back("manifest.json");
  std::sort(artifacts.begin(), artifacts.end());
  json manifest = {{"format_version", kArtifactFormatVersion},
                   {"tool", "ptsol"},
                   {"version", PTSOL_VERSION},
                   {"command", run.command},
                   {"preset", run.preset.empty() ? json(nullptr) : json(run.preset)},
                   {"seed", run.config.seed},
                   {"config", to_yaml(run.config)},
                   {"libraries", library_versions()},
                   {"artifacts", artifacts}};
  run.write_json("manifest.json", manifest);
}

int status_for(ErrorCode code) {
  return is_configuration_error(code) ? kExitInfeasible : kExitNumerical;
}

}  // namespace

std::string default_config_yaml() { return to_yaml(default_run_config()); }

std::vector<std::pair<std::string, std::string>> preset_configs(const std::string& figure) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const Preset& p : presets(figure)) out.push_back({p.label, to_yaml(p.config)});
  return out;
}

std::string resolve_output_dir(const std::optional<std::string>& flag, const RunConfig& config) {
  if (flag) return *flag;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  return config.output.dir;
}

std::string spectrum_csv(const Spectrum& spectrum, const Partition& partition) {
  std::ostringstream csv;
  csv << "# format_version=" << kArtifactFormatVersion << "\n"
      << "re_eta,im_eta,residual,class\n";
  for (std::size_t k = 0; k < spectrum.pairs.size(); ++k) {
    const CertifiedPair& p = spectrum.pairs[k];
    csv << g17(p.eta.real()) << "," << g17(p.eta.imag()) << "," << g17(p.residual) << ","
        << to_string(partition.labels[k]) << "\n";
  }
  return csv.str();
}

json report_json(const StabilityAnalysis& a) {
  const StabilityReport& r = a.report;
  json discrete = json::array();
  for (cplx eta : r.discrete) discrete.push_back(cplx_json(eta));
  double max_residual = 0.0;
  for (const CertifiedPair& p : a.spectrum.pairs) max_residual = std::max(max_residual, p.residual);
  return {{"format_version", kArtifactFormatVersion},
          {"model", model_json(a.model)},
          {"grid", {{"n", a.grid.size()}, {"half_width", a.grid.half_width()}}},
          {"verdict", to_string(r.verdict)},
          {"max_growth", r.max_growth},
          {"zero_modes", r.zero_modes},
          {"tol_instab", r.tol_instab},
          {"tol_zero", r.tol_zero},
          {"pairing_defect", r.pairing_defect},
          {"conjugate_defect", r.conjugate_defect},
          {"discrete", discrete},
          {"continuous_band", band_json(r.continuous_band)},
          {"counts",
           {{"certified", a.spectrum.pairs.size()},
            {"rejected", a.spectrum.rejected},
            {"discrete", a.partition.discrete.size()},
            {"continuous", a.partition.continuous.size()},
            {"spurious", a.partition.spurious.size()}}},
          {"spectral_radius", a.spectrum.spectral_radius},
          {"matrix_norm", a.spectrum.matrix_norm},
          {"trace_defect", a.spectrum.trace_defect},
          {"max_residual", max_residual}};
}

std::string spectrum_svg(const StabilityAnalysis& a, const std::string& title, bool zoom_origin) {
  SvgPlot::Points pts[3];
  double max_re = 0.0, max_im_local = 0.0;
  for (std::size_t k = 0; k < a.spectrum.pairs.size(); ++k) {
    const cplx eta = a.spectrum.pairs[k].eta;
    pts[static_cast<int>(a.partition.labels[k])].push_back({eta.real(), eta.imag()});
    max_re = std::max(max_re, std::abs(eta.real()));
    if (a.partition.labels[k] == ModeClass::Discrete && std::abs(eta) < 20.0)
      max_im_local = std::max(max_im_local, std::abs(eta.imag()));
  }
  const ContinuousBand& band = a.report.continuous_band;
  double x_half = std::max({1.1 * max_re, 1.5 * band.re_offset, 0.1});
  double y_half = std::max({3.0 * band.im_edge, 1.5 * max_im_local, 2.0});
  if (zoom_origin) {
    x_half = std::max(0.2, 3.0 * band.re_offset);
    y_half = std::max(0.2, 1.5 * band.im_edge);
  }

  SvgPlot plot(title, "Re eta", "Im eta");
  plot.set_range(-x_half, x_half, -y_half, y_half);
  const double far = 10.0 * y_half;
  for (int rs : {1, -1}) {
    for (int is : {1, -1}) {
      const bool first = rs == 1 && is == 1;
      plot.line(first ? "analytic band" : "", kBandColor,
                {{rs * band.re_offset, is * band.im_edge}, {rs * band.re_offset, is * far}}, true);
    }
  }
  plot.scatter("continuous", kContinuousColor, pts[static_cast<int>(ModeClass::Continuous)], 2.0);
  plot.scatter("spurious", kSpuriousColor, pts[static_cast<int>(ModeClass::Spurious)], 2.0);
  plot.scatter("discrete", kDiscreteColor, pts[static_cast<int>(ModeClass::Discrete)], 3.0);
  return plot.render();
}

json library_versions() {
  std::string blas = openblas_get_config();
  while (!blas.empty() && blas.back() == ' ') blas.pop_back();
  return {{"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                        "." + std::to_string(EIGEN_MINOR_VERSION)},
          {"fftw", std::string(fftw_version)},
          {"yaml-cpp", PTSOL_YAML_CPP_VERSION},
          {"openblas", blas},
          {"lapack", "LAPACKE zgeev"},
          {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
}

int execute(const Invocation& inv, std::ostream& out, std::ostream& err) {
  try {
    struct Job {
      std::string label;
      std::string yaml;
      std::string source;
      std::string command;
      std::vector<QuotedCheck> quoted;
      bool zoom = false;
    };
    std::vector<Job> jobs;
    if (inv.command == "figures") {
      if (inv.config_path)
        throw Error(ErrorCode::ConfigError, "figures takes its parameters from the preset; use --set to adjust");
      for (const Preset& p : presets(inv.preset))
        jobs.push_back({p.label, to_yaml(p.config), "preset " + p.label, p.command, p.quoted, p.zoom});
    } else {
      static const std::vector<std::string> known = {"validate", "spectrum", "sweep", "propagate", "band"};
      if (std::find(known.begin(), known.end(), inv.command) == known.end())
        throw Error(ErrorCode::ConfigError, "unknown command '" + inv.command + "'");
      std::string text = default_config_yaml();
      std::string source = "<defaults>";
      if (inv.config_path) {
        std::ifstream in(*inv.config_path);
        if (!in) throw Error(ErrorCode::ConfigError, "cannot open config file '" + *inv.config_path + "'");
        std::stringstream buf;
        buf << in.rdbuf();
        text = buf.str();
        source = *inv.config_path;
      }
      jobs.push_back({"", text, source, inv.command, {}, false});
    }

    for (const Job& job : jobs) {
      const RunConfig cfg = resolve_config(job.yaml, job.source, inv.overrides);
      std::string dir = resolve_output_dir(inv.out_dir, cfg);
      if (!job.label.empty()) dir = (fs::path(dir) / job.label).string();
      Run run{cfg, job.command, job.label, dir, {}, out};
      if (!job.label.empty()) out << "== " << job.label << " (" << job.command << ") -> " << dir << "\n";
      run_one(run, job.quoted, job.zoom);
    }
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return status_for(e.code());
  } catch (const YAML::Exception& e) {
    err << "error: ConfigError: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace ptsol
