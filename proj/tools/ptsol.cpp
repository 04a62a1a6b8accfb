#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ptsol/cli.hpp"
#include "ptsol/error.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Stability analysis of PT-symmetric solitons with competing nonlinearities"};
  app.require_subcommand(1);
  // Options may appear before or after the subcommand.
  app.fallthrough();
  app.set_version_flag("--version", PTSOL_VERSION_STRING);

  std::string config;
  std::vector<std::string> sets;
  std::string grid;
  std::string out;
  long long seed = -1;
  bool no_plots = false;
  app.add_option("--config", config, "YAML run configuration");
  app.add_option("--set", sets, "Override a config value, e.g. --set model.a=0.02")->allow_extra_args(false);
  app.add_option("--grid", grid, "Grid as N,L (points, half-width)");
  app.add_option("--out", out, "Output directory (default: $PTSOL_OUT_DIR, then output.dir)");
  app.add_option("--seed", seed, "Random seed for perturbations")->check(CLI::NonNegativeNumber);
  app.add_flag("--no-plots", no_plots, "Skip SVG output");

  std::string preset;
  for (const char* name : {"validate", "spectrum", "sweep", "propagate", "band"}) app.add_subcommand(name);
  app.get_subcommand("validate")->description("Solve the constraints and check the closed-form solution");
  app.get_subcommand("spectrum")->description("Linear-stability spectrum and verdict at one point");
  app.get_subcommand("sweep")->description("Parameter sweep with bifurcation detection");
  app.get_subcommand("propagate")->description("Split-step propagation and measured growth rate");
  app.get_subcommand("band")->description("Analytic continuous-spectrum locus");
  CLI::App* figures = app.add_subcommand("figures", "Run a figure preset");
  figures->add_option("preset", preset, "fig1|fig2|fig3|fig4")->required()->check(
      CLI::IsMember({"fig1", "fig2", "fig3", "fig4"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ptsol::kExitInfeasible;
  }

  ptsol::Invocation inv;
  inv.command = app.get_subcommands().front()->get_name();
  inv.preset = preset;
  if (!config.empty()) inv.config_path = config;
  try {
    for (const std::string& s : sets) inv.overrides.push_back(ptsol::split_override(s));
    if (!grid.empty()) {
      const auto comma = grid.find(',');
      if (comma == std::string::npos)
        throw ptsol::Error(ptsol::ErrorCode::ConfigError, "--grid expects N,L");
      inv.overrides.push_back({"grid.n", grid.substr(0, comma)});
      inv.overrides.push_back({"grid.half_width", grid.substr(comma + 1)});
    }
  } catch (const ptsol::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ptsol::kExitInfeasible;
  }
  if (seed >= 0) inv.overrides.push_back({"seed", std::to_string(seed)});
  if (no_plots) inv.overrides.push_back({"output.plots", "false"});
  if (!out.empty()) inv.out_dir = out;

  return ptsol::execute(inv, std::cout, std::cerr);
}
