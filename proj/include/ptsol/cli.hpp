#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "ptsol/config.hpp"
#include "ptsol/spectrum.hpp"

namespace ptsol {

inline constexpr int kArtifactFormatVersion = 1;
inline constexpr const char* kOutDirEnv = "PTSOL_OUT_DIR";

enum ExitStatus : int { kExitOk = 0, kExitIo = 1, kExitInfeasible = 2, kExitNumerical = 3 };

struct Invocation {
  std::string command;  // validate, spectrum, sweep, propagate, band, figures
  std::string preset;   // figures: fig1 .. fig4
  std::optional<std::string> config_path;
  std::vector<std::pair<std::string, std::string>> overrides;  // applied in order
  std::optional<std::string> out_dir;                          // --out
};

/// Runs one command and writes its artifacts. Never throws: failures are
/// reported on `err` and mapped to an exit status.
int execute(const Invocation& invocation, std::ostream& out, std::ostream& err);

/// Default configuration used when no --config is given.
std::string default_config_yaml();

/// Sub-runs of a figure preset ("fig4" has two panels), as (label, YAML).
std::vector<std::pair<std::string, std::string>> preset_configs(const std::string& figure);

/// --out, then $PTSOL_OUT_DIR, then output.dir from the config.
std::string resolve_output_dir(const std::optional<std::string>& flag, const RunConfig& config);

// Artifact writers, exposed for tests.

/// "# format_version=1", then re_eta,im_eta,residual,class rows in spectrum order.
std::string spectrum_csv(const Spectrum& spectrum, const Partition& partition);

nlohmann::json report_json(const StabilityAnalysis& analysis);

/// eta-plane portrait with the analytic band overlaid.
std::string spectrum_svg(const StabilityAnalysis& analysis, const std::string& title,
                         bool zoom_origin = false);

nlohmann::json library_versions();

}  // namespace ptsol
