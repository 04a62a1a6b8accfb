#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ptsol/analytic.hpp"
#include "ptsol/propagation.hpp"
#include "ptsol/spectrum.hpp"
#include "ptsol/sweep.hpp"

namespace ptsol {

inline constexpr int kConfigFormatVersion = 1;

struct GridConfig {
  int n = 512;
  double half_width = 16.0;
};

struct SweepConfig {
  std::string parameter = "a";
  double start = 0.02;
  double stop = 0.10;
  int steps = 17;
  std::vector<double> portrait_values;  // full spectrum portraits are also written here
  double match_tol = 0.1;
  int workers = 0;
  double collision_tol = 5e-3;
  double axis_tol = 1e-3;
  int lookahead = 2;
  bool refine = false;
};

struct PropagationConfig {
  double z_end = 1.0;
  double dz = 1e-3;
  int sample_every = 10;
  double noise = 1e-4;  // relative to phi0
  double blowup_factor = 1e3;
  bool check_step = true;
  double step_tol = 1e-6;
  int max_halvings = 8;  // dz is halved until the step gate passes; 0 disables refinement
  std::optional<double> stop_deviation = 0.5;  // relative to phi0
  double start_factor = 10.0;
  double stop_fraction = 0.1;
  bool compare_spectrum = true;  // also solve the eigenproblem for the predicted rate
};

struct OutputConfig {
  std::string dir = "ptsol_out";
  bool plots = true;
};

/// Everything a run depends on. Serializes to YAML and back without loss.
struct RunConfig {
  int format_version = kConfigFormatVersion;
  Knowns model;
  GridConfig grid;
  SpectrumOptions spectrum;
  SweepConfig sweep;
  PropagationConfig propagation;
  OutputConfig output;
  std::uint64_t seed = 1;
};

/// Parses YAML text. Unknown keys, wrong types and unsupported versions throw
/// ConfigError naming the key and its line in `source`.
RunConfig parse_config(const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);

/// Parses text, applies dotted-path overrides ("model.a=0.02") on the raw
/// document, then validates the result as a whole.
RunConfig resolve_config(const std::string& text, const std::string& source,
                         const std::vector<std::pair<std::string, std::string>>& overrides);

/// Splits "key=value"; throws ConfigError when '=' is missing.
std::pair<std::string, std::string> split_override(const std::string& arg);

/// Canonical YAML with 17 significant digits.
std::string to_yaml(const RunConfig& config);

SweepOptions sweep_options(const RunConfig& config);
DetectionOptions detection_options(const RunConfig& config);

}  // namespace ptsol
