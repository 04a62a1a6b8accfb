#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ptsol/analytic.hpp"
#include "ptsol/spectrum.hpp"

namespace ptsol {

/// Sets the named parameter ("a", "b", "kappa", "g1", "g2", "v1", "phi0").
/// Throws InvalidArgument for unknown names.
void set_parameter(Knowns& knowns, const std::string& name, double value);

struct DiscreteMode {
  cplx eta;
  ComplexVector vector;
};

struct SweepPoint {
  double value = 0.0;
  std::optional<SolvedModel> model;
  std::optional<StabilityReport> report;
  std::vector<DiscreteMode> discrete;
  std::string error;  // non-empty when this point failed

  bool ok() const { return report.has_value(); }
};

struct TrajectoryNode {
  int point = 0;  // index into SweepResult::points
  int mode = 0;   // index into SweepPoint::discrete
  cplx eta;
};

using Trajectory = std::vector<TrajectoryNode>;

struct SweepResult {
  std::string parameter;
  std::vector<double> values;
  std::vector<SweepPoint> points;
  std::vector<Trajectory> trajectories;
};

struct SweepOptions {
  SpectrumOptions spectrum;
  double match_tol = 0.1;  // largest eta jump accepted between consecutive points
  int workers = 0;         // 0: hardware concurrency
};

/// `steps` evenly spaced values from `start` to `stop` inclusive (a single
/// step evaluates only `start`). Per-point failures are recorded, never thrown.
SweepResult run_sweep(const Knowns& base, const Grid& grid, const std::string& parameter,
                      double start, double stop, int steps, const SweepOptions& options = {});

/// Same, over an explicit list of parameter values.
SweepResult run_sweep_values(const Knowns& base, const Grid& grid, const std::string& parameter,
                             const std::vector<double>& values, const SweepOptions& options = {});

/// Nearest-neighbour chaining of discrete eigenvalues between consecutive
/// successful points. Assignment is one-to-one; near-ties in distance are
/// broken by the largest eigenvector overlap.
std::vector<Trajectory> build_trajectories(const std::vector<SweepPoint>& points,
                                           double match_tol);

enum class TransitionKind { RealToImaginary, ImaginaryToReal };

const char* to_string(TransitionKind kind);

struct BifurcationEvent {
  double param_low = 0.0;   // last value before the transition (sweep order)
  double param_high = 0.0;  // first value after it
  TransitionKind kind = TransitionKind::RealToImaginary;
  cplx real_pair[2];        // (eta, -eta) on the real axis, nearest the collision
  cplx imaginary_pair[2];   // (i nu, -i nu) on the imaginary axis
};

struct DetectionOptions {
  double collision_tol = 5e-3;
  double axis_tol = 1e-3;  // |Im| (resp. |Re|) below this counts as on-axis
  int lookahead = 2;
};

/// A tracked on-axis pair shrinking monotonically into |eta| < collision_tol,
/// followed within `lookahead` points by a growing pair on the other axis.
std::vector<BifurcationEvent> detect_bifurcation(const SweepResult& sweep,
                                                 const DetectionOptions& options = {});

/// Re-runs the sweep inside an event bracket at 4x the original parameter
/// resolution and returns the sharpened event, if it is found again.
std::optional<BifurcationEvent> refine_event(const Knowns& base, const Grid& grid,
                                             const std::string& parameter,
                                             const BifurcationEvent& event,
                                             const SweepOptions& sweep_options = {},
                                             const DetectionOptions& options = {});

}  // namespace ptsol
