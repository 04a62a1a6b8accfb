#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ptsol/analytic.hpp"
#include "ptsol/spectral_grid.hpp"
#include "ptsol/types.hpp"

namespace ptsol {

struct PropagationDiagnostics {
  double peak = 0.0;       // max |Psi|
  double power = 0.0;      // integral |Psi|^2 dx (a diagnostic only: iW is not unitary)
  double deviation = 0.0;  // max | |Psi| - |Psi(z=0)| |
};

struct PropagationRecord {
  std::vector<double> z;
  std::vector<ComplexField> snapshots;
  std::vector<PropagationDiagnostics> diagnostics;
};

struct PropagationOptions {
  double z_end = 1.0;
  double dz = 1e-3;
  int sample_every = 10;
  double blowup_factor = 1e3;
  /// Stop early once the modulus deviation exceeds this (absolute) value.
  std::optional<double> stop_deviation;
};

/// Strang splitting for i Psi_z + Psi_xx + (V + iW)Psi + g1|Psi|^2 Psi + g2|Psi|^{2 kappa} Psi = 0:
/// half diffraction step (Fourier multiplier), full pointwise step, half
/// diffraction step. The pointwise step is the exact solution of
/// Psi_z = i(V + iW + g1|Psi|^2 + g2|Psi|^{2 kappa})Psi, where |Psi|^2 decays as e^{-2 W z}.
/// Throws StepUnstable when the peak exceeds blowup_factor times its initial value.
PropagationRecord split_step(const ComplexField& initial, const ModelSpec& spec, const Grid& grid,
                             const PropagationOptions& options);

/// sup |Psi_dz(z_end) - Psi_{dz/2}(z_end)|.
double step_halving_gap(const ComplexField& initial, const ModelSpec& spec, const Grid& grid,
                        const PropagationOptions& options);

/// Throws NonConvergedStep when step_halving_gap exceeds `tol`.
void check_step_convergence(const ComplexField& initial, const ModelSpec& spec, const Grid& grid,
                            const PropagationOptions& options, double tol = 1e-6);

struct StepSelection {
  double dz = 0.0;   // accepted step
  double gap = 0.0;  // step_halving_gap at that step
  int halvings = 0;  // times the requested dz was halved
};

/// Halves options.dz until step_halving_gap <= tol and returns the first
/// accepted step. On an unstable state the discretization error of the
/// initial field is amplified like the perturbation itself, so the accepted
/// dz can be much smaller than for a stable one. Throws NonConvergedStep
/// after `max_halvings` failed halvings.
StepSelection select_step(const ComplexField& initial, const ModelSpec& spec, const Grid& grid,
                          const PropagationOptions& options, double tol = 1e-6,
                          int max_halvings = 10);

/// reference + amplitude * (xi + i zeta) with standard normal xi, zeta drawn
/// from a seeded mt19937_64.
ComplexField perturb(const ComplexField& reference, double amplitude, std::uint64_t seed);

struct GrowthEstimate {
  bool found = false;  // false: NoGrowthWindow, rate is 0
  double rate = 0.0;
  double z_start = 0.0;
  double z_stop = 0.0;
  int samples = 0;
};

struct GrowthOptions {
  double start_factor = 10.0;  // window opens at start_factor * initial deviation
  double stop_fraction = 0.1;  // window closes at stop_fraction * max|reference|
  double floor_rel = 1e-6;     // initial deviation is at least floor_rel * max|reference|
};

/// Least-squares slope of ln || |Psi(., z)| - |reference| ||_2 over the
/// linear-growth window.
GrowthEstimate measure_growth(const PropagationRecord& record, const ComplexField& reference,
                              const Grid& grid, const GrowthOptions& options = {});

}  // namespace ptsol
