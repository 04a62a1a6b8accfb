#pragma once

#include <string>
#include <vector>

#include "ptsol/analytic.hpp"
#include "ptsol/spectral_grid.hpp"
#include "ptsol/types.hpp"

namespace ptsol {

struct EigenPair {
  cplx eta;
  ComplexVector vector;  // unit 2-norm
};

/// Full dense eigendecomposition (LAPACK zgeev, single-threaded).
/// Throws NoConvergence if the QR iteration fails.
std::vector<EigenPair> eig_dense(const ComplexMatrix& matrix);

/// Estimate of ||A||_2 by power iteration on A^H A (a lower bound that is
/// tight to a few digits, more than enough for residual normalization).
double spectral_norm_estimate(const ComplexMatrix& matrix);

struct CertifiedPair {
  cplx eta;
  ComplexVector vector;
  double residual = 0.0;       // ||M u - eta u||_2 / ||M||_2
  double boundary_mass = 0.0;  // share of |u|^2 on the outer boundary band
  double tail_mass = 0.0;      // share of |u|^2 outside the central core
};

struct SpectrumOptions {
  double residual_tol = 1e-8;
  double core_fraction = 0.2;      // central |x| < core_fraction * L is the core
  double tail_threshold = 0.5;     // tail_mass above this: delocalized
  double boundary_fraction = 0.05; // |x| >= (1 - boundary_fraction) * L
  double boundary_threshold = 0.8; // boundary_mass above this: spurious
  double band_tol = 1e-2;          // eta units
  double instab_rel = 1e-6;        // tol_instab = instab_rel * spectral radius
  double zero_rel = 1e-4;          // tol_zero = zero_rel * spectral radius
};

struct Spectrum {
  std::vector<CertifiedPair> pairs;  // sorted by (Re eta, Im eta)
  int rejected = 0;                  // pairs that failed residual certification
  double matrix_norm = 0.0;
  double spectral_radius = 0.0;
  double trace_defect = 0.0;         // |sum eta - tr M| / max(|tr M|, ||M||_2)
};

/// Solves, re-verifies every pair against `matrix`, and measures localization.
/// `matrix` acts on stacked (v, w) blocks of grid.size() each.
Spectrum certified_spectrum(const ComplexMatrix& matrix, const Grid& grid,
                            const SpectrumOptions& options = {});

/// Mass shares of a stacked (v, w) vector on the grid.
double tail_mass(const ComplexVector& u, const Grid& grid, double core_fraction);
double boundary_mass(const ComplexVector& u, const Grid& grid, double boundary_fraction);

/// Large-|x| locus {eta : Re eta = +-2b, |Im eta| >= lambda}, from Fourier
/// modes of the constant-coefficient limit D2 - lambda +- 2ib.
struct ContinuousBand {
  double re_offset = 0.0;  // 2|b|
  double im_edge = 0.0;    // lambda

  double distance(cplx eta) const;
  /// eta(k) on the branch with the given signs of Re and Im.
  cplx point(double k, int re_sign, int im_sign) const;
  /// k = 0 endpoints +-2b +- i lambda.
  std::vector<cplx> edges() const;
};

ContinuousBand continuous_band(const ModelSpec& spec, const StationarySolution& sol);

enum class ModeClass { Discrete, Continuous, Spurious };

const char* to_string(ModeClass cls);

struct Partition {
  std::vector<ModeClass> labels;  // aligned with Spectrum::pairs
  std::vector<int> discrete;
  std::vector<int> continuous;
  std::vector<int> spurious;
};

/// Spurious: boundary_mass > boundary_threshold. Continuous: within band_tol of
/// the band and delocalized. Discrete: everything else.
Partition separate_discrete(const Spectrum& spectrum, const ContinuousBand& band,
                            const SpectrumOptions& options = {});

enum class Verdict { Unstable, OscillatoryInternal, NeutrallyStable };

const char* to_string(Verdict verdict);

struct ClassifyTolerances {
  double scale = 1.0;  // spectral radius
  double instab_rel = 1e-6;
  double zero_rel = 1e-4;

  double instab() const { return instab_rel * scale; }
  double zero() const { return zero_rel * scale; }
};

struct StabilityReport {
  Verdict verdict = Verdict::NeutrallyStable;
  double max_growth = 0.0;
  int zero_modes = 0;
  std::vector<cplx> discrete;
  ContinuousBand continuous_band;
  double tol_instab = 0.0;
  double tol_zero = 0.0;
  // Pairing diagnostics (filled by analyze_stability; -1 when not measured).
  double pairing_defect = -1.0;    // max over nonzero discrete eta of dist(-eta, spectrum)
  double conjugate_defect = -1.0;  // max over nonzero discrete eta of dist(eta^*, spectrum)
};

StabilityReport classify(const std::vector<cplx>& discrete, const ClassifyTolerances& tol);

/// Distance from `target` to the nearest eigenvalue of `spectrum`.
double nearest_distance(const Spectrum& spectrum, cplx target);

/// Full single-point pipeline: operators, certified spectrum, partition, report.
struct StabilityAnalysis {
  SolvedModel model;
  Grid grid;
  Spectrum spectrum;
  Partition partition;
  StabilityReport report;
};

StabilityAnalysis analyze_stability(const SolvedModel& model, const Grid& grid,
                                    const SpectrumOptions& options = {});

}  // namespace ptsol
