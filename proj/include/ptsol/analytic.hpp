#pragma once

#include <optional>

#include "ptsol/spectral_grid.hpp"
#include "ptsol/types.hpp"

namespace ptsol {

enum class Family { ClassI, ClassII };

const char* to_string(Family family);

// Parameters of
//   i Psi_z + Psi_xx + [V(x) + i W(x)] Psi + g1 |Psi|^2 Psi + g2 |Psi|^{2 kappa} Psi = 0
// with V = -a(a+1) sech^2 x - V1 sech^{p} x, W = 2b tanh x, and p = 2 kappa
// (Class I) or 2/kappa (Class II).
struct ModelSpec {
  double a = 0.0;
  double b = 0.0;
  double v1 = 0.0;
  double kappa = 1.0;
  double g1 = 0.0;
  double g2 = 0.0;
  Family family = Family::ClassI;

  /// Exponent of sech in the extended-well term of V.
  double well_exponent() const;
  /// Exponent of sech in the stationary profile (1 or 1/kappa).
  double profile_exponent() const;
  /// Carrier wavenumber mu implied by b (mu = b or b*kappa).
  double carrier_wavenumber() const;
};

/// Throws KappaZero if kappa == 0 or InvalidArgument on non-finite fields.
void validate(const ModelSpec& spec);

struct StationarySolution {
  double phi0 = 1.0;
  double mu = 0.0;
  double lambda = 1.0;
  Family family = Family::ClassI;
};

/// Partial parameter set for solve_constraints. a, b and kappa are always
/// required; of {phi0, g1, g2, v1} at least two must be given, and any extra
/// knowns are checked for consistency.
struct Knowns {
  Family family = Family::ClassI;
  double a = 0.0;
  double b = 0.0;
  double kappa = 1.0;
  std::optional<double> phi0;
  std::optional<double> g1;
  std::optional<double> g2;
  std::optional<double> v1;
};

struct SolvedModel {
  ModelSpec spec;
  StationarySolution solution;
};

/// Resolves the amplitude/phase relations of the chosen family.
///
/// Class I:  phi0^{2 kappa} = V1/g2,  phi0^2 = (a^2 + a + 2)/g1,  mu = b,  lambda = 1 - mu^2.
/// Class II: phi0^2 = V1/g1,  phi0^{2 kappa} = [a(a+1) + 1/kappa + 1/kappa^2]/g2,
///           mu = b kappa,  lambda = 1/kappa^2 - mu^2.
///
/// Even powers of phi0 are solved first and phi0 is the positive root.
/// Errors: InfeasibleAmplitude, UnderDetermined, OverDetermined, KappaZero.
SolvedModel solve_constraints(const Knowns& knowns);

/// Relative tolerance used when over-specified knowns are cross-checked.
inline constexpr double kConstraintTolerance = 1e-12;

struct PotentialSamples {
  RealVector v;
  RealVector w;
};

PotentialSamples sample_potential(const ModelSpec& spec, const Grid& grid);

/// phi0 sech^{p}(x) e^{i mu x}; NonLocalizable for Class II with kappa < 0.
ComplexField evaluate_solution(const ModelSpec& spec, const StationarySolution& sol,
                               const Grid& grid);

struct ResidualReport {
  double sup_norm = 0.0;         // over |x| <= interior_fraction * L
  double boundary_modulus = 0.0; // max |field| at the two grid ends
  bool grid_too_coarse = false;  // advisory: boundary_modulus > 1e-10
};

inline constexpr double kInteriorFraction = 0.8;
inline constexpr double kBoundaryAdvisory = 1e-10;

/// Sup norm of Phi_xx + (V + iW)Phi + g1|Phi|^2 Phi + g2|Phi|^{2kappa} Phi - lambda Phi
/// over the interior of the grid, with jump-corrected spectral derivatives.
ResidualReport stationary_residual(const ComplexField& field, const ModelSpec& spec,
                                   double lambda, const Grid& grid);

struct PowerFlowProfile {
  RealVector values;
};

/// S = (i/2)(phi phi_x^* - phi^* phi_x) = Im(phi^* phi_x).
PowerFlowProfile power_flow(const ComplexField& field, const Grid& grid);

/// |field|^{2 kappa} evaluated from the modulus, never from complex powers.
RealVector modulus_power(const ComplexField& field, double kappa);

}  // namespace ptsol
