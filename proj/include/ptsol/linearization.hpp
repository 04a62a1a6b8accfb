#pragma once

#include "ptsol/analytic.hpp"
#include "ptsol/spectral_grid.hpp"
#include "ptsol/types.hpp"

namespace ptsol {

// Perturbations Psi = [phi + (v + w) e^{eta z} + (v^* - w^*) e^{eta^* z}] e^{i lambda z}
// lead to [[0, L0], [L1, 0]] (v, w) = -i eta (v, w). We store the equivalent
// M = i [[0, L0], [L1, 0]] so that M u = eta u directly.
struct LinearizedOperator {
  ComplexMatrix l0;
  ComplexMatrix l1;
  ComplexMatrix block;
};

/// Stationary residual above which build_operators refuses to linearize.
inline constexpr double kLinearizationResidualLimit = 1e-3;

/// L0 = D2 - lambda + (V + iW) + g1|phi|^2 + g2|phi|^{2 kappa}
/// L1 = D2 - lambda + (V + iW) + 3 g1|phi|^2 + g2 (1 + 2 kappa)|phi|^{2 kappa}
/// Throws InconsistentParameters when (spec, sol) does not satisfy the
/// stationary equation on the grid.
LinearizedOperator build_operators(const ModelSpec& spec, const StationarySolution& sol,
                                   const Grid& grid);

/// Independent linearization: central finite differences of the rotating-frame
/// right-hand side i[Psi_xx - lambda Psi + (V + iW)Psi + N(Psi)] around phi,
/// acting on stacked (Re p, Im p). Returned as a (real-valued) complex matrix
/// whose eigenvalues are growth rates eta, like LinearizedOperator::block.
ComplexMatrix direct_frechet_operator(const ModelSpec& spec, const StationarySolution& sol,
                                      const Grid& grid);

}  // namespace ptsol
