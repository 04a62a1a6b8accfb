#include "ptsol/linearization.hpp"

#include <string>

#include "ptsol/error.hpp"

namespace ptsol {

LinearizedOperator build_operators(const ModelSpec& spec, const StationarySolution& sol,
                                   const Grid& grid) {
  const ComplexField phi = evaluate_solution(spec, sol, grid);
  const ResidualReport residual = stationary_residual(phi, spec, sol.lambda, grid);
  if (!(residual.sup_norm <= kLinearizationResidualLimit))
    throw Error(ErrorCode::InconsistentParameters,
                "stationary residual " + std::to_string(residual.sup_norm) +
                    " exceeds the linearization limit");

  const int n = grid.size();
  const PotentialSamples pot = sample_potential(spec, grid);
  const RealVector high = modulus_power(phi, spec.kappa);
  const ComplexMatrix d2 = fourier_diff_matrix(grid, 2);

  LinearizedOperator op{d2, d2, ComplexMatrix::Zero(2 * n, 2 * n)};
  for (int j = 0; j < n; ++j) {
    const double s = std::norm(phi[j]);
    const cplx common(pot.v[j] - sol.lambda, pot.w[j]);
    op.l0(j, j) += common + spec.g1 * s + spec.g2 * high[j];
    op.l1(j, j) += common + 3.0 * spec.g1 * s + spec.g2 * (1.0 + 2.0 * spec.kappa) * high[j];
  }
  const cplx i(0.0, 1.0);
  op.block.topRightCorner(n, n) = i * op.l0;
  op.block.bottomLeftCorner(n, n) = i * op.l1;
  return op;
}

namespace {

// i [Psi_xx - lambda Psi + (V + iW) Psi + g1 |Psi|^2 Psi + g2 |Psi|^{2 kappa} Psi]
ComplexField rotating_rhs(const ComplexField& psi, const ModelSpec& spec, double lambda,
                          const PotentialSamples& pot, const Grid& grid) {
  ComplexField out = spectral_derivative(psi, grid, 2);
  const RealVector high = modulus_power(psi, spec.kappa);
  for (Eigen::Index j = 0; j < psi.size(); ++j) {
    out[j] += (cplx(pot.v[j] - lambda, pot.w[j]) + spec.g1 * std::norm(psi[j]) +
               spec.g2 * high[j]) *
              psi[j];
    out[j] *= cplx(0.0, 1.0);
  }
  return out;
}

}  // namespace

ComplexMatrix direct_frechet_operator(const ModelSpec& spec, const StationarySolution& sol,
                                      const Grid& grid) {
  const ComplexField phi = evaluate_solution(spec, sol, grid);
  const PotentialSamples pot = sample_potential(spec, grid);
  const int n = grid.size();
  const double delta = 1e-6 * phi.cwiseAbs().maxCoeff();

  ComplexMatrix jac = ComplexMatrix::Zero(2 * n, 2 * n);
  for (int part = 0; part < 2; ++part) {
    const cplx direction = part == 0 ? cplx(delta, 0.0) : cplx(0.0, delta);
    for (int j = 0; j < n; ++j) {
      ComplexField plus = phi;
      ComplexField minus = phi;
      plus[j] += direction;
      minus[j] -= direction;
      const ComplexField diff = (rotating_rhs(plus, spec, sol.lambda, pot, grid) -
                                 rotating_rhs(minus, spec, sol.lambda, pot, grid)) /
                                (2.0 * delta);
      const int col = part * n + j;
      for (int r = 0; r < n; ++r) {
        jac(r, col) = diff[r].real();
        jac(n + r, col) = diff[r].imag();
      }
    }
  }
  return jac;
}

}  // namespace ptsol
