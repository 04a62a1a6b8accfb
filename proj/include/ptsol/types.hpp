#pragma once

#include <complex>

#include <Eigen/Dense>

namespace ptsol {

using cplx = std::complex<double>;
using RealVector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

// Complex samples of a transverse profile (phi, Psi, v, omega) on a Grid.
using ComplexField = Eigen::VectorXcd;

}  // namespace ptsol
