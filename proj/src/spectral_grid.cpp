#include "ptsol/spectral_grid.hpp"

#include <cmath>
#include <numbers>

#include "fft.hpp"
#include "ptsol/error.hpp"

namespace ptsol {

Grid::Grid(int n_points, double half_width) : n_(n_points), half_width_(half_width) {
  if (n_points < 4 || n_points % 2 != 0)
    throw Error(ErrorCode::InvalidArgument, "grid size must be even and >= 4");
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw Error(ErrorCode::InvalidArgument, "grid half-width must be positive");
  points_.resize(n_);
  for (int j = 0; j < n_; ++j) points_[j] = -half_width_ + 2.0 * half_width_ * j / n_;
}

double Grid::wavenumber(int m) const {
  const int shifted = m < n_ / 2 ? m : m - n_;
  return std::numbers::pi * shifted / half_width_;
}

RealVector Grid::wavenumbers() const {
  RealVector k(n_);
  for (int m = 0; m < n_; ++m) k[m] = wavenumber(m);
  return k;
}

ComplexMatrix fourier_diff_matrix(const Grid& grid, int order) {
  if (order != 1 && order != 2)
    throw Error(ErrorCode::InvalidArgument, "differentiation order must be 1 or 2");
  const int n = grid.size();
  const double pi = std::numbers::pi;
  const double step = 2.0 * pi / n;  // spacing in theta = pi x / L
  const double scale = pi / grid.half_width();

  ComplexMatrix d(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int offset = i - j;
      const double sign = (offset % 2 == 0) ? 1.0 : -1.0;
      double entry = 0.0;
      if (order == 1) {
        if (offset != 0) entry = 0.5 * sign / std::tan(0.5 * offset * step);
        entry *= scale;
      } else {
        if (offset == 0) {
          entry = -pi * pi / (3.0 * step * step) - 1.0 / 6.0;
        } else {
          const double s = std::sin(0.5 * offset * step);
          entry = -0.5 * sign / (s * s);
        }
        entry *= scale * scale;
      }
      d(i, j) = entry;
    }
  }
  return d;
}

ComplexField spectral_derivative(const ComplexField& field, const Grid& grid, int order) {
  if (order != 1 && order != 2)
    throw Error(ErrorCode::InvalidArgument, "differentiation order must be 1 or 2");
  if (field.size() != grid.size())
    throw Error(ErrorCode::InvalidArgument, "field length does not match grid");
  const int n = grid.size();
  ComplexVector coeffs = detail::fft_forward(field);
  for (int m = 0; m < n; ++m) {
    const double k = grid.wavenumber(m);
    if (order == 1) {
      coeffs[m] *= (m == n / 2) ? cplx(0.0) : cplx(0.0, k);
    } else {
      coeffs[m] *= -k * k;
    }
  }
  return detail::fft_inverse(coeffs);
}

namespace {

// Derivatives 0..3 at one end of the grid from a polynomial through
// `stencil` consecutive samples. `first` is the index of the first sample and
// `origin` the offset (in units of h) of the evaluation point from it.
Eigen::Vector4cd end_derivatives(const ComplexField& f, int first, int stencil, double origin,
                                 double h) {
  Eigen::MatrixXd vandermonde(stencil, stencil);
  Eigen::VectorXcd rhs(stencil);
  for (int r = 0; r < stencil; ++r) {
    const double t = r - origin;
    double power = 1.0;
    for (int c = 0; c < stencil; ++c) {
      vandermonde(r, c) = power;
      power *= t;
    }
    rhs[r] = f[first + r];
  }
  const Eigen::VectorXcd coeffs =
      vandermonde.cast<cplx>().colPivHouseholderQr().solve(rhs);
  Eigen::Vector4cd derivs;
  double factorial = 1.0;
  for (int k = 0; k < 4; ++k) {
    if (k > 0) factorial *= k;
    derivs[k] = k < stencil ? coeffs[k] * factorial / std::pow(h, k) : cplx(0.0);
  }
  return derivs;
}

}  // namespace

ComplexField corrected_derivative(const ComplexField& field, const Grid& grid, int order,
                                  int stencil) {
  if (order != 1 && order != 2)
    throw Error(ErrorCode::InvalidArgument, "differentiation order must be 1 or 2");
  if (field.size() != grid.size())
    throw Error(ErrorCode::InvalidArgument, "field length does not match grid");
  const int n = grid.size();
  if (stencil < 4 || stencil > n / 2)
    throw Error(ErrorCode::InvalidArgument, "correction stencil must lie in [4, N/2]");

  const double h = grid.spacing();
  const double len = grid.half_width();
  // Right end is extrapolated to x = +L, one step past the last sample.
  const Eigen::Vector4cd right = end_derivatives(field, n - stencil, stencil, stencil, h);
  const Eigen::Vector4cd left = end_derivatives(field, 0, stencil, 0.0, h);
  const Eigen::Vector4cd jump = right - left;

  ComplexField smooth(n);
  ComplexField correction(n);
  for (int j = 0; j < n; ++j) {
    const double x = grid.point(j);
    const double x2 = x * x;
    const double l2 = len * len;
    const cplx c = jump[0] * x / (2 * len) + jump[1] * x2 / (4 * len) +
                   jump[2] * (x2 * x - l2 * x) / (12 * len) +
                   jump[3] * (x2 - l2) * (x2 - l2) / (48 * len);
    smooth[j] = field[j] - c;
    if (order == 1) {
      correction[j] = jump[0] / (2 * len) + jump[1] * x / (2 * len) +
                      jump[2] * (3 * x2 - l2) / (12 * len) +
                      jump[3] * x * (x2 - l2) / (12 * len);
    } else {
      correction[j] = jump[1] / (2 * len) + jump[2] * x / (2 * len) +
                      jump[3] * (3 * x2 - l2) / (12 * len);
    }
  }
  return spectral_derivative(smooth, grid, order) + correction;
}

}  // namespace ptsol
