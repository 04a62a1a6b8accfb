#pragma once

#include "ptsol/types.hpp"

namespace ptsol {

/// Uniform periodic grid on [-L, L) with N (even) points, x_j = -L + 2Lj/N.
///
/// Wavenumbers follow FFT storage order: index m < N/2 holds pi*m/L and
/// index m >= N/2 holds pi*(m - N)/L, so the Nyquist mode sits at m = N/2
/// with k = -pi*N/(2L). Matrices and transforms built from a Grid are
/// reproducible bit-for-bit given (N, L).
class Grid {
 public:
  Grid(int n_points, double half_width);

  int size() const { return n_; }
  double half_width() const { return half_width_; }
  double spacing() const { return 2.0 * half_width_ / n_; }
  double point(int j) const { return points_[j]; }
  const RealVector& points() const { return points_; }

  double wavenumber(int m) const;
  RealVector wavenumbers() const;

  /// Index of the grid point at -x_j (periodic reflection, j -> (N - j) mod N).
  int mirror(int j) const { return (n_ - j) % n_; }

  bool operator==(const Grid& other) const {
    return n_ == other.n_ && half_width_ == other.half_width_;
  }

 private:
  int n_;
  double half_width_;
  RealVector points_;
};

/// Dense Fourier collocation differentiation matrix (order 1 or 2), from the
/// closed-form cotangent / cosecant-squared entries.
ComplexMatrix fourier_diff_matrix(const Grid& grid, int order);

/// Transform-based spectral derivative (order 1 or 2). The Nyquist
/// coefficient is dropped for odd orders, which matches fourier_diff_matrix.
ComplexField spectral_derivative(const ComplexField& field, const Grid& grid, int order);

/// Spectral derivative with endpoint-jump correction.
///
/// A profile that is smooth on [-L, L] but not periodic (a carrier e^{i mu x},
/// a slowly decaying tail) has jumps in its value and low derivatives across
/// the wrap point, which pollute the plain spectral derivative everywhere.
/// The jumps in f, f', f'', f''' are estimated from one-sided polynomial fits
/// of `stencil` samples at each end, subtracted with periodic piecewise
/// polynomials of known derivatives, and the smooth remainder is
/// differentiated spectrally.
ComplexField corrected_derivative(const ComplexField& field, const Grid& grid, int order,
                                  int stencil = 10);

}  // namespace ptsol
