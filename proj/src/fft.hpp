#pragma once

#include "ptsol/types.hpp"

namespace ptsol::detail {

// Unnormalized forward DFT, X_m = sum_j x_j e^{-2 pi i j m / N}.
ComplexVector fft_forward(const ComplexVector& x);

// Inverse DFT including the 1/N factor.
ComplexVector fft_inverse(const ComplexVector& X);

}  // namespace ptsol::detail
