// DFT conventions used throughout: forward kernel e^{-j 2 pi k l / N} with no
// scaling, inverse carries the 1/N factor. Vector transforms run on FFTW;
// the dense kernel matrices are available for matrix assembly and as the
// reference the FFT path is tested against.

#pragma once

#include "uwofdm/types.hpp"

namespace uwofdm {

/// Forward DFT, x_tilde[k] = sum_l x[l] e^{-j 2 pi k l / N}.
CVec dft(const CVec& x);

/// Inverse DFT, x[l] = (1/N) sum_k x_tilde[k] e^{+j 2 pi k l / N}.
CVec idft(const CVec& x_tilde);

/// Dense forward kernel, [F]_{kl} = e^{-j 2 pi k l / N}.
CMat dft_matrix(int n);

/// Dense inverse kernel, F^{-1} = (1/N) F^H.
CMat idft_matrix(int n);

}  // namespace uwofdm
