#pragma once

#include <complex>
#include <vector>

#include "hkt/grid.hpp"

namespace hkt::fft {

// In-place 4D transforms between physical samples and spectral coefficients
// with the normalization a(x) = sum_k ahat(k) e^{2 pi i k.x}.
// Plans use FFTW_ESTIMATE so results are bit-reproducible across runs.
void forward(int n, std::vector<cplx>& a);   // physical -> spectral (divides by n^4)
void backward(int n, std::vector<cplx>& a);  // spectral -> physical

// Copy of spectral data padded to m = 3n/2 per axis (zero fill), and the
// inverse truncation. Used for de-aliased quadratic products.
std::vector<cplx> pad_spectral(const Grid& g, const std::vector<cplx>& a, int m);
void truncate_spectral(const Grid& g, const std::vector<cplx>& big, int m, std::vector<cplx>& out);

} // namespace hkt::fft
