#pragma once

#include <complex>
#include <vector>

namespace mlin {

/// In-place complex FFT along all axes of a row-major array with the given
/// shape.  sign = -1 forward (e^{-2pi i}), +1 backward.  Unnormalized.
/// Backed by FFTW with a process-wide plan cache; safe to call concurrently.
void fft_nd(std::complex<double>* data, const std::vector<int>& shape, int sign);

inline void fft_1d(std::complex<double>* data, int n, int sign) {
    fft_nd(data, {n}, sign);
}

} // namespace mlin
