#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace resolimit {

// In-place complex FFT of power-of-two length.
// sign = +1 evaluates X[j] = sum_m a[m] e^{+2 pi i m j / M} (no scaling),
// sign = -1 the conjugate transform. Backed by FFTW when available.
void fft_inplace(std::vector<std::complex<double>>& a, int sign);

size_t next_pow2(size_t n);

}  // namespace resolimit
