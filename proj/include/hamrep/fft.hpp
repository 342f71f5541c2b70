#pragma once

#include <complex>
#include <vector>

#include "hamrep/util.hpp"

namespace hamrep {

// In-place radix-2 complex FFT. Periodic grids in this project are
// power-of-two sized, which keeps the transform dependency-free and
// bit-reproducible across runs.
void fft_inplace(std::vector<std::complex<double>>& a, bool inverse);

std::vector<std::complex<double>> fft_forward(const std::vector<double>& x);

// Inverse of fft_forward, returning the real part (imaginary part is
// discarded; callers that need it should use fft_inplace directly).
std::vector<double> fft_inverse_real(std::vector<std::complex<double>> spec);

// Signed mode index for bin k of an n-point transform: 0,1,...,n/2,-n/2+1,...,-1.
inline long fft_mode(size_t k, size_t n) {
  return (k <= n / 2) ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(n);
}

}  // namespace hamrep
