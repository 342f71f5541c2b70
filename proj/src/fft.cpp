#include "hamrep/fft.hpp"

namespace hamrep {

void fft_inplace(std::vector<std::complex<double>>& a, bool inverse) {
  const size_t n = a.size();
  if (n == 0) return;
  if ((n & (n - 1)) != 0)
    throw ResolutionError("fft: length must be a power of two, got " + std::to_string(n));

  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  for (size_t len = 2; len <= n; len <<= 1) {
    const double ang = 2.0 * kPi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }

  if (inverse) {
    const double inv = 1.0 / static_cast<double>(n);
    for (auto& x : a) x *= inv;
  }
}

std::vector<std::complex<double>> fft_forward(const std::vector<double>& x) {
  std::vector<std::complex<double>> a(x.begin(), x.end());
  fft_inplace(a, false);
  return a;
}

std::vector<double> fft_inverse_real(std::vector<std::complex<double>> spec) {
  fft_inplace(spec, true);
  std::vector<double> out(spec.size());
  for (size_t i = 0; i < spec.size(); ++i) out[i] = spec[i].real();
  return out;
}

}  // namespace hamrep
