#pragma once

#include <complex>
#include <vector>

namespace sdbp::fft {

// In-place complex DFT backed by FFTW (plans cached per size, thread-safe
// execution). forward() is the unnormalized DFT; inverse() applies 1/N so
// inverse(forward(x)) == x up to rounding.
void forward(std::vector<std::complex<double>>& v);
void inverse(std::vector<std::complex<double>>& v);

// Baseband bin frequency for index i of an n-point transform at fs Hz.
inline double bin_frequency(std::size_t i, std::size_t n, double fs) {
  const auto si = static_cast<long long>(i);
  const auto sn = static_cast<long long>(n);
  const long long k = (si <= (sn - 1) / 2) ? si : si - sn;
  return static_cast<double>(k) * fs / static_cast<double>(n);
}

}  // namespace sdbp::fft
