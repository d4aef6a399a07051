#pragma once

#include <complex>
#include <vector>

#include "microseg/image.hpp"

namespace microseg {

/// Complex frequency grid, DC at index (0,0). Forward transform is
/// unnormalized; the inverse carries the 1/(N*M) factor, so
/// ifft2(fft2(x)) == x.
struct Spectrum {
  int width = 0;
  int height = 0;
  std::vector<std::complex<double>> data;

  Spectrum() = default;
  Spectrum(int w, int h)
      : width(w), height(h), data(static_cast<size_t>(w) * h, {0.0, 0.0}) {}

  std::complex<double>& at(int kx, int ky) { return data[static_cast<size_t>(ky) * width + kx]; }
  std::complex<double> at(int kx, int ky) const { return data[static_cast<size_t>(ky) * width + kx]; }
};

Spectrum fft2(const Image& img);

/// Inverse transform; the imaginary residue is dropped (callers feed
/// Hermitian-symmetric spectra).
Image ifft2(const Spectrum& spec);

/// Fully complex inverse, for callers that need the residue.
std::vector<std::complex<double>> ifft2_complex(const Spectrum& spec);

/// Frequency of bin k on an n-sample axis, in cycles per sample,
/// wrapped to (-1/2, 1/2].
inline double freq_cycles(int k, int n) {
  double f = static_cast<double>(k) / static_cast<double>(n);
  return f > 0.5 ? f - 1.0 : f;
}

}  // namespace microseg
