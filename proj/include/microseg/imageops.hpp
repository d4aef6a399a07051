#pragma once

#include <vector>

#include "microseg/image.hpp"

namespace microseg {

/// Square convolution kernel of side 2*radius+1, weights normalized to sum 1
/// and symmetric under reflection.
struct Kernel {
  int radius = 0;
  std::vector<double> weights;  // (2r+1)^2, row-major

  double at(int dx, int dy) const {
    int side = 2 * radius + 1;
    return weights[static_cast<size_t>(dy + radius) * side + (dx + radius)];
  }
};

enum class Padding { Symmetric };

/// Sampled Gaussian truncated at ceil(truncation*std), renormalized.
Kernel gaussian_kernel(double std_dev, double truncation = 3.0);

Image convolve(const Image& img, const Kernel& ker, Padding boundary = Padding::Symmetric);

/// sqrt(Dx^2 + Dy^2), forward differences (backward at the far borders).
Image gradient_magnitude(const Image& img);

/// The n*p rule: sort ascending, return the entry at 1-based index
/// ceil(n*p) clamped to [1,n].
double percentile_value(std::vector<double> values, double p);

/// Mirror index into [0,n): ... 2 1 | 0 1 2 ... n-1 | n-1 n-2 ...
inline int mirror_index(int i, int n) {
  if (n == 1) return 0;
  int period = 2 * n;
  int m = ((i % period) + period) % period;
  return m < n ? m : period - 1 - m;
}

/// Whole-sample mirror extension to 2w x 2h (right/bottom reflected).
Image mirror_extend(const Image& img);

}  // namespace microseg
