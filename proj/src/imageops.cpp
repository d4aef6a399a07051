#include "microseg/imageops.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace microseg {

Kernel gaussian_kernel(double std_dev, double truncation) {
  if (std_dev <= 0.0) throw std::invalid_argument("gaussian_kernel: std must be positive");
  if (truncation < 1.0) throw std::invalid_argument("gaussian_kernel: truncation must be >= 1");
  Kernel ker;
  ker.radius = static_cast<int>(std::ceil(truncation * std_dev));
  int side = 2 * ker.radius + 1;
  ker.weights.resize(static_cast<size_t>(side) * side);
  double sum = 0.0;
  for (int dy = -ker.radius; dy <= ker.radius; ++dy)
    for (int dx = -ker.radius; dx <= ker.radius; ++dx) {
      double w = std::exp(-(dx * double(dx) + dy * double(dy)) / (2.0 * std_dev * std_dev));
      ker.weights[static_cast<size_t>(dy + ker.radius) * side + (dx + ker.radius)] = w;
      sum += w;
    }
  for (double& w : ker.weights) w /= sum;
  return ker;
}

Image convolve(const Image& img, const Kernel& ker, Padding) {
  Image out(img.width, img.height);
  int r = ker.radius;
  int side = 2 * r + 1;
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      double acc = 0.0;
      for (int dy = -r; dy <= r; ++dy) {
        int sy = mirror_index(y + dy, img.height);
        const double* row = &img.data[static_cast<size_t>(sy) * img.width];
        const double* wrow = &ker.weights[static_cast<size_t>(dy + r) * side];
        for (int dx = -r; dx <= r; ++dx) {
          acc += wrow[dx + r] * row[mirror_index(x + dx, img.width)];
        }
      }
      out.at(x, y) = acc;
    }
  }
  return out;
}

Image gradient_magnitude(const Image& img) {
  if (img.width < 2 || img.height < 2)
    throw std::invalid_argument("gradient_magnitude: needs at least 2 pixels per dimension");
  Image out(img.width, img.height);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      // forward differences (backward at the far borders): a central stencil
      // cannot see Nyquist-rate oscillation, which the LTV classifier must
      double dx_val = x + 1 < img.width ? img.at(x + 1, y) - img.at(x, y)
                                        : img.at(x, y) - img.at(x - 1, y);
      double dy_val = y + 1 < img.height ? img.at(x, y + 1) - img.at(x, y)
                                         : img.at(x, y) - img.at(x, y - 1);
      out.at(x, y) = std::sqrt(dx_val * dx_val + dy_val * dy_val);
    }
  }
  return out;
}

double percentile_value(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("percentile_value: empty list");
  if (p <= 0.0 || p >= 1.0) throw std::invalid_argument("percentile_value: p must lie in (0,1)");
  std::sort(values.begin(), values.end());
  auto n = static_cast<double>(values.size());
  auto idx = static_cast<long>(std::ceil(n * p));
  idx = std::clamp<long>(idx, 1, static_cast<long>(values.size()));
  return values[static_cast<size_t>(idx - 1)];
}

Image mirror_extend(const Image& img) {
  Image ext(2 * img.width, 2 * img.height);
  for (int y = 0; y < ext.height; ++y) {
    int sy = y < img.height ? y : 2 * img.height - 1 - y;
    for (int x = 0; x < ext.width; ++x) {
      int sx = x < img.width ? x : 2 * img.width - 1 - x;
      ext.at(x, y) = img.at(sx, sy);
    }
  }
  return ext;
}

}  // namespace microseg
