#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace microseg {

/// Real-valued 2D grid, row-major, gray levels nominally in [0,255].
struct Image {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  Image() = default;
  Image(int w, int h, double fill = 0.0)
      : width(w), height(h), data(static_cast<size_t>(w) * h, fill) {
    if (w <= 0 || h <= 0) throw std::invalid_argument("Image: non-positive dimensions");
  }

  double& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
  double at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
  size_t size() const { return data.size(); }
  bool same_shape(const Image& o) const { return width == o.width && height == o.height; }

  bool all_finite() const {
    for (double v : data)
      if (!std::isfinite(v)) return false;
    return true;
  }
};

/// Integer label grid; values in {0..k-1}.
struct LabelMap {
  int width = 0;
  int height = 0;
  std::vector<int> labels;

  LabelMap() = default;
  LabelMap(int w, int h, int fill = 0)
      : width(w), height(h), labels(static_cast<size_t>(w) * h, fill) {}

  int& at(int x, int y) { return labels[static_cast<size_t>(y) * width + x]; }
  int at(int x, int y) const { return labels[static_cast<size_t>(y) * width + x]; }
  size_t size() const { return labels.size(); }
};

inline double image_min(const Image& img) {
  double m = img.data[0];
  for (double v : img.data) m = std::min(m, v);
  return m;
}

inline double image_max(const Image& img) {
  double m = img.data[0];
  for (double v : img.data) m = std::max(m, v);
  return m;
}

inline double image_mean(const Image& img) {
  double s = 0.0;
  for (double v : img.data) s += v;
  return s / static_cast<double>(img.size());
}

inline double l2_norm(const Image& img) {
  double s = 0.0;
  for (double v : img.data) s += v * v;
  return std::sqrt(s);
}

inline double max_abs_diff(const Image& a, const Image& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.data.size(); ++i) m = std::max(m, std::abs(a.data[i] - b.data[i]));
  return m;
}

}  // namespace microseg
