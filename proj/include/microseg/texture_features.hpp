#pragma once

#include <utility>
#include <vector>

#include "microseg/empirical_curvelet.hpp"
#include "microseg/image.hpp"

namespace microseg {

/// Per-pixel rows (row-major pixel order) of local curvelet energies, one
/// column per detail subband in (m, n) order.
struct FeatureMatrix {
  int width = 0;   // image shape behind the row indexing
  int height = 0;
  size_t cols = 0;
  std::vector<double> data;  // rows x cols, row-major
  std::vector<std::pair<size_t, size_t>> col_id;  // (m, n) per column
  std::vector<int> radii;

  size_t rows() const { return static_cast<size_t>(width) * height; }
  double at(size_t row, size_t col) const { return data[row * cols + col]; }
  double& at(size_t row, size_t col) { return data[row * cols + col]; }
};

/// ceil(pi / omega), at least 1.
int window_radius(double omega);

/// Per pixel, the l2 norm of the subband over the (2r+1)^2 window centered
/// there divided by the window's pixel count; symmetric padding at borders.
Image local_energy(const Image& subband, int radius);

FeatureMatrix feature_matrix(const CoefficientSet& coeffs, const SpectrumPartition& part);

/// stem.f64 (row-major little-endian doubles) plus stem.json with rows,
/// cols, (m,n) column labels and window radii.
void export_feature_matrix(const std::string& stem, const FeatureMatrix& fm);
FeatureMatrix import_feature_matrix(const std::string& stem);

}  // namespace microseg
