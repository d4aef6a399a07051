#pragma once

// Brute-force reference implementations, independent of the library's
// fast paths. Test-only.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "microseg/clustering.hpp"
#include "microseg/image.hpp"
#include "microseg/imageops.hpp"

namespace oracles {

using microseg::FeatureMatrix;
using microseg::Image;
using microseg::Kernel;

// direct O(N^2 k^2) summation over the mirror-extended grid
inline Image convolve_naive(const Image& img, const Kernel& ker) {
  Image out(img.width, img.height);
  int r = ker.radius;
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) {
      double acc = 0.0;
      for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx)
          acc += ker.at(dx, dy) * img.at(microseg::mirror_index(x + dx, img.width),
                                         microseg::mirror_index(y + dy, img.height));
      out.at(x, y) = acc;
    }
  return out;
}

inline double region_average_naive(const Image& w, const Image& m1, const Image& m2) {
  double num = 0, den = 0, total = 0;
  for (size_t i = 0; i < w.size(); ++i) {
    num += w.data[i] * m1.data[i] * m2.data[i];
    den += m1.data[i] * m2.data[i];
    total += w.data[i];
  }
  return den == 0 ? total / static_cast<double>(w.size()) : num / den;
}

inline double local_energy_naive(const Image& s, int x, int y, int r) {
  double sum = 0.0;
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx) {
      double v = s.at(microseg::mirror_index(x + dx, s.width), microseg::mirror_index(y + dy, s.height));
      sum += v * v;
    }
  double count = (2.0 * r + 1) * (2.0 * r + 1);
  return std::sqrt(sum) / count;
}

// exhaustive k-means: minimum within-cluster cityblock sum over every
// assignment of n points to k clusters (coordinate-median centroids)
inline double kmeans_optimum(const FeatureMatrix& D, size_t k) {
  size_t n = D.rows();
  std::vector<int> assign(n, 0);
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> coords(k);
  while (true) {
    double obj = 0.0;
    bool valid = true;
    for (size_t j = 0; j < D.cols && valid; ++j) {
      for (size_t c = 0; c < k; ++c) coords[c].clear();
      for (size_t i = 0; i < n; ++i) coords[assign[i]].push_back(D.at(i, j));
      for (size_t c = 0; c < k; ++c) {
        if (coords[c].empty()) {
          valid = false;
          break;
        }
        std::sort(coords[c].begin(), coords[c].end());
        size_t m = coords[c].size();
        double med = (m % 2 == 1) ? coords[c][m / 2] : 0.5 * (coords[c][m / 2 - 1] + coords[c][m / 2]);
        for (double v : coords[c]) obj += std::abs(v - med);
      }
    }
    if (valid) best = std::min(best, obj);
    // next assignment in base-k counting
    size_t pos = 0;
    while (pos < n) {
      if (++assign[pos] < static_cast<int>(k)) break;
      assign[pos] = 0;
      ++pos;
    }
    if (pos == n) break;
  }
  return best;
}

inline double accuracy_best_permutation(const microseg::LabelMap& predicted,
                                        const microseg::LabelMap& truth, int k) {
  std::vector<int> perm(k);
  for (int i = 0; i < k; ++i) perm[i] = i;
  double best = 0.0;
  do {
    size_t hits = 0;
    for (size_t i = 0; i < predicted.size(); ++i)
      if (perm[predicted.labels[i]] == truth.labels[i]) ++hits;
    best = std::max(best, static_cast<double>(hits) / predicted.size());
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace oracles
