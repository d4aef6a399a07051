#pragma once

#include <cstdint>
#include <vector>

#include "microseg/image.hpp"
#include "microseg/texture_features.hpp"

namespace microseg {

/// Engine-agnostic deterministic RNG (splitmix64 core) so sampled indices
/// and reals are reproducible across compilers.
class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64();
  /// Uniform in [0, n) without modulo bias.
  size_t uniform_index(size_t n);
  /// Uniform in [0, 1).
  double uniform_real();
  /// Standard normal (Box-Muller).
  double normal();
  /// Derived independent stream.
  Rng fork(uint64_t salt) const;

  /// First `count` entries of a Fisher-Yates shuffle of 0..n-1.
  std::vector<size_t> sample_without_replacement(size_t n, size_t count);

 private:
  uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

double cityblock(const FeatureMatrix& D, size_t row, const std::vector<double>& point);
double cityblock_rows(const FeatureMatrix& D, size_t a, size_t b);

struct KMeansParams {
  size_t k = 2;
  int replications = 10;
  int max_iter = 100;
  uint64_t seed = 0;
};

struct ClusterResult {
  LabelMap labels;
  double objective = 0.0;  // within-cluster cityblock sum
  int iterations = 0;
};

/// Seeding per Arthur's heuristic under the cityblock metric: the next
/// centroid is drawn with probability proportional to the distance to the
/// nearest chosen one.
std::vector<std::vector<double>> kmeans_pp_seed(const FeatureMatrix& D, size_t k, Rng& rng);

/// Lloyd iterations with coordinate-wise-median centroid updates (the L1
/// minimizer); best of `replications` restarts by objective.
ClusterResult kmeans(const FeatureMatrix& D, const KMeansParams& params);

struct NystromEigs {
  std::vector<double> eigenvalues;          // of the normalized Laplacian, ascending
  std::vector<std::vector<double>> vectors; // one vector (length = rows) per eigenvalue
  double tau_scale = 0.0;
};

/// Approximate leading eigenpairs of the symmetric-normalized graph
/// Laplacian over exp(-d_cityblock/tau) affinities, via the one-shot
/// orthogonalized Nystrom completion from a sampled subset.
NystromEigs nystrom_eigs(const FeatureMatrix& D, size_t n_samples, size_t n_eigs, Rng& rng);

/// Exact counterpart on the full affinity matrix (test oracle and small-n
/// fallback).
NystromEigs dense_laplacian_eigs(const FeatureMatrix& D, size_t n_eigs);

struct MBOClusterParams {
  double mu_fidelity = 30.0;
  double tolerance = 1e-7;
  double dt = 0.1;
  int threshold_interval = 3;   // diffusion steps per thresholding
  size_t n_samples = 300;
  size_t n_eigs = 30;
  double seed_fraction = 0.25;  // fraction of init labels used as fidelity
  int max_iter = 300;
  uint64_t seed = 0;

  void validate() const;
};

/// Semi-supervised graph MBO: indicator field diffused semi-implicitly in
/// the truncated eigenbasis with fidelity on the sampled seed rows,
/// thresholded to the nearest class vertex every threshold_interval steps.
ClusterResult multiclass_mbo(const FeatureMatrix& D, const LabelMap& init_labels,
                             const MBOClusterParams& params);

/// Same dynamics on a caller-supplied spectral basis (used to compare the
/// Nystrom run against the dense oracle).
ClusterResult multiclass_mbo_with_basis(const FeatureMatrix& D, const LabelMap& init_labels,
                                        const NystromEigs& eigs, const MBOClusterParams& params,
                                        const std::vector<size_t>& seed_rows);

}  // namespace microseg
