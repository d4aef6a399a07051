#include "microseg/clustering.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace microseg {

uint64_t Rng::next_u64() {
  // splitmix64
  uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

size_t Rng::uniform_index(size_t n) {
  if (n == 0) throw std::invalid_argument("Rng::uniform_index: empty range");
  uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t x;
  do {
    x = next_u64();
  } while (x >= limit);
  return static_cast<size_t>(x % n);
}

double Rng::uniform_real() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = 0.0;
  while (u1 == 0.0) u1 = uniform_real();
  double u2 = uniform_real();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * 3.14159265358979323846 * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

Rng Rng::fork(uint64_t salt) const {
  Rng copy = *this;
  uint64_t s = copy.next_u64();
  return Rng(s ^ (salt * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL));
}

std::vector<size_t> Rng::sample_without_replacement(size_t n, size_t count) {
  if (count > n) throw std::invalid_argument("Rng: sample larger than population");
  std::vector<size_t> idx(n);
  std::iota(idx.begin(), idx.end(), size_t{0});
  for (size_t i = 0; i < count; ++i) {
    size_t j = i + uniform_index(n - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(count);
  return idx;
}

double cityblock(const FeatureMatrix& D, size_t row, const std::vector<double>& point) {
  double d = 0.0;
  const double* r = &D.data[row * D.cols];
  for (size_t c = 0; c < D.cols; ++c) d += std::abs(r[c] - point[c]);
  return d;
}

double cityblock_rows(const FeatureMatrix& D, size_t a, size_t b) {
  double d = 0.0;
  const double* ra = &D.data[a * D.cols];
  const double* rb = &D.data[b * D.cols];
  for (size_t c = 0; c < D.cols; ++c) d += std::abs(ra[c] - rb[c]);
  return d;
}

namespace {

size_t count_distinct_rows(const FeatureMatrix& D) {
  std::set<std::vector<double>> rows;
  for (size_t r = 0; r < D.rows(); ++r)
    rows.insert(std::vector<double>(D.data.begin() + r * D.cols, D.data.begin() + (r + 1) * D.cols));
  return rows.size();
}

}  // namespace

std::vector<std::vector<double>> kmeans_pp_seed(const FeatureMatrix& D, size_t k, Rng& rng) {
  size_t n = D.rows();
  if (k < 1 || n == 0) throw std::invalid_argument("kmeans_pp_seed: empty input");
  if (k > count_distinct_rows(D))
    throw std::invalid_argument("kmeans_pp_seed: k exceeds the number of distinct rows");

  std::vector<std::vector<double>> centroids;
  auto row_vec = [&](size_t r) {
    return std::vector<double>(D.data.begin() + r * D.cols, D.data.begin() + (r + 1) * D.cols);
  };
  centroids.push_back(row_vec(rng.uniform_index(n)));

  std::vector<double> nearest(n);
  while (centroids.size() < k) {
    double total = 0.0;
    for (size_t r = 0; r < n; ++r) {
      double best = cityblock(D, r, centroids[0]);
      for (size_t c = 1; c < centroids.size(); ++c)
        best = std::min(best, cityblock(D, r, centroids[c]));
      nearest[r] = best;
      total += best;
    }
    double draw = rng.uniform_real() * total;
    size_t pick = n;
    double acc = 0.0;
    for (size_t r = 0; r < n; ++r) {
      acc += nearest[r];
      if (nearest[r] > 0.0 && draw < acc) {
        pick = r;
        break;
      }
    }
    if (pick == n) {  // numerical tail: last positive-mass row
      for (size_t q = n; q-- > 0;)
        if (nearest[q] > 0.0) {
          pick = q;
          break;
        }
    }
    centroids.push_back(row_vec(pick));
  }
  return centroids;
}

namespace {

struct SingleRun {
  std::vector<int> assign;
  double objective = 0.0;
  int iterations = 0;
};

double assign_rows(const FeatureMatrix& D, const std::vector<std::vector<double>>& centroids,
                   std::vector<int>& assign) {
  double objective = 0.0;
  for (size_t r = 0; r < D.rows(); ++r) {
    int best = 0;
    double best_d = cityblock(D, r, centroids[0]);
    for (size_t c = 1; c < centroids.size(); ++c) {
      double d = cityblock(D, r, centroids[c]);
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    assign[r] = best;
    objective += best_d;
  }
  return objective;
}

// coordinate-wise median; even counts take the midpoint of the middle pair
void update_centroids(const FeatureMatrix& D, const std::vector<int>& assign,
                      std::vector<std::vector<double>>& centroids) {
  size_t k = centroids.size();
  std::vector<std::vector<size_t>> members(k);
  for (size_t r = 0; r < D.rows(); ++r) members[assign[r]].push_back(r);
  std::vector<double> coord;
  for (size_t c = 0; c < k; ++c) {
    if (members[c].empty()) continue;  // handled by the caller's repair step
    for (size_t j = 0; j < D.cols; ++j) {
      coord.clear();
      for (size_t r : members[c]) coord.push_back(D.at(r, j));
      std::sort(coord.begin(), coord.end());
      size_t m = coord.size();
      centroids[c][j] = (m % 2 == 1) ? coord[m / 2] : 0.5 * (coord[m / 2 - 1] + coord[m / 2]);
    }
  }
}

// an empty centroid is reseeded at the point farthest from its own centroid
void repair_empty(const FeatureMatrix& D, const std::vector<int>& assign,
                  std::vector<std::vector<double>>& centroids) {
  size_t k = centroids.size();
  std::vector<size_t> counts(k, 0);
  for (int a : assign) counts[a]++;
  for (size_t c = 0; c < k; ++c) {
    if (counts[c] > 0) continue;
    size_t farthest = 0;
    double worst = -1.0;
    for (size_t r = 0; r < D.rows(); ++r) {
      double d = cityblock(D, r, centroids[assign[r]]);
      if (d > worst) {
        worst = d;
        farthest = r;
      }
    }
    for (size_t j = 0; j < D.cols; ++j) centroids[c][j] = D.at(farthest, j);
  }
}

SingleRun kmeans_single(const FeatureMatrix& D, size_t k, int max_iter, Rng rng) {
  auto centroids = kmeans_pp_seed(D, k, rng);
  SingleRun run;
  run.assign.assign(D.rows(), 0);
  std::vector<int> prev(D.rows(), -1);
  for (int iter = 1; iter <= max_iter; ++iter) {
    run.objective = assign_rows(D, centroids, run.assign);
    run.iterations = iter;
    if (run.assign == prev) break;
    prev = run.assign;
    update_centroids(D, run.assign, centroids);
    repair_empty(D, run.assign, centroids);
  }
  return run;
}

}  // namespace

ClusterResult kmeans(const FeatureMatrix& D, const KMeansParams& params) {
  if (D.rows() == 0 || D.cols == 0) throw std::invalid_argument("kmeans: empty feature matrix");
  if (params.k < 1 || params.replications < 1 || params.max_iter < 1)
    throw std::invalid_argument("kmeans: invalid parameters");
  Rng base(params.seed);
  SingleRun best;
  bool have = false;
  for (int rep = 0; rep < params.replications; ++rep) {
    SingleRun run = kmeans_single(D, params.k, params.max_iter, base.fork(rep));
    if (!have || run.objective < best.objective) {
      best = std::move(run);
      have = true;
    }
  }
  ClusterResult result;
  result.labels.width = D.width;
  result.labels.height = D.height;
  result.labels.labels = std::move(best.assign);
  result.objective = best.objective;
  result.iterations = best.iterations;
  return result;
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd inverse_sqrt_psd(const MatrixXd& A) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(A);
  VectorXd vals = es.eigenvalues();
  double floor = std::max(1e-12 * vals.cwiseAbs().maxCoeff(), 1e-300);
  VectorXd inv_sqrt(vals.size());
  for (Eigen::Index i = 0; i < vals.size(); ++i)
    inv_sqrt[i] = vals[i] > floor ? 1.0 / std::sqrt(vals[i]) : 0.0;
  return es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

NystromEigs nystrom_eigs(const FeatureMatrix& D, size_t n_samples, size_t n_eigs, Rng& rng) {
  size_t n = D.rows();
  if (n_samples == 0 || n_samples > n || n_eigs == 0 || n_eigs > n_samples)
    throw std::invalid_argument("nystrom_eigs: need 0 < n_eigs <= n_samples <= rows");

  std::vector<size_t> sampled = rng.sample_without_replacement(n, n_samples);
  std::vector<char> is_sampled(n, 0);
  for (size_t s : sampled) is_sampled[s] = 1;
  std::vector<size_t> rest;
  rest.reserve(n - n_samples);
  for (size_t r = 0; r < n; ++r)
    if (!is_sampled[r]) rest.push_back(r);

  double tau = 0.0;
  size_t pairs = 0;
  for (size_t i = 0; i < sampled.size(); ++i)
    for (size_t j = i + 1; j < sampled.size(); ++j) {
      tau += cityblock_rows(D, sampled[i], sampled[j]);
      ++pairs;
    }
  tau = pairs > 0 ? tau / static_cast<double>(pairs) : 1.0;
  if (tau <= 0.0) tau = 1.0;

  size_t s = n_samples, r = rest.size();
  MatrixXd A(s, s), B(s, r);
  for (size_t i = 0; i < s; ++i) {
    for (size_t j = 0; j < s; ++j)
      A(i, j) = std::exp(-cityblock_rows(D, sampled[i], sampled[j]) / tau);
    for (size_t j = 0; j < r; ++j)
      B(i, j) = std::exp(-cityblock_rows(D, sampled[i], rest[j]) / tau);
  }

  // Nystrom degree estimates and symmetric normalization
  MatrixXd A_pinv =
      A.completeOrthogonalDecomposition().pseudoInverse();
  VectorXd d1 = A.rowwise().sum() + B.rowwise().sum();
  VectorXd b_row_sum = B.rowwise().sum();
  VectorXd d2 = B.colwise().sum().transpose() + B.transpose() * (A_pinv * b_row_sum);
  for (Eigen::Index i = 0; i < d1.size(); ++i) d1[i] = std::max(d1[i], 1e-300);
  for (Eigen::Index i = 0; i < d2.size(); ++i) d2[i] = std::max(d2[i], 1e-300);
  VectorXd d1_is = d1.cwiseSqrt().cwiseInverse();
  VectorXd d2_is = d2.cwiseSqrt().cwiseInverse();
  MatrixXd An = d1_is.asDiagonal() * A * d1_is.asDiagonal();
  MatrixXd Bn = d1_is.asDiagonal() * B * d2_is.asDiagonal();

  // one-shot orthogonalization
  MatrixXd An_is = inverse_sqrt_psd(An);
  MatrixXd S = An + An_is * (Bn * Bn.transpose()) * An_is;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(S);
  if (es.info() != Eigen::Success) throw std::runtime_error("nystrom_eigs: eigensolver failed");

  NystromEigs out;
  out.tau_scale = tau;
  // top n_eigs by affinity eigenvalue = bottom of the Laplacian spectrum
  std::vector<Eigen::Index> order(static_cast<size_t>(S.rows()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return es.eigenvalues()[a] > es.eigenvalues()[b]; });

  MatrixXd U(S.rows(), n_eigs);
  VectorXd sigma(n_eigs);
  for (size_t e = 0; e < n_eigs; ++e) {
    U.col(e) = es.eigenvectors().col(order[e]);
    sigma[e] = es.eigenvalues()[order[e]];
  }
  VectorXd sigma_is(n_eigs);
  for (size_t e = 0; e < n_eigs; ++e)
    sigma_is[e] = sigma[e] > 1e-12 ? 1.0 / std::sqrt(sigma[e]) : 0.0;

  MatrixXd M = An_is * U * sigma_is.asDiagonal();  // s x e
  MatrixXd V_sampled = An * M;
  MatrixXd V_rest = Bn.transpose() * M;

  out.eigenvalues.resize(n_eigs);
  out.vectors.assign(n_eigs, std::vector<double>(n, 0.0));
  for (size_t e = 0; e < n_eigs; ++e) {
    out.eigenvalues[e] = 1.0 - sigma[e];
    for (size_t i = 0; i < s; ++i) out.vectors[e][sampled[i]] = V_sampled(i, e);
    for (size_t j = 0; j < r; ++j) out.vectors[e][rest[j]] = V_rest(j, e);
  }
  return out;
}

NystromEigs dense_laplacian_eigs(const FeatureMatrix& D, size_t n_eigs) {
  size_t n = D.rows();
  if (n_eigs == 0 || n_eigs > n) throw std::invalid_argument("dense_laplacian_eigs: bad n_eigs");
  double tau = 0.0;
  size_t pairs = 0;
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) {
      tau += cityblock_rows(D, i, j);
      ++pairs;
    }
  tau = pairs > 0 ? tau / static_cast<double>(pairs) : 1.0;
  if (tau <= 0.0) tau = 1.0;

  MatrixXd W(n, n);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) W(i, j) = std::exp(-cityblock_rows(D, i, j) / tau);
  VectorXd d = W.rowwise().sum();
  VectorXd d_is = d.cwiseSqrt().cwiseInverse();
  MatrixXd Wn = d_is.asDiagonal() * W * d_is.asDiagonal();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(Wn);

  NystromEigs out;
  out.tau_scale = tau;
  out.eigenvalues.resize(n_eigs);
  out.vectors.assign(n_eigs, std::vector<double>(n, 0.0));
  for (size_t e = 0; e < n_eigs; ++e) {
    Eigen::Index idx = static_cast<Eigen::Index>(n - 1 - e);  // Eigen sorts ascending
    out.eigenvalues[e] = 1.0 - es.eigenvalues()[idx];
    for (size_t i = 0; i < n; ++i) out.vectors[e][i] = es.eigenvectors()(i, idx);
  }
  return out;
}

void MBOClusterParams::validate() const {
  if (mu_fidelity <= 0.0 || tolerance <= 0.0 || dt <= 0.0)
    throw std::invalid_argument("MBOClusterParams: mu, tolerance, dt must be positive");
  if (threshold_interval < 1 || max_iter < 1)
    throw std::invalid_argument("MBOClusterParams: iteration counts must be >= 1");
  if (seed_fraction <= 0.0 || seed_fraction > 1.0)
    throw std::invalid_argument("MBOClusterParams: seed_fraction must lie in (0,1]");
  if (n_samples == 0 || n_eigs == 0 || n_eigs > n_samples)
    throw std::invalid_argument("MBOClusterParams: need 0 < n_eigs <= n_samples");
}

ClusterResult multiclass_mbo_with_basis(const FeatureMatrix& D, const LabelMap& init_labels,
                                        const NystromEigs& eigs, const MBOClusterParams& params,
                                        const std::vector<size_t>& seed_rows) {
  params.validate();
  size_t n = D.rows();
  if (init_labels.size() != n) throw std::invalid_argument("multiclass_mbo: label/row mismatch");
  int k = 0;
  for (int l : init_labels.labels) {
    if (l < 0) throw std::invalid_argument("multiclass_mbo: negative label");
    k = std::max(k, l + 1);
  }
  std::vector<char> seeded(n, 0);
  std::vector<char> class_seen(k, 0);
  for (size_t r : seed_rows) {
    seeded[r] = 1;
    class_seen[init_labels.labels[r]] = 1;
  }
  for (int c = 0; c < k; ++c)
    if (!class_seen[c])
      throw std::invalid_argument("multiclass_mbo: class " + std::to_string(c) +
                                  " absent from the seed set");

  size_t n_eigs = eigs.eigenvalues.size();
  MatrixXd V(n, n_eigs);
  for (size_t e = 0; e < n_eigs; ++e)
    for (size_t i = 0; i < n; ++i) V(i, e) = eigs.vectors[e][i];
  VectorXd lam(n_eigs);
  for (size_t e = 0; e < n_eigs; ++e) lam[e] = eigs.eigenvalues[e];

  MatrixXd U = MatrixXd::Zero(n, k);
  for (size_t i = 0; i < n; ++i) U(i, init_labels.labels[i]) = 1.0;
  MatrixXd U_seed = U;

  auto threshold_rows = [&](MatrixXd& M) {
    for (size_t i = 0; i < n; ++i) {
      Eigen::Index best;
      M.row(i).maxCoeff(&best);
      M.row(i).setZero();
      M(i, best) = 1.0;
    }
  };

  ClusterResult result;
  MatrixXd prev = U;
  for (int cycle = 1; cycle <= params.max_iter; ++cycle) {
    for (int step = 0; step < params.threshold_interval; ++step) {
      MatrixXd forcing = MatrixXd::Zero(n, k);
      for (size_t i = 0; i < n; ++i)
        if (seeded[i]) forcing.row(i) = params.mu_fidelity * (U.row(i) - U_seed.row(i));
      MatrixXd a = V.transpose() * U;
      MatrixXd b = V.transpose() * forcing;
      for (size_t e = 0; e < n_eigs; ++e)
        a.row(e) = (a.row(e) - params.dt * b.row(e)) / (1.0 + params.dt * lam[e]);
      U = V * a;
    }
    threshold_rows(U);
    result.iterations = cycle;
    double diff = (U - prev).squaredNorm();
    double norm = U.squaredNorm();
    if (norm > 0.0 && diff / norm < params.tolerance) break;
    prev = U;
  }

  result.labels.width = D.width;
  result.labels.height = D.height;
  result.labels.labels.resize(n);
  for (size_t i = 0; i < n; ++i) {
    Eigen::Index best;
    U.row(i).maxCoeff(&best);
    result.labels.labels[i] = static_cast<int>(best);
  }
  // report the same within-cluster objective k-means uses
  std::vector<std::vector<double>> centroids(k, std::vector<double>(D.cols, 0.0));
  {
    std::vector<std::vector<double>> coord(k);
    for (size_t j = 0; j < D.cols; ++j) {
      for (int c = 0; c < k; ++c) coord[c].clear();
      for (size_t i = 0; i < n; ++i) coord[result.labels.labels[i]].push_back(D.at(i, j));
      for (int c = 0; c < k; ++c) {
        if (coord[c].empty()) continue;
        std::sort(coord[c].begin(), coord[c].end());
        size_t m = coord[c].size();
        centroids[c][j] =
            (m % 2 == 1) ? coord[c][m / 2] : 0.5 * (coord[c][m / 2 - 1] + coord[c][m / 2]);
      }
    }
  }
  result.objective = 0.0;
  for (size_t i = 0; i < n; ++i)
    result.objective += cityblock(D, i, centroids[result.labels.labels[i]]);
  return result;
}

ClusterResult multiclass_mbo(const FeatureMatrix& D, const LabelMap& init_labels,
                             const MBOClusterParams& params) {
  params.validate();
  size_t n = D.rows();
  Rng rng(params.seed);
  size_t n_seeds = std::max<size_t>(1, static_cast<size_t>(params.seed_fraction * n));
  std::vector<size_t> seed_rows = rng.sample_without_replacement(n, n_seeds);
  size_t n_samples = std::min(params.n_samples, n);
  size_t n_eigs = std::min(params.n_eigs, n_samples);
  NystromEigs eigs = nystrom_eigs(D, n_samples, n_eigs, rng);
  return multiclass_mbo_with_basis(D, init_labels, eigs, params, seed_rows);
}

}  // namespace microseg
