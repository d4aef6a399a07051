#include "microseg/spectral_partition.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "microseg/fft.hpp"
#include "microseg/imageops.hpp"

namespace microseg {

namespace {
constexpr double kPi = std::numbers::pi;
}

double SpectrumPartition::theta_upper(size_t m) const {
  return m + 1 < thetas.size() ? thetas[m + 1] : thetas[0] + kPi;
}

double SpectrumPartition::omega_upper(size_t m, size_t n) const {
  const auto& s = scales[m];
  return n + 1 < s.size() ? s[n + 1] : kPi;
}

void SpectrumPartition::validate() const {
  if (thetas.empty()) throw std::invalid_argument("SpectrumPartition: need at least one sector");
  if (scales.size() != thetas.size())
    throw std::invalid_argument("SpectrumPartition: one scale list per sector");
  for (size_t i = 1; i < thetas.size(); ++i)
    if (thetas[i] <= thetas[i - 1])
      throw std::invalid_argument("SpectrumPartition: thetas must be strictly increasing");
  for (const auto& s : scales) {
    if (s.empty()) throw std::invalid_argument("SpectrumPartition: every sector needs a scale");
    for (size_t i = 0; i < s.size(); ++i) {
      if (s[i] <= 0.0 || s[i] >= kPi)
        throw std::invalid_argument("SpectrumPartition: scales must lie in (0, pi)");
      if (i > 0 && s[i] <= s[i - 1])
        throw std::invalid_argument("SpectrumPartition: scales must be strictly increasing");
    }
    if (s[0] != scales[0][0])
      throw std::invalid_argument("SpectrumPartition: first scale must be shared (common disk)");
  }
}

void DetectionParams::validate() const {
  if (percentile <= 0.0 || percentile >= 1.0)
    throw std::invalid_argument("DetectionParams: percentile must lie in (0,1)");
  if (eta <= 0.0 || eta >= 1.0) throw std::invalid_argument("DetectionParams: eta must lie in (0,1)");
  if (scale_space_step <= 0.0)
    throw std::invalid_argument("DetectionParams: scale_space_step must be positive");
  if (max_scale_space_levels < 1)
    throw std::invalid_argument("DetectionParams: need at least one scale-space level");
}

PolarSpectrum pseudo_polar(const Image& v) {
  // square-ify when needed; the plain spectrum is resampled directly, since
  // zero-padding a nonzero-mean image would smear sinc sidelobes over the
  // whole polar grid
  int side = std::max(v.width, v.height);
  Spectrum spec;
  if (v.width == v.height) {
    spec = fft2(v);
  } else {
    Image grid(side, side, 0.0);
    for (int y = 0; y < v.height; ++y)
      for (int x = 0; x < v.width; ++x) grid.at(x, y) = v.at(x, y);
    spec = fft2(grid);
  }

  // |F| with wrapped (periodic) indexing for bilinear sampling
  auto magnitude = [&](int kx, int ky) {
    kx = ((kx % side) + side) % side;
    ky = ((ky % side) + side) % side;
    return std::abs(spec.at(kx, ky));
  };

  PolarSpectrum polar;
  polar.n_theta = 2 * side;
  polar.n_radius = side;
  polar.data.assign(static_cast<size_t>(polar.n_theta) * polar.n_radius, 0.0);
  polar.theta_axis.resize(polar.n_theta);
  polar.radius_axis.resize(polar.n_radius);
  for (int it = 0; it < polar.n_theta; ++it) polar.theta_axis[it] = kPi * it / polar.n_theta;
  for (int ir = 0; ir < polar.n_radius; ++ir)
    polar.radius_axis[ir] = kPi * ir / (polar.n_radius - 1);

  // omega = pi corresponds to bin side/2 along an axis
  const double bins_per_rad = side / (2.0 * kPi);
  for (int it = 0; it < polar.n_theta; ++it) {
    double ct = std::cos(polar.theta_axis[it]);
    double st = std::sin(polar.theta_axis[it]);
    for (int ir = 0; ir < polar.n_radius; ++ir) {
      double gx = polar.radius_axis[ir] * ct * bins_per_rad;
      double gy = polar.radius_axis[ir] * st * bins_per_rad;
      int x0 = static_cast<int>(std::floor(gx));
      int y0 = static_cast<int>(std::floor(gy));
      double fx = gx - x0;
      double fy = gy - y0;
      double val = (1 - fx) * (1 - fy) * magnitude(x0, y0) + fx * (1 - fy) * magnitude(x0 + 1, y0) +
                   (1 - fx) * fy * magnitude(x0, y0 + 1) + fx * fy * magnitude(x0 + 1, y0 + 1);
      polar.at(it, ir) = val;
    }
  }
  return polar;
}

PolarSpectrum hard_threshold(const PolarSpectrum& spec, double tau) {
  if (tau < 0.0) throw std::invalid_argument("hard_threshold: tau must be non-negative");
  PolarSpectrum out = spec;
  for (double& a : out.data)
    if (std::abs(a) <= tau) a = 0.0;
  return out;
}

std::vector<double> marginal_profile(const PolarSpectrum& spec, ProfileAxis axis,
                                     std::optional<std::pair<int, int>> restriction) {
  if (axis == ProfileAxis::ByAngle) {
    int r0 = 0, r1 = spec.n_radius;
    if (restriction) std::tie(r0, r1) = *restriction;
    if (r0 < 0 || r1 > spec.n_radius || r0 >= r1)
      throw std::invalid_argument("marginal_profile: empty radius restriction");
    std::vector<double> profile(spec.n_theta, 0.0);
    for (int it = 0; it < spec.n_theta; ++it) {
      double s = 0.0;
      for (int ir = r0; ir < r1; ++ir) s += spec.at(it, ir);
      profile[it] = s / (r1 - r0);
    }
    return profile;
  }
  // by radius; theta restriction may wrap cyclically
  int t0 = 0, count = spec.n_theta;
  if (restriction) {
    t0 = restriction->first;
    count = restriction->second - restriction->first;
    if (count <= 0) count += spec.n_theta;  // wrapped range
    if (count <= 0 || count > spec.n_theta)
      throw std::invalid_argument("marginal_profile: empty theta restriction");
  }
  std::vector<double> profile(spec.n_radius, 0.0);
  for (int ir = 0; ir < spec.n_radius; ++ir) {
    double s = 0.0;
    for (int j = 0; j < count; ++j) {
      int it = (t0 + j) % spec.n_theta;
      it = (it + spec.n_theta) % spec.n_theta;
      s += spec.at(it, ir);
    }
    profile[ir] = s / count;
  }
  return profile;
}

namespace {

std::vector<double> gaussian_smooth_1d(const std::vector<double>& p, double std_dev, bool cyclic) {
  if (std_dev <= 0.0) return p;
  int n = static_cast<int>(p.size());
  int radius = static_cast<int>(std::ceil(3.0 * std_dev));
  std::vector<double> w(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    w[i + radius] = std::exp(-0.5 * i * i / (std_dev * std_dev));
    sum += w[i + radius];
  }
  for (double& v : w) v /= sum;
  std::vector<double> out(p.size(), 0.0);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = -radius; j <= radius; ++j) {
      int k = i + j;
      k = cyclic ? ((k % n) + n) % n : mirror_index(k, n);
      acc += w[j + radius] * p[k];
    }
    out[i] = acc;
  }
  return out;
}

// Interior local minima with plateau handling: a maximal equal-value run
// descending on both sides counts once, at its midpoint.
std::vector<int> local_minima(const std::vector<double>& p, bool cyclic) {
  int n = static_cast<int>(p.size());
  std::vector<int> minima;
  if (n < 3) return minima;
  if (cyclic) {
    // walk maximal runs around the circle, starting at a run boundary
    int start = -1;
    for (int i = 0; i < n; ++i)
      if (p[i] != p[(i + n - 1) % n]) {
        start = i;
        break;
      }
    if (start < 0) return minima;  // constant profile
    int i = start, visited = 0;
    while (visited < n) {
      int len = 1;
      while (len < n && p[(i + len) % n] == p[i]) ++len;
      double prev = p[(i + n - 1) % n];
      double next = p[(i + len) % n];
      if (prev > p[i] && next > p[i]) minima.push_back((i + (len - 1) / 2) % n);
      i = (i + len) % n;
      visited += len;
    }
    std::sort(minima.begin(), minima.end());
  } else {
    int i = 0;
    while (i < n) {
      int len = 1;
      while (i + len < n && p[i + len] == p[i]) ++len;
      bool interior = i > 0 && i + len < n;
      if (interior && p[i - 1] > p[i] && p[i + len] > p[i]) minima.push_back(i + (len - 1) / 2);
      i += len;
    }
  }
  return minima;
}

int cyclic_offset(int from, int to, int n) {
  int d = ((to - from) % n + n) % n;
  return d <= n / 2 ? d : d - n;
}

}  // namespace

double otsu_threshold(const std::vector<double>& values) {
  double lo = *std::min_element(values.begin(), values.end());
  double hi = *std::max_element(values.begin(), values.end());
  if (lo == hi) return lo - 1.0;  // single level: keep everything
  constexpr int kBins = 256;
  std::vector<int> hist(kBins, 0);
  for (double v : values) {
    int b = static_cast<int>((v - lo) / (hi - lo) * kBins);
    hist[std::clamp(b, 0, kBins - 1)]++;
  }
  double total = static_cast<double>(values.size());
  double sum_all = 0.0;
  for (int b = 0; b < kBins; ++b) sum_all += b * static_cast<double>(hist[b]);
  double w0 = 0.0, sum0 = 0.0, best_var = -1.0;
  int best_bin = 0;
  for (int b = 0; b < kBins - 1; ++b) {
    w0 += hist[b];
    if (w0 == 0.0) continue;
    double w1 = total - w0;
    if (w1 == 0.0) break;
    sum0 += b * static_cast<double>(hist[b]);
    double m0 = sum0 / w0;
    double m1 = (sum_all - sum0) / w1;
    double var = w0 * w1 * (m0 - m1) * (m0 - m1);
    if (var > best_var) {
      best_var = var;
      best_bin = b;
    }
  }
  // threshold at the upper edge of the chosen bin
  return lo + (best_bin + 1) * (hi - lo) / kBins;
}

std::vector<int> detect_boundaries_1d(const std::vector<double>& profile,
                                      const DetectionParams& params, bool cyclic) {
  if (profile.size() < 3) throw std::invalid_argument("detect_boundaries_1d: profile too short");
  params.validate();
  int n = static_cast<int>(profile.size());
  int levels = std::min(params.max_scale_space_levels, static_cast<int>(std::ceil(n / 8.0)));

  std::vector<int> seeds = local_minima(profile, cyclic);
  if (seeds.empty()) return {};

  struct Chain {
    int origin;
    int position;
    int lifetime = 1;
    bool alive = true;
  };
  std::vector<Chain> chains;
  chains.reserve(seeds.size());
  for (int s : seeds) chains.push_back({s, s});

  for (int level = 1; level <= levels; ++level) {
    auto smoothed = gaussian_smooth_1d(profile, params.scale_space_step * level, cyclic);
    auto minima = local_minima(smoothed, cyclic);
    // minima drift faster under heavier smoothing; widen the match window
    // with the level so surviving chains are not cut off mid-track
    int window = 2 + level;
    for (auto& ch : chains) {
      if (!ch.alive) continue;
      int best = -1, best_dist = window + 1, best_off = 0;
      for (int m : minima) {
        int off = cyclic ? cyclic_offset(ch.position, m, n) : m - ch.position;
        int dist = std::abs(off);
        // prefer the left candidate on ties so shifts stay covariant
        if (dist < best_dist || (dist == best_dist && off < best_off)) {
          best = m;
          best_dist = dist;
          best_off = off;
        }
      }
      if (best < 0) {
        ch.alive = false;
      } else {
        ch.position = best;
        ch.lifetime++;
      }
    }
  }

  std::vector<double> lifetimes;
  lifetimes.reserve(chains.size());
  for (const auto& ch : chains) lifetimes.push_back(static_cast<double>(ch.lifetime));
  double cut = otsu_threshold(lifetimes);
  std::vector<int> boundaries;
  for (const auto& ch : chains)
    if (static_cast<double>(ch.lifetime) > cut) boundaries.push_back(ch.origin);
  std::sort(boundaries.begin(), boundaries.end());
  return boundaries;
}

namespace {

// index of the theta sample at/after the given angle
int theta_index_of(const PolarSpectrum& spec, double theta) {
  double step = kPi / spec.n_theta;
  return static_cast<int>(std::ceil(theta / step - 1e-12));
}

}  // namespace

SpectrumPartition detect_partition(const PolarSpectrum& spec, const DetectionParams& params) {
  params.validate();
  SpectrumPartition part;

  // interpolation residue scaled to the spectrum; anything below carries no
  // structure and must not seed minima chains
  double peak = 0.0;
  for (double v : spec.data) peak = std::max(peak, std::abs(v));
  const double floor = 1e-12 * peak;
  auto denoise = [&](std::vector<double> p) {
    for (double& v : p)
      if (v <= floor) v = 0.0;
    return p;
  };

  // the first couple of radius rings are bilinear mixtures of the DC bin
  // and carry no orientation information
  int r0 = std::min(3, spec.n_radius - 1);
  auto angle_profile = denoise(
      marginal_profile(spec, ProfileAxis::ByAngle, std::make_pair(r0, spec.n_radius)));
  auto theta_idx = detect_boundaries_1d(angle_profile, params, /*cyclic=*/true);
  if (theta_idx.empty()) {
    part.thetas = {0.0};
  } else {
    for (int i : theta_idx) part.thetas.push_back(spec.theta_axis[i]);
  }

  size_t n_sectors = part.thetas.size();
  part.scales.resize(n_sectors);
  for (size_t m = 0; m < n_sectors; ++m) {
    int t0 = theta_index_of(spec, part.thetas[m]);
    int t1 = m + 1 < n_sectors ? theta_index_of(spec, part.thetas[m + 1])
                               : theta_index_of(spec, part.thetas[0]) + spec.n_theta;
    auto radial = denoise(marginal_profile(spec, ProfileAxis::ByRadius,
                                           std::make_pair(t0 % spec.n_theta, t1 % spec.n_theta)));
    // r=0 anchors the approximation band even when thresholding zeroed the
    // DC mass; without the anchor a zero-mean texture has no interior
    // minimum below its first peak
    double radial_peak = *std::max_element(radial.begin(), radial.end());
    if (radial_peak > 0.0) radial[0] = 2.0 * radial_peak;
    auto omega_idx = detect_boundaries_1d(radial, params, /*cyclic=*/false);
    std::vector<double> scales;
    for (int i : omega_idx) {
      double w = spec.radius_axis[i];
      if (w > 0.0 && w < kPi) scales.push_back(w);
    }
    if (scales.empty()) scales.push_back(kPi / 2.0);  // degenerate: single low-pass split
    part.scales[m] = std::move(scales);
  }

  // common disk: every sector shares the smallest first boundary
  double omega1 = part.scales[0][0];
  for (const auto& s : part.scales) omega1 = std::min(omega1, s[0]);
  for (auto& s : part.scales) s[0] = omega1;

  part.validate();
  return part;
}

std::vector<std::vector<double>> wedge_density(const PolarSpectrum& spec,
                                               const SpectrumPartition& part) {
  part.validate();
  size_t n_sectors = part.n_sectors();
  std::vector<std::vector<double>> mass(n_sectors);
  for (size_t m = 0; m < n_sectors; ++m) mass[m].assign(part.scales[m].size(), 0.0);

  for (int it = 0; it < spec.n_theta; ++it) {
    double theta = spec.theta_axis[it];
    // sector lookup on the cyclic [0, pi) circle
    size_t sector = n_sectors - 1;
    double t = theta;
    if (t < part.thetas[0]) t += kPi;
    for (size_t m = 0; m < n_sectors; ++m) {
      if (t >= part.thetas[m] && t < part.theta_upper(m)) {
        sector = m;
        break;
      }
    }
    const auto& scales = part.scales[sector];
    for (int ir = 0; ir < spec.n_radius; ++ir) {
      double r = spec.radius_axis[ir];
      if (r < scales[0]) continue;  // central disk: no wedge
      size_t n = scales.size() - 1;
      for (size_t j = 0; j + 1 < scales.size(); ++j) {
        if (r < scales[j + 1]) {
          n = j;
          break;
        }
      }
      mass[sector][n] += std::abs(spec.at(it, ir));
    }
  }

  std::vector<std::vector<double>> densities(n_sectors);
  for (size_t m = 0; m < n_sectors; ++m) {
    double theta_span = part.theta_upper(m) - part.thetas[m];
    densities[m].resize(part.scales[m].size());
    for (size_t n = 0; n < part.scales[m].size(); ++n) {
      double omega_span = part.omega_upper(m, n) - part.scales[m][n];
      densities[m][n] = mass[m][n] / (omega_span * theta_span);
    }
  }
  return densities;
}

SpectrumPartition merge_partition(const SpectrumPartition& part,
                                  const std::vector<std::vector<double>>& densities, double eta) {
  part.validate();
  if (densities.size() != part.n_sectors())
    throw std::invalid_argument("merge_partition: densities do not match the partition");
  double max_density = 0.0;
  for (const auto& sector : densities)
    for (double d : sector) max_density = std::max(max_density, d);

  SpectrumPartition merged = part;
  for (size_t m = 0; m < part.n_sectors(); ++m) {
    size_t n_scales = part.scales[m].size();
    std::vector<bool> keep(n_scales, true);
    // walk wedges outermost to innermost; wedge j-1 (1-based) has density
    // index j-2 and lower boundary omega_{j-1}
    for (size_t j = n_scales; j >= 3; --j) {
      if (densities[m][j - 2] < eta * max_density) keep[j - 2] = false;
    }
    std::vector<double> kept;
    for (size_t i = 0; i < n_scales; ++i)
      if (keep[i]) kept.push_back(part.scales[m][i]);
    merged.scales[m] = std::move(kept);
  }
  return merged;
}

std::string partition_to_json(const SpectrumPartition& part, double tau, double eta) {
  nlohmann::json j;
  j["thetas"] = part.thetas;
  j["scales"] = part.scales;
  j["tau"] = tau;
  j["eta"] = eta;
  return j.dump(2);
}

SpectrumPartition partition_from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  SpectrumPartition part;
  part.thetas = j.at("thetas").get<std::vector<double>>();
  part.scales = j.at("scales").get<std::vector<std::vector<double>>>();
  part.validate();
  return part;
}

}  // namespace microseg
