#pragma once

#include <optional>
#include <string>
#include <vector>

#include "microseg/image.hpp"

namespace microseg {

/// Magnitude of the spectrum resampled onto a (theta, radius) grid;
/// theta in [0, pi) (Hermitian symmetry halves the plane), radius in [0, pi].
struct PolarSpectrum {
  int n_theta = 0;
  int n_radius = 0;
  std::vector<double> data;  // row-major: [theta][radius]
  std::vector<double> theta_axis;
  std::vector<double> radius_axis;

  double& at(int it, int ir) { return data[static_cast<size_t>(it) * n_radius + ir]; }
  double at(int it, int ir) const { return data[static_cast<size_t>(it) * n_radius + ir]; }
};

/// Detected Fourier-plane partition: angular boundaries {theta_m} in
/// [0, pi) and per-sector scale boundaries {omega_n^m} in (0, pi), strictly
/// increasing; the first scale is shared by all sectors (the central disk).
struct SpectrumPartition {
  std::vector<double> thetas;
  std::vector<std::vector<double>> scales;

  size_t n_sectors() const { return thetas.size(); }
  double theta_upper(size_t m) const;  // theta_{m+1}, wrapping to theta_1 + pi
  double omega_upper(size_t m, size_t n) const;  // omega_{n+1}^m, pi past the end
  void validate() const;
};

struct DetectionParams {
  double percentile = 0.92;       // tau = this percentile of the polar magnitudes
  double eta = 0.1;               // merge fraction
  double scale_space_step = 1.0;  // Gaussian std increment per scale-space level
  int max_scale_space_levels = 64;

  void validate() const;
};

/// Square-ify and zero-pad 2x per axis, FFT, and bilinearly resample the
/// magnitude onto the polar grid (n_theta = 2*max(N,M), n_radius = max(N,M)).
PolarSpectrum pseudo_polar(const Image& v);

/// Pointwise T(a, tau): zero when |a| <= tau, unchanged otherwise.
PolarSpectrum hard_threshold(const PolarSpectrum& spec, double tau);

enum class ProfileAxis { ByAngle, ByRadius };

/// Mean magnitude along the collapsed axis. The optional restriction is a
/// half-open index range on the other axis; a by-angle profile restricted on
/// radius, a by-radius profile restricted on a (possibly wrapping) theta
/// range.
std::vector<double> marginal_profile(const PolarSpectrum& spec, ProfileAxis axis,
                                     std::optional<std::pair<int, int>> restriction = {});

/// Positions (sample indices) of scale-space-persistent local minima: smooth
/// with Gaussians of increasing std, track each level-0 minimum's survival,
/// and keep the lifetimes Otsu classifies as long.
std::vector<int> detect_boundaries_1d(const std::vector<double>& profile,
                                      const DetectionParams& params, bool cyclic);

/// Angles first from the cyclic by-angle profile, then scales per sector;
/// the shared disk radius is the minimum of the sectors' first boundaries.
SpectrumPartition detect_partition(const PolarSpectrum& spec, const DetectionParams& params);

/// Information density per polar wedge: thresholded magnitude mass divided
/// by the wedge's (omega span) x (theta span) area. densities[m][n] is wedge
/// n+1 of sector m+1; the outermost wedge extends to pi.
std::vector<std::vector<double>> wedge_density(const PolarSpectrum& spec,
                                               const SpectrumPartition& part);

/// Per sector, walking outermost-to-innermost, drop the inner boundary of
/// any low-density wedge (density < eta * max density); omega_1 and the
/// angular boundaries are never touched.
SpectrumPartition merge_partition(const SpectrumPartition& part,
                                  const std::vector<std::vector<double>>& densities, double eta);

/// JSON document {"thetas":[...], "scales":[[...],...], "tau":..., "eta":...}.
std::string partition_to_json(const SpectrumPartition& part, double tau, double eta);
SpectrumPartition partition_from_json(const std::string& text);

/// Between-class-variance threshold over a 256-bin histogram of the values;
/// returns the threshold value (keep sample iff value > threshold). The
/// degenerate single-level case returns a threshold below every value.
double otsu_threshold(const std::vector<double>& values);

}  // namespace microseg
