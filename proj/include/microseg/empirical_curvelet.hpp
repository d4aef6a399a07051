#pragma once

#include <utility>
#include <vector>

#include "microseg/image.hpp"
#include "microseg/spectral_partition.hpp"

namespace microseg {

/// Meyer transition polynomial: 0 below 0, 1 above 1,
/// 35t^4 - 84t^5 + 70t^6 - 20t^7 in between (B(t) + B(1-t) = 1).
double transition_B(double t);

/// Radial/angular transition half-widths. gamma must keep consecutive
/// radial transition bands disjoint; delta_theta must fit twice into every
/// sector.
struct TransitionSpec {
  double gamma = 0.0;
  double delta_theta = 0.0;
};

/// Widest admissible transitions: gamma at 0.9x its bound, delta_theta at
/// 0.45x the narrowest sector.
TransitionSpec auto_transition(const SpectrumPartition& part);

void validate_transition(const SpectrumPartition& part, const TransitionSpec& spec);

/// 1D Meyer-type empirical wavelet bank on interior boundaries
/// 0 < w_1 < ... < w_N <= pi; the last wavelet is open-ended above.
class Ewt1dFilterBank {
 public:
  Ewt1dFilterBank(std::vector<double> boundaries, double gamma);

  double scaling(double omega) const;
  double wavelet(size_t n, double omega) const;  // n in [0, num_wavelets)
  size_t num_wavelets() const { return boundaries_.size(); }
  double gamma() const { return gamma_; }

 private:
  std::vector<double> boundaries_;
  double gamma_;
};

/// Radial window W_n^m evaluated at |omega|; n is the 1-based wedge index,
/// open-ended for the sector's outermost wedge.
double radial_window(double omega_mag, size_t sector, size_t n, const SpectrumPartition& part,
                     double gamma);

/// Angular window V_m, pi-periodic so each wedge covers its antipodal
/// mirror; identically 1 when the partition has a single sector.
double angular_window(double theta, size_t sector, const SpectrumPartition& part,
                      double delta_theta);

/// Purely radial low-pass window phi_1.
double lowpass_window(double omega_mag, const SpectrumPartition& part, double gamma);

/// Fourier-domain windows sampled on the Cartesian frequency grid; together
/// the squared windows sum to 1 at every bin (tight frame).
struct CurveletFilterBank {
  int width = 0;
  int height = 0;
  SpectrumPartition partition;
  TransitionSpec transition;
  std::vector<double> lowpass;                     // width*height
  std::vector<std::vector<double>> wedges;         // width*height each
  std::vector<std::pair<size_t, size_t>> wedge_id; // 1-based (m, n) per wedge

  size_t num_subbands() const { return wedges.size(); }
};

CurveletFilterBank build_filter_bank(const SpectrumPartition& part, const TransitionSpec& spec,
                                     int width, int height);
CurveletFilterBank build_filter_bank(const SpectrumPartition& part, int width, int height);

/// One filtered image per window; windows are real so the transform of a
/// real image stays real.
struct CoefficientSet {
  Image approx;
  std::vector<Image> details;
  std::vector<std::pair<size_t, size_t>> detail_id;  // matches the bank's wedge_id
};

CoefficientSet ect_forward(const Image& v, const CurveletFilterBank& bank);
Image ect_inverse(const CoefficientSet& coeffs, const CurveletFilterBank& bank);

struct ModifiedEctResult {
  SpectrumPartition partition;
  CurveletFilterBank bank;
  CoefficientSet coeffs;
  double tau = 0.0;
};

/// The full adaptive transform: pseudo-polar spectrum, percentile hard
/// threshold, boundary detection, wedge merging, bank construction,
/// filtering.
ModifiedEctResult modified_ect(const Image& v, const DetectionParams& params);

}  // namespace microseg
