#include "microseg/empirical_curvelet.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "microseg/fft.hpp"
#include "microseg/imageops.hpp"

namespace microseg {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kHalfPi = std::numbers::pi / 2.0;
}  // namespace

double transition_B(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  double t4 = t * t * t * t;
  return t4 * (35.0 + t * (-84.0 + t * (70.0 - 20.0 * t)));
}

namespace {

double gamma_bound(const SpectrumPartition& part) {
  double bound = 1.0;
  for (const auto& scales : part.scales)
    for (size_t i = 0; i + 1 < scales.size(); ++i)
      bound = std::min(bound, (scales[i + 1] - scales[i]) / (scales[i + 1] + scales[i]));
  return bound;
}

double min_sector_width(const SpectrumPartition& part) {
  double w = kPi;
  for (size_t m = 0; m < part.n_sectors(); ++m)
    w = std::min(w, part.theta_upper(m) - part.thetas[m]);
  return w;
}

// sin/cos taper pair shared by the 1D and 2D windows
double rise(double x, double lo, double half_width) {  // 0 -> 1
  return std::sin(kHalfPi * transition_B((x - lo) / (2.0 * half_width)));
}
double fall(double x, double lo, double half_width) {  // 1 -> 0
  return std::cos(kHalfPi * transition_B((x - lo) / (2.0 * half_width)));
}

}  // namespace

TransitionSpec auto_transition(const SpectrumPartition& part) {
  TransitionSpec spec;
  spec.gamma = 0.9 * gamma_bound(part);
  spec.delta_theta = 0.45 * min_sector_width(part);
  return spec;
}

void validate_transition(const SpectrumPartition& part, const TransitionSpec& spec) {
  if (spec.gamma <= 0.0 || spec.gamma >= 1.0)
    throw std::invalid_argument("TransitionSpec: gamma must lie in (0,1)");
  if (spec.gamma > gamma_bound(part) + 1e-15)
    throw std::invalid_argument("TransitionSpec: gamma overlaps consecutive radial transitions");
  if (part.n_sectors() > 1) {
    if (spec.delta_theta <= 0.0)
      throw std::invalid_argument("TransitionSpec: delta_theta must be positive");
    if (spec.delta_theta > 0.5 * min_sector_width(part) + 1e-15)
      throw std::invalid_argument("TransitionSpec: delta_theta exceeds half the narrowest sector");
  }
}

Ewt1dFilterBank::Ewt1dFilterBank(std::vector<double> boundaries, double gamma)
    : boundaries_(std::move(boundaries)), gamma_(gamma) {
  if (boundaries_.empty()) throw std::invalid_argument("Ewt1dFilterBank: no boundaries");
  for (size_t i = 0; i < boundaries_.size(); ++i) {
    if (boundaries_[i] <= 0.0 || boundaries_[i] > kPi)
      throw std::invalid_argument("Ewt1dFilterBank: boundaries must lie in (0, pi]");
    if (i > 0 && boundaries_[i] <= boundaries_[i - 1])
      throw std::invalid_argument("Ewt1dFilterBank: boundaries must be strictly increasing");
  }
  if (gamma_ <= 0.0 || gamma_ >= 1.0)
    throw std::invalid_argument("Ewt1dFilterBank: gamma must lie in (0,1)");
  for (size_t i = 0; i + 1 < boundaries_.size(); ++i) {
    double bound = (boundaries_[i + 1] - boundaries_[i]) / (boundaries_[i + 1] + boundaries_[i]);
    if (gamma_ > bound)
      throw std::invalid_argument("Ewt1dFilterBank: gamma overlaps consecutive transitions");
  }
}

double Ewt1dFilterBank::scaling(double omega) const {
  double w = std::abs(omega);
  double w1 = boundaries_[0];
  if (w <= (1.0 - gamma_) * w1) return 1.0;
  if (w <= (1.0 + gamma_) * w1) return fall(w, (1.0 - gamma_) * w1, gamma_ * w1);
  return 0.0;
}

double Ewt1dFilterBank::wavelet(size_t n, double omega) const {
  if (n >= boundaries_.size()) throw std::invalid_argument("Ewt1dFilterBank: wavelet index");
  double w = std::abs(omega);
  double lo = boundaries_[n];
  bool outermost = n + 1 == boundaries_.size();
  if (w < (1.0 - gamma_) * lo) return 0.0;
  if (w <= (1.0 + gamma_) * lo) return rise(w, (1.0 - gamma_) * lo, gamma_ * lo);
  if (outermost) return 1.0;
  double hi = boundaries_[n + 1];
  if (w <= (1.0 - gamma_) * hi) return 1.0;
  if (w <= (1.0 + gamma_) * hi) return fall(w, (1.0 - gamma_) * hi, gamma_ * hi);
  return 0.0;
}

double lowpass_window(double omega_mag, const SpectrumPartition& part, double gamma) {
  double w1 = part.scales[0][0];
  if (omega_mag <= (1.0 - gamma) * w1) return 1.0;
  if (omega_mag <= (1.0 + gamma) * w1) return fall(omega_mag, (1.0 - gamma) * w1, gamma * w1);
  return 0.0;
}

double radial_window(double omega_mag, size_t sector, size_t n, const SpectrumPartition& part,
                     double gamma) {
  const auto& scales = part.scales.at(sector - 1);
  if (n < 1 || n > scales.size()) throw std::invalid_argument("radial_window: wedge index");
  double lo = scales[n - 1];
  double w = omega_mag;
  if (w < (1.0 - gamma) * lo) return 0.0;
  if (w <= (1.0 + gamma) * lo) return rise(w, (1.0 - gamma) * lo, gamma * lo);
  if (n == scales.size()) return 1.0;  // open-ended outermost wedge
  double hi = scales[n];
  if (w <= (1.0 - gamma) * hi) return 1.0;
  if (w <= (1.0 + gamma) * hi) return fall(w, (1.0 - gamma) * hi, gamma * hi);
  return 0.0;
}

double angular_window(double theta, size_t sector, const SpectrumPartition& part,
                      double delta_theta) {
  if (part.n_sectors() == 1) return 1.0;
  double a = part.thetas.at(sector - 1);
  double b = part.theta_upper(sector - 1);
  double best = 0.0;
  for (int k = -1; k <= 1; ++k) {
    double t = theta + k * kPi;
    if (t < a - delta_theta || t > b + delta_theta) continue;
    double v;
    if (t <= a + delta_theta)
      v = std::sin(kHalfPi * transition_B((t - a + delta_theta) / (2.0 * delta_theta)));
    else if (t >= b - delta_theta)
      v = std::cos(kHalfPi * transition_B((t - b + delta_theta) / (2.0 * delta_theta)));
    else
      v = 1.0;
    best = std::max(best, v);
  }
  return best;
}

CurveletFilterBank build_filter_bank(const SpectrumPartition& part, const TransitionSpec& spec,
                                     int width, int height) {
  part.validate();
  validate_transition(part, spec);

  CurveletFilterBank bank;
  bank.width = width;
  bank.height = height;
  bank.partition = part;
  bank.transition = spec;
  size_t n_bins = static_cast<size_t>(width) * height;
  bank.lowpass.assign(n_bins, 0.0);
  for (size_t m = 1; m <= part.n_sectors(); ++m)
    for (size_t n = 1; n <= part.scales[m - 1].size(); ++n) {
      bank.wedges.emplace_back(n_bins, 0.0);
      bank.wedge_id.emplace_back(m, n);
    }

  for (int ky = 0; ky < height; ++ky) {
    double wy = 2.0 * kPi * freq_cycles(ky, height);
    for (int kx = 0; kx < width; ++kx) {
      double wx = 2.0 * kPi * freq_cycles(kx, width);
      double r = std::hypot(wx, wy);
      // Nyquist bins alias +pi and -pi, so their angle is ambiguous; pick
      // the mirror-consistent representative to keep the windows even and
      // the filtered images real
      double ax = wx, ay = wy;
      if (2 * kx == width) ay = std::abs(wy);
      if (2 * ky == height) ax = std::abs(wx);
      double theta = std::atan2(ay, ax);
      if (theta < 0.0) theta += kPi;
      if (theta >= kPi) theta -= kPi;
      size_t idx = static_cast<size_t>(ky) * width + kx;
      bank.lowpass[idx] = lowpass_window(r, part, spec.gamma);
      for (size_t w = 0; w < bank.wedges.size(); ++w) {
        auto [m, n] = bank.wedge_id[w];
        double radial = radial_window(r, m, n, part, spec.gamma);
        if (radial == 0.0) continue;
        bank.wedges[w][idx] = radial * angular_window(theta, m, part, spec.delta_theta);
      }
    }
  }

  // a wedge whose support falls between grid samples would silently emit
  // empty subbands
  for (size_t w = 0; w < bank.wedges.size(); ++w) {
    bool has_support = false;
    for (double v : bank.wedges[w])
      if (v != 0.0) {
        has_support = true;
        break;
      }
    if (!has_support)
      throw std::invalid_argument(
          "build_filter_bank: wedge (m=" + std::to_string(bank.wedge_id[w].first) +
          ", n=" + std::to_string(bank.wedge_id[w].second) + ") has no support on the " +
          std::to_string(width) + "x" + std::to_string(height) +
          " frequency grid; partition too fine");
  }
  return bank;
}

CurveletFilterBank build_filter_bank(const SpectrumPartition& part, int width, int height) {
  return build_filter_bank(part, auto_transition(part), width, height);
}

CoefficientSet ect_forward(const Image& v, const CurveletFilterBank& bank) {
  if (v.width != bank.width || v.height != bank.height)
    throw std::invalid_argument("ect_forward: image shape does not match the bank");
  Spectrum spec = fft2(v);
  auto filtered = [&](const std::vector<double>& window) {
    Spectrum s(spec.width, spec.height);
    for (size_t i = 0; i < window.size(); ++i) s.data[i] = spec.data[i] * window[i];
    return ifft2(s);
  };
  CoefficientSet coeffs;
  coeffs.approx = filtered(bank.lowpass);
  coeffs.details.reserve(bank.wedges.size());
  for (const auto& w : bank.wedges) coeffs.details.push_back(filtered(w));
  coeffs.detail_id = bank.wedge_id;
  return coeffs;
}

Image ect_inverse(const CoefficientSet& coeffs, const CurveletFilterBank& bank) {
  if (coeffs.details.size() != bank.wedges.size() || coeffs.detail_id != bank.wedge_id)
    throw std::invalid_argument("ect_inverse: coefficients do not match the bank");
  if (coeffs.approx.width != bank.width || coeffs.approx.height != bank.height)
    throw std::invalid_argument("ect_inverse: coefficient shape does not match the bank");
  Spectrum acc(bank.width, bank.height);
  auto accumulate = [&](const Image& img, const std::vector<double>& window) {
    Spectrum s = fft2(img);
    for (size_t i = 0; i < window.size(); ++i) acc.data[i] += s.data[i] * window[i];
  };
  accumulate(coeffs.approx, bank.lowpass);
  for (size_t w = 0; w < bank.wedges.size(); ++w) accumulate(coeffs.details[w], bank.wedges[w]);
  return ifft2(acc);
}

ModifiedEctResult modified_ect(const Image& v, const DetectionParams& params) {
  params.validate();
  PolarSpectrum polar = pseudo_polar(v);
  double tau = percentile_value(polar.data, params.percentile);
  PolarSpectrum thresholded = hard_threshold(polar, tau);
  SpectrumPartition detected = detect_partition(thresholded, params);
  auto densities = wedge_density(thresholded, detected);
  ModifiedEctResult result;
  result.tau = tau;
  result.partition = merge_partition(detected, densities, params.eta);
  result.bank = build_filter_bank(result.partition, v.width, v.height);
  result.coeffs = ect_forward(v, result.bank);
  return result;
}

}  // namespace microseg
