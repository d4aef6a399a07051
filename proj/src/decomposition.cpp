#include "microseg/decomposition.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "microseg/fft.hpp"
#include "microseg/imageops.hpp"

namespace microseg {

void DecompositionParams::validate() const {
  if (sigma <= 0.0) throw std::invalid_argument("DecompositionParams: sigma must be positive");
  if (!(0.0 < a1 && a1 < a2 && a2 < 1.0))
    throw std::invalid_argument("DecompositionParams: need 0 < a1 < a2 < 1");
  if (ltv_floor <= 0.0) throw std::invalid_argument("DecompositionParams: ltv_floor must be positive");
}

Image lowpass_meyer(const Image& f, double sigma) {
  if (sigma <= 0.0) throw std::invalid_argument("lowpass_meyer: sigma must be positive");
  Image ext = mirror_extend(f);
  Spectrum spec = fft2(ext);
  const double two_pi_sigma = 2.0 * std::numbers::pi * sigma;
  for (int ky = 0; ky < spec.height; ++ky) {
    double fy = freq_cycles(ky, spec.height);
    for (int kx = 0; kx < spec.width; ++kx) {
      double fx = freq_cycles(kx, spec.width);
      double a = two_pi_sigma * std::sqrt(fx * fx + fy * fy);
      double a2 = a * a;
      spec.at(kx, ky) *= 1.0 / (1.0 + a2 * a2);
    }
  }
  Image filt = ifft2(spec);
  Image out(f.width, f.height);
  for (int y = 0; y < f.height; ++y)
    for (int x = 0; x < f.width; ++x) out.at(x, y) = filt.at(x, y);
  return out;
}

Image ltv_reduction(const Image& f, const DecompositionParams& params) {
  params.validate();
  Image ltv_f = lowpass_meyer(gradient_magnitude(f), params.sigma);
  Image smoothed = lowpass_meyer(f, params.sigma);
  Image ltv_smoothed = lowpass_meyer(gradient_magnitude(smoothed), params.sigma);
  Image lambda(f.width, f.height);
  for (size_t i = 0; i < f.size(); ++i) {
    double denom = ltv_f.data[i];
    if (denom < params.ltv_floor) {
      lambda.data[i] = 0.0;  // flat neighborhood: cartoon
      continue;
    }
    double v = (denom - ltv_smoothed.data[i]) / denom;
    lambda.data[i] = std::clamp(v, 0.0, 1.0);
  }
  return lambda;
}

double soft_threshold_weight(double x, double a1, double a2) {
  if (x < a1) return 0.0;
  if (x > a2) return 1.0;
  return (x - a1) / (a2 - a1);
}

namespace {

// Re-subtract until cartoon + texture reproduces f to the last bit; on
// image-like data one pass suffices.
Decomposition stabilize_split(const Image& f, Image u) {
  Image v(f.width, f.height);
  for (int pass = 0; pass < 4; ++pass) {
    bool exact = true;
    for (size_t i = 0; i < f.size(); ++i) {
      v.data[i] = f.data[i] - u.data[i];
      if (u.data[i] + v.data[i] != f.data[i]) {
        exact = false;
        u.data[i] = f.data[i] - v.data[i];
      }
    }
    if (exact) break;
  }
  return {std::move(u), std::move(v)};
}

}  // namespace

Decomposition decompose(const Image& f, const DecompositionParams& params) {
  params.validate();
  Image lambda = ltv_reduction(f, params);
  Image smoothed = lowpass_meyer(f, params.sigma);
  Image u(f.width, f.height);
  for (size_t i = 0; i < f.size(); ++i) {
    double w = soft_threshold_weight(lambda.data[i], params.a1, params.a2);
    u.data[i] = w * smoothed.data[i] + (1.0 - w) * f.data[i];
  }
  return stabilize_split(f, std::move(u));
}

Decomposition decompose_linear(const Image& f, double sigma) {
  return stabilize_split(f, lowpass_meyer(f, sigma));
}

}  // namespace microseg
