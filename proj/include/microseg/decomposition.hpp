#pragma once

#include "microseg/image.hpp"

namespace microseg {

struct DecompositionParams {
  double sigma = 3.0;      // low-pass scale in pixels
  double a1 = 0.25;        // soft-threshold lower knot
  double a2 = 0.50;        // soft-threshold upper knot
  double ltv_floor = 1e-8; // division guard for the reduction rate

  void validate() const;
};

/// Cartoon + texture pair with texture == original - cartoon per pixel.
struct Decomposition {
  Image cartoon;
  Image texture;
};

/// Low-pass with Fourier gain 1/(1+(2*pi*sigma*|xi|)^4). The image is
/// mirror-extended to 2N x 2M before the periodic filter and cropped back,
/// so non-periodic content does not wrap around.
Image lowpass_meyer(const Image& f, double sigma);

/// Relative reduction rate of the local total variation under the low-pass,
/// clamped to [0,1]; zero wherever the LTV itself is below the floor.
Image ltv_reduction(const Image& f, const DecompositionParams& params);

/// 0 below a1, 1 above a2, linear in between.
double soft_threshold_weight(double x, double a1, double a2);

Decomposition decompose(const Image& f, const DecompositionParams& params);

/// Plain low-pass/high-pass split (the degenerate w == 1 mode).
Decomposition decompose_linear(const Image& f, double sigma);

}  // namespace microseg
