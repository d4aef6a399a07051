#pragma once

#include <array>

#include "microseg/image.hpp"

namespace microseg {

struct CartoonSegParams {
  double lambda = 10.0;               // fidelity weight
  double mu = 1e-3 * 255.0 * 255.0;   // perimeter weight
  double beta = 10.0;                 // local-term weight; 0 recovers plain multiphase CV
  double dt = 0.75;                   // artificial time step
  double kernel_std = 10.0;           // Gaussian std for the residual filter g_k
  int max_iter = 200;
  double epsilon = 1.0;               // interface width; diagnostic energy only

  void validate() const;
};

/// Pair of indicator grids encoding up to four phases; binary after every
/// full iteration.
struct PhaseFields {
  Image u1;
  Image u2;

  bool operator==(const PhaseFields& o) const {
    return u1.data == o.u1.data && u2.data == o.u2.data;
  }
};

/// Mean intensities c and mean residual intensities d of the four regions.
struct RegionStats {
  std::array<double, 4> c{};
  std::array<double, 4> d{};
};

struct SegmentResult {
  LabelMap labels;
  RegionStats stats;
  int iterations = 0;
  bool converged = false;
};

/// u1 from the period-6 checkerboard sign(sin(pi x1/3) sin(pi x2/3)),
/// u2 from the period-20 one; 0-based pixel coordinates.
PhaseFields checkerboard_init(int width, int height);

/// Masked average of w over m1*m2; falls back to the global mean of w when
/// the region is empty.
double region_average(const Image& w, const Image& m1, const Image& m2);

RegionStats update_stats(const Image& u0, const Image& residual, const PhaseFields& fields);

/// Pointwise (c1-w0)^2 other + (c2-w0)^2 (1-other) - (c3-w0)^2 other
/// - (c4-w0)^2 (1-other). Callers pass the swapped vector for the second
/// field's update.
Image coupling_field(const Image& w0, const std::array<double, 4>& c, const Image& other);

/// One sequential MBO sweep: explicit forcing step, implicit Fourier
/// diffusion with multiplier 1/(1+2 mu dt |xi|^2), threshold at 1/2; u1
/// first, then u2 against the already-updated u1 with swapped stats.
PhaseFields mbo_iteration(const Image& u0, const Image& residual, const PhaseFields& fields,
                          const RegionStats& stats, const CartoonSegParams& params);

/// Full MBO loop from the checkerboard init until both fields freeze or
/// max_iter. The dynamics run on the [0,1]-normalized image (the weights
/// are calibrated for that range; mu carries an explicit 255^2 factor);
/// reported stats are on the caller's intensity scale.
SegmentResult segment(const Image& u0, const CartoonSegParams& params);

/// Diagnostic energy: lambda * fidelity + mu * Ginzburg-Landau (forward
/// differences, W(u) = u^2 (1-u)^2) + beta * local term.
double energy(const Image& u0, const Image& residual, const PhaseFields& fields,
              const RegionStats& stats, const CartoonSegParams& params);

double fidelity_energy(const Image& u0, const std::array<double, 4>& c, const PhaseFields& fields);

/// g_k * u0 - u0 with the params' Gaussian kernel.
Image residual_image(const Image& u0, const CartoonSegParams& params);

std::array<double, 4> swap_middle(const std::array<double, 4>& c);

LabelMap combine_phases(const PhaseFields& fields);

}  // namespace microseg
