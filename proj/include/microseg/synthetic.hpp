#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "microseg/image.hpp"

namespace microseg {

/// Ground-truthed test scene.
struct SyntheticScene {
  Image image;
  LabelMap cartoon_truth;
  LabelMap texture_truth;
};

struct SynthParams {
  int width = 128;
  int height = 128;
  // TL, TR, BL, BR; the default order keeps both phase fields half-plane
  // shaped so the four-phase MBO has no junction-corner rounding to do
  std::vector<double> quadrant_values = {10.0, 80.0, 240.0, 160.0};
  double ramp_amplitude = 40.0;          // gray levels across the diagonal
  std::vector<double> stripe_angles_deg = {0.0, 60.0};
  std::vector<double> stripe_periods = {6.0, 10.0};
  double stripe_amplitude = 60.0;
  double stripe_base = 128.0;
  double noise_std = 0.0;
};

enum class SceneKind { FourQuadrant, RampBias, Stripes, Composite };

SceneKind scene_kind_from_string(const std::string& name);
std::string to_string(SceneKind kind);

/// Deterministic scenes; all pixel values are quantized to 1/1024 steps so
/// downstream exact-additivity identities hold bit-for-bit.
SyntheticScene synth_generate(SceneKind kind, const SynthParams& params, uint64_t seed);

}  // namespace microseg
