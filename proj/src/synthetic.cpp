#include "microseg/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "microseg/clustering.hpp"

namespace microseg {

SceneKind scene_kind_from_string(const std::string& name) {
  if (name == "four-quadrant") return SceneKind::FourQuadrant;
  if (name == "ramp-bias") return SceneKind::RampBias;
  if (name == "stripes") return SceneKind::Stripes;
  if (name == "composite") return SceneKind::Composite;
  throw std::invalid_argument("unknown scene kind: " + name);
}

std::string to_string(SceneKind kind) {
  switch (kind) {
    case SceneKind::FourQuadrant: return "four-quadrant";
    case SceneKind::RampBias: return "ramp-bias";
    case SceneKind::Stripes: return "stripes";
    case SceneKind::Composite: return "composite";
  }
  return "?";
}

namespace {

double quantize(double v) { return std::round(v * 1024.0) / 1024.0; }

void add_quadrants(SyntheticScene& scene, const SynthParams& p) {
  int hx = p.width / 2, hy = p.height / 2;
  if (p.quadrant_values.size() != 4)
    throw std::invalid_argument("synth_generate: need exactly 4 quadrant values");
  for (int y = 0; y < p.height; ++y)
    for (int x = 0; x < p.width; ++x) {
      int q = (x >= hx ? 1 : 0) + (y >= hy ? 2 : 0);
      scene.image.at(x, y) += p.quadrant_values[q];
      scene.cartoon_truth.at(x, y) = q;
    }
}

// vertical gradient: runs across both quadrant rows, so the bias shifts
// every region's statistics instead of cancelling inside them
void add_ramp(SyntheticScene& scene, const SynthParams& p) {
  for (int y = 0; y < p.height; ++y)
    for (int x = 0; x < p.width; ++x)
      scene.image.at(x, y) += p.ramp_amplitude * y / (p.height - 1);
}

void add_stripes(SyntheticScene& scene, const SynthParams& p) {
  size_t n_fields = p.stripe_angles_deg.size();
  if (n_fields == 0 || p.stripe_periods.size() != n_fields)
    throw std::invalid_argument("synth_generate: angles/periods mismatch");
  for (int y = 0; y < p.height; ++y)
    for (int x = 0; x < p.width; ++x) {
      // vertical bands, one texture field per band
      size_t band = std::min(n_fields - 1, static_cast<size_t>(x) * n_fields / p.width);
      double angle = p.stripe_angles_deg[band] * std::numbers::pi / 180.0;
      double phase = (std::cos(angle) * x + std::sin(angle) * y) / p.stripe_periods[band];
      scene.image.at(x, y) += p.stripe_amplitude * std::sin(2.0 * std::numbers::pi * phase);
      scene.texture_truth.at(x, y) = static_cast<int>(band);
    }
}

}  // namespace

SyntheticScene synth_generate(SceneKind kind, const SynthParams& p, uint64_t seed) {
  if (p.width < 2 || p.height < 2) throw std::invalid_argument("synth_generate: scene too small");
  SyntheticScene scene;
  scene.image = Image(p.width, p.height, 0.0);
  scene.cartoon_truth = LabelMap(p.width, p.height, 0);
  scene.texture_truth = LabelMap(p.width, p.height, 0);

  switch (kind) {
    case SceneKind::FourQuadrant:
      add_quadrants(scene, p);
      break;
    case SceneKind::RampBias:
      add_quadrants(scene, p);
      add_ramp(scene, p);
      break;
    case SceneKind::Stripes:
      for (auto& v : scene.image.data) v = p.stripe_base;
      add_stripes(scene, p);
      break;
    case SceneKind::Composite:
      add_quadrants(scene, p);
      add_stripes(scene, p);
      break;
  }

  if (p.noise_std > 0.0) {
    Rng rng(seed);
    for (auto& v : scene.image.data) v += p.noise_std * rng.normal();
  }
  for (auto& v : scene.image.data) v = quantize(v);
  return scene;
}

}  // namespace microseg
