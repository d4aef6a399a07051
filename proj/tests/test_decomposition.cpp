#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "microseg/clustering.hpp"
#include "microseg/decomposition.hpp"
#include "microseg/imageops.hpp"

using namespace microseg;

namespace {

// ramp 0..200 along x plus a period-2 checkerboard of amplitude +-30
struct RampCheckerboard {
  Image combined;
  Image ramp;
  Image checkerboard;
};

RampCheckerboard ramp_checkerboard(int w, int h) {
  RampCheckerboard rc{Image(w, h), Image(w, h), Image(w, h)};
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double r = 200.0 * x / (w - 1);
      double c = ((x + y) % 2 == 0) ? 30.0 : -30.0;
      r = std::round(r * 1024.0) / 1024.0;
      rc.ramp.at(x, y) = r;
      rc.checkerboard.at(x, y) = c;
      rc.combined.at(x, y) = r + c;
    }
  return rc;
}

Image random_byte_image(int w, int h, uint64_t seed) {
  Rng rng(seed);
  Image img(w, h);
  for (auto& v : img.data) v = static_cast<double>(rng.uniform_index(256));
  return img;
}

}  // namespace

TEST_CASE("lowpass has unit DC gain") {
  Image img(20, 14, 9.75);
  CHECK(max_abs_diff(lowpass_meyer(img, 3.0), img) <= 1e-10);
}

TEST_CASE("lowpass halves a sinusoid at the knee frequency") {
  // DCT-aligned cosine so the mirror extension reproduces it exactly
  const int n = 64;
  const int k = 8;
  const double xi = static_cast<double>(k) / (2 * n);  // cycles/sample on the extended grid
  const double sigma = 1.0 / (2.0 * std::numbers::pi * xi);
  Image img(n, n);
  for (int y = 0; y < n; ++y)
    for (int x = 0; x < n; ++x)
      img.at(x, y) = std::cos(2.0 * std::numbers::pi * xi * (x + 0.5));
  Image out = lowpass_meyer(img, sigma);
  for (size_t i = 0; i < img.size(); ++i)
    CHECK(out.data[i] == doctest::Approx(0.5 * img.data[i]).epsilon(1e-9));
}

TEST_CASE("lowpass never amplifies energy") {
  Image img = random_byte_image(32, 32, 7);
  double mean = image_mean(img);
  for (auto& v : img.data) v -= mean;  // drop DC so the comparison is strict
  Image out = lowpass_meyer(img, 2.0);
  CHECK(l2_norm(out) <= l2_norm(img) + 1e-9);
}

TEST_CASE("ltv reduction is zero on constants") {
  DecompositionParams params;
  Image img(24, 24, 42.0);
  for (double v : ltv_reduction(img, params).data) CHECK(v == 0.0);
}

TEST_CASE("ltv reduction is high on a fine checkerboard, low on a ramp") {
  DecompositionParams params;  // sigma = 3
  auto rc = ramp_checkerboard(48, 48);

  Image checker(48, 48);
  for (int y = 0; y < 48; ++y)
    for (int x = 0; x < 48; ++x) checker.at(x, y) = ((x + y) % 2 == 0) ? 30.0 : -30.0;
  Image lam_checker = ltv_reduction(checker, params);
  for (int y = 8; y < 40; ++y)
    for (int x = 8; x < 40; ++x) CHECK(lam_checker.at(x, y) >= 0.9);

  Image lam_ramp = ltv_reduction(rc.ramp, params);
  for (int y = 8; y < 40; ++y)
    for (int x = 8; x < 40; ++x) CHECK(lam_ramp.at(x, y) <= 0.1);
}

TEST_CASE("lambda stays in [0,1]") {
  DecompositionParams params;
  Image img = random_byte_image(32, 32, 13);
  for (double v : ltv_reduction(img, params).data) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("soft threshold branches") {
  CHECK(soft_threshold_weight(0.1, 0.25, 0.5) == 0.0);
  CHECK(soft_threshold_weight(0.375, 0.25, 0.5) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(soft_threshold_weight(0.6, 0.25, 0.5) == 1.0);
}

TEST_CASE("decompose keeps constants entirely in the cartoon") {
  DecompositionParams params;
  Image img(32, 32, 77.0);
  Decomposition dec = decompose(img, params);
  CHECK(max_abs_diff(dec.cartoon, img) == 0.0);
  for (double v : dec.texture.data) CHECK(v == 0.0);
}

TEST_CASE("decompose separates ramp from checkerboard") {
  DecompositionParams params;  // sigma = 3 default
  auto rc = ramp_checkerboard(64, 64);
  Decomposition dec = decompose(rc.combined, params);

  // texture captures >= 90% of the checkerboard energy
  double resid = 0.0, checker_energy = 0.0;
  for (size_t i = 0; i < rc.combined.size(); ++i) {
    double d = dec.texture.data[i] - rc.checkerboard.data[i];
    resid += d * d;
    checker_energy += rc.checkerboard.data[i] * rc.checkerboard.data[i];
  }
  CHECK(resid <= 0.1 * checker_energy);

  // cartoon retains the ramp within 10% relative L2
  double ramp_err = 0.0, ramp_energy = 0.0;
  for (size_t i = 0; i < rc.combined.size(); ++i) {
    double d = dec.cartoon.data[i] - rc.ramp.data[i];
    ramp_err += d * d;
    ramp_energy += rc.ramp.data[i] * rc.ramp.data[i];
  }
  CHECK(std::sqrt(ramp_err) <= 0.1 * std::sqrt(ramp_energy));
}

TEST_CASE("decompose additivity is exact per pixel") {
  DecompositionParams params;
  for (uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    Image img = random_byte_image(40, 40, seed);
    Decomposition dec = decompose(img, params);
    for (size_t i = 0; i < img.size(); ++i)
      CHECK(dec.cartoon.data[i] + dec.texture.data[i] == img.data[i]);
  }
  auto rc = ramp_checkerboard(64, 64);
  Decomposition dec = decompose(rc.combined, params);
  for (size_t i = 0; i < rc.combined.size(); ++i)
    CHECK(dec.cartoon.data[i] + dec.texture.data[i] == rc.combined.data[i]);
}

TEST_CASE("linear decomposition of a constant has no texture") {
  Image img(16, 16, 5.0);
  Decomposition dec = decompose_linear(img, 3.0);
  for (double v : dec.texture.data) CHECK(std::abs(v) <= 1e-10);
  for (size_t i = 0; i < img.size(); ++i)
    CHECK(dec.cartoon.data[i] + dec.texture.data[i] == img.data[i]);
}

TEST_CASE("nonlinear cartoon keeps a step edge sharper than the linear one") {
  Image step(64, 64);
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x) step.at(x, y) = x < 32 ? 50.0 : 200.0;
  Decomposition nonlinear = decompose(step, DecompositionParams{});
  Decomposition linear = decompose_linear(step, 3.0);
  auto max_edge_gradient = [](const Image& img) {
    Image g = gradient_magnitude(img);
    double m = 0.0;
    for (int y = 8; y < 56; ++y)
      for (int x = 24; x < 40; ++x) m = std::max(m, g.at(x, y));
    return m;
  };
  CHECK(max_edge_gradient(nonlinear.cartoon) > max_edge_gradient(linear.cartoon));
}

TEST_CASE("decomposing the cartoon again leaves little texture") {
  DecompositionParams params;
  auto rc = ramp_checkerboard(64, 64);
  Decomposition first = decompose(rc.combined, params);
  Decomposition second = decompose(first.cartoon, params);
  CHECK(l2_norm(second.texture) <= 0.2 * l2_norm(first.texture));
}

TEST_CASE("forcing w == 1 reproduces the linear split") {
  Image img = random_byte_image(32, 32, 99);
  Image lp = lowpass_meyer(img, 3.0);
  Image u(32, 32);
  for (size_t i = 0; i < img.size(); ++i) u.data[i] = 1.0 * lp.data[i] + 0.0 * img.data[i];
  CHECK(max_abs_diff(u, lp) == 0.0);
  Decomposition lin = decompose_linear(img, 3.0);
  CHECK(max_abs_diff(lin.cartoon, lp) <= 1e-12);
}

TEST_CASE("parameter validation") {
  DecompositionParams bad;
  bad.a1 = 0.5;
  bad.a2 = 0.25;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  CHECK_THROWS_AS(lowpass_meyer(Image(4, 4, 0.0), -1.0), std::invalid_argument);
}
