#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numbers>

#include "microseg/clustering.hpp"
#include "microseg/texture_features.hpp"
#include "oracles.hpp"

using namespace microseg;

namespace {

constexpr double kPi = std::numbers::pi;

Image random_image(int w, int h, uint64_t seed) {
  Rng rng(seed);
  Image img(w, h);
  for (auto& v : img.data) v = 10.0 * rng.uniform_real() - 5.0;
  return img;
}

CoefficientSet two_band_coeffs(int n, uint64_t seed) {
  CoefficientSet coeffs;
  coeffs.approx = Image(n, n, 0.0);
  coeffs.details.push_back(random_image(n, n, seed));
  coeffs.details.push_back(random_image(n, n, seed + 1));
  coeffs.detail_id = {{1, 1}, {1, 2}};
  return coeffs;
}

SpectrumPartition two_band_partition() {
  SpectrumPartition part;
  part.thetas = {0.0};
  part.scales = {{kPi / 4.0, 1.0}};
  return part;
}

}  // namespace

TEST_CASE("window radius follows ceil(pi/omega)") {
  CHECK(window_radius(kPi) == 1);
  CHECK(window_radius(kPi / 4.0) == 4);
  CHECK(window_radius(1.0) == 4);
  CHECK_THROWS_AS(window_radius(0.0), std::invalid_argument);
  CHECK_THROWS_AS(window_radius(-1.0), std::invalid_argument);
}

TEST_CASE("local energy of a constant field") {
  for (int r : {1, 2, 5}) {
    Image sub(16, 16, 7.0);
    Image energy = local_energy(sub, r);
    double expected = 7.0 / (2.0 * r + 1.0);
    for (double v : energy.data) CHECK(v == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("local energy of zero is zero") {
  Image sub(8, 8, 0.0);
  for (double v : local_energy(sub, 2).data) CHECK(v == 0.0);
}

TEST_CASE("local energy of a single impulse covers a 3x3 patch at r=1") {
  Image sub(12, 12, 0.0);
  sub.at(6, 6) = 1.0;
  Image energy = local_energy(sub, 1);
  for (int y = 0; y < 12; ++y)
    for (int x = 0; x < 12; ++x) {
      bool covered = std::abs(x - 6) <= 1 && std::abs(y - 6) <= 1;
      CHECK(energy.at(x, y) == doctest::Approx(covered ? 1.0 / 9.0 : 0.0));
    }
}

TEST_CASE("local energy matches the direct summation oracle") {
  Image sub = random_image(10, 10, 3);
  for (int r : {1, 3, 7}) {
    Image energy = local_energy(sub, r);
    for (int y = 0; y < 10; ++y)
      for (int x = 0; x < 10; ++x)
        CHECK(energy.at(x, y) ==
              doctest::Approx(oracles::local_energy_naive(sub, x, y, r)).epsilon(1e-10));
  }
}

TEST_CASE("feature matrix layout and radii") {
  CoefficientSet coeffs = two_band_coeffs(8, 10);
  SpectrumPartition part = two_band_partition();
  FeatureMatrix fm = feature_matrix(coeffs, part);
  CHECK(fm.cols == 2);
  CHECK(fm.rows() == 64);
  CHECK(fm.width == 8);
  CHECK(fm.height == 8);
  REQUIRE(fm.radii.size() == 2);
  CHECK(fm.radii[0] == 4);  // ceil(pi / (pi/4))
  CHECK(fm.radii[1] == 4);  // ceil(pi / 1.0)
  CHECK(fm.col_id[0] == std::make_pair<size_t, size_t>(1, 1));

  // columns are the flattened per-subband energies
  Image e0 = local_energy(coeffs.details[0], 4);
  for (size_t row = 0; row < fm.rows(); ++row)
    CHECK(fm.at(row, 0) == doctest::Approx(e0.data[row]).epsilon(1e-12));
}

TEST_CASE("all entries are non-negative and finite") {
  CoefficientSet coeffs = two_band_coeffs(12, 20);
  FeatureMatrix fm = feature_matrix(coeffs, two_band_partition());
  for (double v : fm.data) {
    CHECK(v >= 0.0);
    CHECK(std::isfinite(v));
  }
}

TEST_CASE("zero details give a zero matrix") {
  CoefficientSet coeffs;
  coeffs.approx = Image(6, 6, 3.0);
  coeffs.details.emplace_back(6, 6, 0.0);
  coeffs.details.emplace_back(6, 6, 0.0);
  coeffs.detail_id = {{1, 1}, {1, 2}};
  FeatureMatrix fm = feature_matrix(coeffs, two_band_partition());
  for (double v : fm.data) CHECK(v == 0.0);
}

TEST_CASE("scaling a subband scales its column exactly") {
  CoefficientSet coeffs = two_band_coeffs(8, 30);
  SpectrumPartition part = two_band_partition();
  FeatureMatrix base = feature_matrix(coeffs, part);
  for (auto& v : coeffs.details[1].data) v *= 3.0;
  FeatureMatrix scaled = feature_matrix(coeffs, part);
  for (size_t row = 0; row < base.rows(); ++row) {
    CHECK(scaled.at(row, 0) == base.at(row, 0));
    CHECK(scaled.at(row, 1) == doctest::Approx(3.0 * base.at(row, 1)).epsilon(1e-12));
  }
}

TEST_CASE("permuting subbands permutes columns") {
  CoefficientSet coeffs = two_band_coeffs(8, 40);
  SpectrumPartition part = two_band_partition();
  FeatureMatrix base = feature_matrix(coeffs, part);
  CoefficientSet swapped = coeffs;
  std::swap(swapped.details[0], swapped.details[1]);
  std::swap(swapped.detail_id[0], swapped.detail_id[1]);
  // swapping ids changes the radius lookup; with equal radii the columns swap
  FeatureMatrix perm = feature_matrix(swapped, part);
  for (size_t row = 0; row < base.rows(); ++row) {
    CHECK(perm.at(row, 0) == base.at(row, 1));
    CHECK(perm.at(row, 1) == base.at(row, 0));
  }
}

TEST_CASE("energy is translation-covariant away from borders") {
  Image sub(24, 24, 0.0);
  Rng rng(50);
  for (int y = 8; y < 16; ++y)
    for (int x = 8; x < 16; ++x) sub.at(x, y) = rng.uniform_real();
  const int dx = 3, dy = 2, r = 2;
  Image shifted(24, 24, 0.0);
  for (int y = 0; y < 24; ++y)
    for (int x = 0; x < 24; ++x) {
      int sx = x - dx, sy = y - dy;
      if (sx >= 0 && sx < 24 && sy >= 0 && sy < 24) shifted.at(x, y) = sub.at(sx, sy);
    }
  Image e0 = local_energy(sub, r);
  Image e1 = local_energy(shifted, r);
  for (int y = r + dy; y < 24 - r; ++y)
    for (int x = r + dx; x < 24 - r; ++x)
      CHECK(e1.at(x, y) == doctest::Approx(e0.at(x - dx, y - dy)).epsilon(1e-12));
}

TEST_CASE("radius larger than the image still works via mirroring") {
  Image sub = random_image(6, 6, 60);
  Image energy = local_energy(sub, 10);  // window 21x21 over a 6x6 grid
  for (double v : energy.data) {
    CHECK(v >= 0.0);
    CHECK(std::isfinite(v));
  }
  CHECK(energy.at(3, 3) ==
        doctest::Approx(oracles::local_energy_naive(sub, 3, 3, 10)).epsilon(1e-10));
}

TEST_CASE("feature matrix export/import round trip") {
  CoefficientSet coeffs = two_band_coeffs(8, 70);
  FeatureMatrix fm = feature_matrix(coeffs, two_band_partition());
  auto stem = (std::filesystem::temp_directory_path() / "microseg_fm_test").string();
  export_feature_matrix(stem, fm);
  FeatureMatrix back = import_feature_matrix(stem);
  CHECK(back.data == fm.data);
  CHECK(back.col_id == fm.col_id);
  CHECK(back.radii == fm.radii);
  std::filesystem::remove(stem + ".f64");
  std::filesystem::remove(stem + ".json");
}

TEST_CASE("local energy rejects radius < 1") {
  CHECK_THROWS_AS(local_energy(Image(4, 4, 1.0), 0), std::invalid_argument);
}
