#include "microseg/texture_features.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "microseg/imageops.hpp"

namespace microseg {

int window_radius(double omega) {
  if (omega <= 0.0) throw std::invalid_argument("window_radius: omega must be positive");
  return std::max(1, static_cast<int>(std::ceil(std::numbers::pi / omega)));
}

Image local_energy(const Image& subband, int radius) {
  if (radius < 1) throw std::invalid_argument("local_energy: radius must be >= 1");
  int w = subband.width, h = subband.height;
  int ew = w + 2 * radius, eh = h + 2 * radius;

  // summed-area table of squares over the mirror-extended grid
  std::vector<double> sat(static_cast<size_t>(ew + 1) * (eh + 1), 0.0);
  auto sat_at = [&](int x, int y) -> double& { return sat[static_cast<size_t>(y) * (ew + 1) + x]; };
  for (int y = 0; y < eh; ++y) {
    double row_sum = 0.0;
    for (int x = 0; x < ew; ++x) {
      double v = subband.at(mirror_index(x - radius, w), mirror_index(y - radius, h));
      row_sum += v * v;
      sat_at(x + 1, y + 1) = sat_at(x + 1, y) + row_sum;
    }
  }

  double denom = static_cast<double>(2 * radius + 1) * (2 * radius + 1);
  Image out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      int x0 = x, y0 = y;  // extended coords of the window's top-left
      int x1 = x + 2 * radius + 1, y1 = y + 2 * radius + 1;
      double s = sat_at(x1, y1) - sat_at(x0, y1) - sat_at(x1, y0) + sat_at(x0, y0);
      out.at(x, y) = std::sqrt(std::max(0.0, s)) / denom;
    }
  }
  return out;
}

FeatureMatrix feature_matrix(const CoefficientSet& coeffs, const SpectrumPartition& part) {
  part.validate();
  if (coeffs.details.size() != coeffs.detail_id.size())
    throw std::invalid_argument("feature_matrix: malformed coefficient set");
  FeatureMatrix fm;
  if (coeffs.details.empty()) return fm;
  fm.width = coeffs.details[0].width;
  fm.height = coeffs.details[0].height;
  fm.cols = coeffs.details.size();
  fm.col_id = coeffs.detail_id;
  fm.data.assign(fm.rows() * fm.cols, 0.0);
  for (size_t col = 0; col < fm.cols; ++col) {
    auto [m, n] = coeffs.detail_id[col];
    double omega = part.scales.at(m - 1).at(n - 1);
    int r = window_radius(omega);
    fm.radii.push_back(r);
    Image energy = local_energy(coeffs.details[col], r);
    for (size_t row = 0; row < fm.rows(); ++row) fm.at(row, col) = energy.data[row];
  }
  return fm;
}

void export_feature_matrix(const std::string& stem, const FeatureMatrix& fm) {
  std::ofstream raw(stem + ".f64", std::ios::binary);
  if (!raw) throw std::runtime_error("export_feature_matrix: cannot write " + stem + ".f64");
  raw.write(reinterpret_cast<const char*>(fm.data.data()),
            static_cast<std::streamsize>(fm.data.size() * sizeof(double)));
  nlohmann::json j;
  j["rows"] = fm.rows();
  j["cols"] = fm.cols;
  j["width"] = fm.width;
  j["height"] = fm.height;
  j["dtype"] = "float64-le";
  j["columns"] = nlohmann::json::array();
  for (size_t c = 0; c < fm.cols; ++c)
    j["columns"].push_back(
        {{"m", fm.col_id[c].first}, {"n", fm.col_id[c].second}, {"radius", fm.radii[c]}});
  std::ofstream manifest(stem + ".json");
  manifest << j.dump(2) << "\n";
}

FeatureMatrix import_feature_matrix(const std::string& stem) {
  std::ifstream manifest(stem + ".json");
  if (!manifest) throw std::runtime_error("import_feature_matrix: cannot read " + stem + ".json");
  nlohmann::json j = nlohmann::json::parse(manifest);
  FeatureMatrix fm;
  fm.width = j.at("width").get<int>();
  fm.height = j.at("height").get<int>();
  fm.cols = j.at("cols").get<size_t>();
  for (const auto& col : j.at("columns")) {
    fm.col_id.emplace_back(col.at("m").get<size_t>(), col.at("n").get<size_t>());
    fm.radii.push_back(col.at("radius").get<int>());
  }
  fm.data.resize(fm.rows() * fm.cols);
  std::ifstream raw(stem + ".f64", std::ios::binary);
  if (!raw) throw std::runtime_error("import_feature_matrix: cannot read " + stem + ".f64");
  raw.read(reinterpret_cast<char*>(fm.data.data()),
           static_cast<std::streamsize>(fm.data.size() * sizeof(double)));
  if (raw.gcount() != static_cast<std::streamsize>(fm.data.size() * sizeof(double)))
    throw std::runtime_error("import_feature_matrix: truncated " + stem + ".f64");
  return fm;
}

}  // namespace microseg
