#include "microseg/pipeline.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "microseg/empirical_curvelet.hpp"
#include "microseg/image_io.hpp"
#include "microseg/texture_features.hpp"

namespace microseg {

using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";

struct CartoonPreset {
  double lambda, mu_factor, beta, dt_cv, dt_cvloc;
};
struct TexturePreset {
  double percentile;
  size_t k;
  double dt;
};

const std::map<std::string, CartoonPreset>& cartoon_presets() {
  static const std::map<std::string, CartoonPreset> presets = {
      {"fig8a", {10.0, 1e-3, 10.0, 0.75, 3.2}},  {"fig8b", {10.0, 1e-3, 300.0, 4.0, 4.0}},
      {"fig8c", {10.0, 1e-3, 60.0, 2.0, 2.0}},   {"fig8d", {10.0, 1e-3, 10.0, 2.5, 2.0}},
      {"fig9a", {5.0, 1e-1, 70.0, 0.35, 0.10}},  {"fig9b", {10.0, 1e-2, 30.0, 0.1, 6.5}},
      {"fig9c", {7.0, 1e-4, 65.0, 5.0, 18.0}},   {"fig9d", {5.0, 1e-4, 50.0, 12.0, 0.6}},
  };
  return presets;
}

const std::map<std::string, TexturePreset>& texture_presets() {
  static const std::map<std::string, TexturePreset> presets = {
      {"fig10a", {0.92, 5, 0.03}},  {"fig10b", {0.995, 2, 0.10}}, {"fig10c", {0.988, 2, 0.05}},
      {"fig10d", {0.85, 3, 0.05}},  {"fig11a", {0.9515, 5, 0.10}}, {"fig11b", {0.45, 4, 0.10}},
      {"fig11c", {0.85, 2, 0.05}},  {"fig11d", {0.725, 4, 0.05}},
  };
  return presets;
}

}  // namespace

void apply_preset(PipelineConfig& cfg, const std::string& name) {
  if (auto it = cartoon_presets().find(name); it != cartoon_presets().end()) {
    const auto& p = it->second;
    cfg.cartoon.lambda = p.lambda;
    cfg.cartoon.mu = p.mu_factor * 255.0 * 255.0;
    cfg.cartoon.beta = p.beta;
    cfg.cartoon.dt = p.dt_cvloc;
    return;
  }
  if (auto it = texture_presets().find(name); it != texture_presets().end()) {
    const auto& p = it->second;
    cfg.detection.percentile = p.percentile;
    cfg.clusters = p.k;
    cfg.mbo.dt = p.dt;
    return;
  }
  throw std::invalid_argument("unknown preset: " + name);
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  for (const auto& [k, v] : cartoon_presets()) names.push_back(k);
  for (const auto& [k, v] : texture_presets()) names.push_back(k);
  return names;
}

namespace {

json params_to_json(const PipelineConfig& cfg) {
  json j;
  j["decomposition"] = {{"sigma", cfg.decomposition.sigma},
                        {"a1", cfg.decomposition.a1},
                        {"a2", cfg.decomposition.a2},
                        {"ltv_floor", cfg.decomposition.ltv_floor},
                        {"linear", cfg.linear_decomposition}};
  j["cartoon"] = {{"lambda", cfg.cartoon.lambda},   {"mu", cfg.cartoon.mu},
                  {"beta", cfg.cartoon.beta},       {"dt", cfg.cartoon.dt},
                  {"kernel_std", cfg.cartoon.kernel_std}, {"max_iter", cfg.cartoon.max_iter},
                  {"epsilon", cfg.cartoon.epsilon}};
  j["detection"] = {{"percentile", cfg.detection.percentile},
                    {"eta", cfg.detection.eta},
                    {"scale_space_step", cfg.detection.scale_space_step},
                    {"max_scale_space_levels", cfg.detection.max_scale_space_levels}};
  j["clustering"] = {{"clusters", cfg.clusters},
                     {"method", cfg.method == ClusterMethod::KMeans ? "kmeans" : "mbo"},
                     {"kmeans",
                      {{"replications", cfg.kmeans.replications},
                       {"max_iter", cfg.kmeans.max_iter}}},
                     {"mbo",
                      {{"mu_fidelity", cfg.mbo.mu_fidelity},
                       {"tolerance", cfg.mbo.tolerance},
                       {"dt", cfg.mbo.dt},
                       {"threshold_interval", cfg.mbo.threshold_interval},
                       {"n_samples", cfg.mbo.n_samples},
                       {"n_eigs", cfg.mbo.n_eigs},
                       {"seed_fraction", cfg.mbo.seed_fraction},
                       {"max_iter", cfg.mbo.max_iter}}}};
  j["seed"] = cfg.seed;
  j["dump_subbands"] = cfg.dump_subbands;
  j["colorized_labels"] = cfg.colorized_labels;
  return j;
}

}  // namespace

std::string config_to_json(const PipelineConfig& cfg) { return params_to_json(cfg).dump(2); }

PipelineConfig config_from_json(const std::string& text) {
  json j = json::parse(text);
  PipelineConfig cfg;
  if (j.contains("decomposition")) {
    const auto& d = j["decomposition"];
    cfg.decomposition.sigma = d.value("sigma", cfg.decomposition.sigma);
    cfg.decomposition.a1 = d.value("a1", cfg.decomposition.a1);
    cfg.decomposition.a2 = d.value("a2", cfg.decomposition.a2);
    cfg.decomposition.ltv_floor = d.value("ltv_floor", cfg.decomposition.ltv_floor);
    cfg.linear_decomposition = d.value("linear", cfg.linear_decomposition);
  }
  if (j.contains("cartoon")) {
    const auto& c = j["cartoon"];
    cfg.cartoon.lambda = c.value("lambda", cfg.cartoon.lambda);
    cfg.cartoon.mu = c.value("mu", cfg.cartoon.mu);
    cfg.cartoon.beta = c.value("beta", cfg.cartoon.beta);
    cfg.cartoon.dt = c.value("dt", cfg.cartoon.dt);
    cfg.cartoon.kernel_std = c.value("kernel_std", cfg.cartoon.kernel_std);
    cfg.cartoon.max_iter = c.value("max_iter", cfg.cartoon.max_iter);
    cfg.cartoon.epsilon = c.value("epsilon", cfg.cartoon.epsilon);
  }
  if (j.contains("detection")) {
    const auto& d = j["detection"];
    cfg.detection.percentile = d.value("percentile", cfg.detection.percentile);
    cfg.detection.eta = d.value("eta", cfg.detection.eta);
    cfg.detection.scale_space_step = d.value("scale_space_step", cfg.detection.scale_space_step);
    cfg.detection.max_scale_space_levels =
        d.value("max_scale_space_levels", cfg.detection.max_scale_space_levels);
  }
  if (j.contains("clustering")) {
    const auto& c = j["clustering"];
    cfg.clusters = c.value("clusters", cfg.clusters);
    std::string method = c.value("method", std::string("mbo"));
    cfg.method = method == "kmeans" ? ClusterMethod::KMeans : ClusterMethod::MBO;
    if (c.contains("kmeans")) {
      cfg.kmeans.replications = c["kmeans"].value("replications", cfg.kmeans.replications);
      cfg.kmeans.max_iter = c["kmeans"].value("max_iter", cfg.kmeans.max_iter);
    }
    if (c.contains("mbo")) {
      const auto& m = c["mbo"];
      cfg.mbo.mu_fidelity = m.value("mu_fidelity", cfg.mbo.mu_fidelity);
      cfg.mbo.tolerance = m.value("tolerance", cfg.mbo.tolerance);
      cfg.mbo.dt = m.value("dt", cfg.mbo.dt);
      cfg.mbo.threshold_interval = m.value("threshold_interval", cfg.mbo.threshold_interval);
      cfg.mbo.n_samples = m.value("n_samples", cfg.mbo.n_samples);
      cfg.mbo.n_eigs = m.value("n_eigs", cfg.mbo.n_eigs);
      cfg.mbo.seed_fraction = m.value("seed_fraction", cfg.mbo.seed_fraction);
      cfg.mbo.max_iter = m.value("max_iter", cfg.mbo.max_iter);
    }
  }
  cfg.seed = j.value("seed", cfg.seed);
  cfg.dump_subbands = j.value("dump_subbands", cfg.dump_subbands);
  cfg.colorized_labels = j.value("colorized_labels", cfg.colorized_labels);
  return cfg;
}

void dump_subbands(const std::string& dir, const CoefficientSet& coeffs,
                   const CurveletFilterBank& bank) {
  std::filesystem::create_directories(dir);
  auto write_raw = [&](const std::string& name, const Image& img) {
    std::ofstream out(dir + "/" + name, std::ios::binary);
    out.write(reinterpret_cast<const char*>(img.data.data()),
              static_cast<std::streamsize>(img.data.size() * sizeof(double)));
  };
  json manifest;
  manifest["width"] = coeffs.approx.width;
  manifest["height"] = coeffs.approx.height;
  manifest["dtype"] = "float64-le";
  manifest["gamma"] = bank.transition.gamma;
  manifest["delta_theta"] = bank.transition.delta_theta;
  manifest["partition"] = {{"thetas", bank.partition.thetas}, {"scales", bank.partition.scales}};
  write_raw("approx.f64", coeffs.approx);
  manifest["subbands"] = json::array();
  manifest["subbands"].push_back({{"m", 0}, {"n", 0}, {"file", "approx.f64"}});
  for (size_t i = 0; i < coeffs.details.size(); ++i) {
    auto [m, n] = coeffs.detail_id[i];
    std::string name = "detail_m" + std::to_string(m) + "_n" + std::to_string(n) + ".f64";
    write_raw(name, coeffs.details[i]);
    manifest["subbands"].push_back({{"m", m}, {"n", n}, {"file", name}});
  }
  std::ofstream mf(dir + "/manifest.json");
  mf << manifest.dump(2) << "\n";
}

PipelineResult run_pipeline(const Image& input, const PipelineConfig& cfg,
                            const std::string& input_name) {
  using clock = std::chrono::steady_clock;
  auto ms_since = [](clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(clock::now() - t0).count();
  };

  PipelineResult result;
  json report;
  report["version"] = kVersion;
  report["input"] = input_name;
  report["width"] = input.width;
  report["height"] = input.height;
  report["parameters"] = params_to_json(cfg);
  report["status"] = "ok";

  auto write_report = [&]() {
    result.report_json = report.dump(2);
    if (!cfg.output_stem.empty()) {
      std::ofstream out(cfg.output_stem + ".report.json");
      out << result.report_json << "\n";
    }
  };

  std::string stage = "decompose";
  try {
    auto t0 = clock::now();
    result.decomposition = cfg.linear_decomposition
                               ? decompose_linear(input, cfg.decomposition.sigma)
                               : decompose(input, cfg.decomposition);
    report["stages"]["decompose"]["ms"] = ms_since(t0);

    stage = "cartoon";
    t0 = clock::now();
    result.cartoon = segment(result.decomposition.cartoon, cfg.cartoon);
    report["stages"]["cartoon"]["ms"] = ms_since(t0);
    report["stages"]["cartoon"]["iterations"] = result.cartoon.iterations;
    report["stages"]["cartoon"]["converged"] = result.cartoon.converged;
    report["stages"]["cartoon"]["c"] = result.cartoon.stats.c;
    report["stages"]["cartoon"]["d"] = result.cartoon.stats.d;

    stage = "texture";
    t0 = clock::now();
    ModifiedEctResult ect = modified_ect(result.decomposition.texture, cfg.detection);
    result.partition = ect.partition;
    result.tau = ect.tau;
    FeatureMatrix features = feature_matrix(ect.coeffs, ect.partition);
    report["stages"]["texture"]["ect_ms"] = ms_since(t0);
    report["stages"]["texture"]["tau"] = ect.tau;
    report["stages"]["texture"]["n_sectors"] = ect.partition.n_sectors();
    report["stages"]["texture"]["n_subbands"] = features.cols;

    t0 = clock::now();
    KMeansParams km = cfg.kmeans;
    km.k = cfg.clusters;
    km.seed = cfg.seed;
    result.kmeans_stage = kmeans(features, km);
    report["stages"]["texture"]["kmeans_ms"] = ms_since(t0);
    report["stages"]["texture"]["kmeans_objective"] = result.kmeans_stage.objective;
    report["stages"]["texture"]["kmeans_iterations"] = result.kmeans_stage.iterations;

    if (cfg.method == ClusterMethod::MBO) {
      t0 = clock::now();
      MBOClusterParams mp = cfg.mbo;
      mp.seed = cfg.seed + 1;
      result.texture = multiclass_mbo(features, result.kmeans_stage.labels, mp);
      report["stages"]["texture"]["mbo_ms"] = ms_since(t0);
      report["stages"]["texture"]["mbo_iterations"] = result.texture.iterations;
    } else {
      result.texture = result.kmeans_stage;
    }

    if (cfg.dump_subbands && !cfg.output_stem.empty())
      dump_subbands(cfg.output_stem + ".subbands", ect.coeffs, ect.bank);
  } catch (const std::exception& e) {
    report["status"] = "failed";
    report["failed_stage"] = stage;
    report["error"] = e.what();
    write_report();
    throw;
  }

  if (!cfg.output_stem.empty()) {
    save_label_map(cfg.output_stem + ".cartoon.png", result.cartoon.labels, PaletteMode::Raw);
    save_label_map(cfg.output_stem + ".texture.png", result.texture.labels, PaletteMode::Raw);
    if (cfg.colorized_labels) {
      save_label_map(cfg.output_stem + ".cartoon.color.png", result.cartoon.labels,
                     PaletteMode::Colorized);
      save_label_map(cfg.output_stem + ".texture.color.png", result.texture.labels,
                     PaletteMode::Colorized);
    }
    std::ofstream pj(cfg.output_stem + ".partition.json");
    pj << partition_to_json(result.partition, result.tau, cfg.detection.eta) << "\n";
  }
  write_report();
  return result;
}

}  // namespace microseg
