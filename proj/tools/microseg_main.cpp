#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "microseg/empirical_curvelet.hpp"
#include "microseg/image_io.hpp"
#include "microseg/pipeline.hpp"
#include "microseg/texture_features.hpp"

#include <nlohmann/json.hpp>

using namespace microseg;

namespace {

std::string default_stem(const std::string& input, const std::string& explicit_stem) {
  if (!explicit_stem.empty()) return explicit_stem;
  std::filesystem::path p(input);
  return (p.parent_path() / p.stem()).string();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_sidecar(const std::string& stem, const std::string& input, const LoadedImage& loaded) {
  nlohmann::json j;
  j["input"] = input;
  j["bit_depth"] = loaded.bit_depth;
  j["source_min"] = loaded.source_min;
  j["source_max"] = loaded.source_max;
  j["scale"] = loaded.scale;
  std::ofstream out(stem + ".input.json");
  out << j.dump(2) << "\n";
}

struct CommonFlags {
  std::string input;
  std::string output_stem;
  std::string config_path;
  std::string preset;
  uint64_t seed = 12345;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool needs_input = true) {
  if (needs_input)
    cmd->add_option("input", flags.input, "single-channel PNG or PGM")->required();
  cmd->add_option("-o,--output", flags.output_stem, "output path stem");
  cmd->add_option("--config", flags.config_path, "JSON config (flags override it)");
  cmd->add_option("--preset", flags.preset, "named parameter preset");
  cmd->add_option("--seed", flags.seed, "RNG seed");
}

PipelineConfig build_config(const CommonFlags& flags) {
  PipelineConfig cfg;
  if (!flags.config_path.empty()) cfg = config_from_json(read_file(flags.config_path));
  if (!flags.preset.empty()) apply_preset(cfg, flags.preset);
  cfg.seed = flags.seed;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"grayscale segmentation: cartoon/texture decomposition, local multiphase "
               "Chan-Vese via threshold dynamics, adaptive curvelet texture clustering"};
  app.require_subcommand(1);

  CommonFlags flags;

  // decompose
  auto* cmd_dec = app.add_subcommand("decompose", "split an image into cartoon + texture");
  CommonFlags dec_flags;
  double sigma = 3.0, a1 = 0.25, a2 = 0.50;
  bool linear = false;
  add_common(cmd_dec, dec_flags);
  cmd_dec->add_option("--sigma", sigma, "low-pass scale in pixels");
  cmd_dec->add_option("--a1", a1, "soft-threshold lower knot");
  cmd_dec->add_option("--a2", a2, "soft-threshold upper knot");
  cmd_dec->add_flag("--linear", linear, "plain low-pass/high-pass split");

  // cartoon
  auto* cmd_cart = app.add_subcommand("cartoon", "four-phase segmentation of the cartoon part");
  CommonFlags cart_flags;
  CartoonSegParams cart_cli;
  bool skip_decomposition = false;
  add_common(cmd_cart, cart_flags);
  cmd_cart->add_option("--lambda", cart_cli.lambda, "fidelity weight");
  cmd_cart->add_option("--mu", cart_cli.mu, "perimeter weight");
  cmd_cart->add_option("--beta", cart_cli.beta, "local-term weight (0 = plain multiphase)");
  cmd_cart->add_option("--dt", cart_cli.dt, "time step");
  cmd_cart->add_option("--kernel-std", cart_cli.kernel_std, "Gaussian std for the residual");
  cmd_cart->add_option("--max-iter", cart_cli.max_iter, "iteration cap");
  cmd_cart->add_flag("--no-decompose", skip_decomposition,
                     "treat the input as an already-extracted cartoon");

  // texture
  auto* cmd_tex = app.add_subcommand("texture", "texture segmentation via adaptive curvelets");
  CommonFlags tex_flags;
  double percentile = 0.92, eta = 0.1, mbo_dt = 0.1;
  size_t clusters = 2;
  std::string method = "mbo";
  bool dump_bands = false;
  bool tex_no_decompose = false;
  add_common(cmd_tex, tex_flags);
  cmd_tex->add_option("--percentile", percentile, "hard-threshold percentile in (0,1)");
  cmd_tex->add_option("--eta", eta, "wedge-merge fraction");
  cmd_tex->add_option("--clusters", clusters, "number of texture classes");
  cmd_tex->add_option("--method", method, "kmeans | mbo")
      ->check(CLI::IsMember({"kmeans", "mbo"}));
  cmd_tex->add_option("--dt", mbo_dt, "MBO diffusion step");
  cmd_tex->add_flag("--dump-subbands", dump_bands, "write curvelet subbands + manifest");
  cmd_tex->add_flag("--no-decompose", tex_no_decompose,
                    "treat the input as an already-extracted texture");

  // pipeline
  auto* cmd_pipe = app.add_subcommand("pipeline", "full cartoon + texture segmentation");
  CommonFlags pipe_flags;
  double p_percentile = -1.0, p_lambda = -1.0, p_mu = -1.0, p_beta = -1.0, p_dt = -1.0,
         p_sigma = -1.0, p_mbo_dt = -1.0;
  long p_clusters = -1;
  std::string p_method;
  bool p_dump = false;
  add_common(cmd_pipe, pipe_flags);
  cmd_pipe->add_option("--sigma", p_sigma, "decomposition scale");
  cmd_pipe->add_option("--lambda", p_lambda, "cartoon fidelity weight");
  cmd_pipe->add_option("--mu", p_mu, "cartoon perimeter weight");
  cmd_pipe->add_option("--beta", p_beta, "cartoon local-term weight");
  cmd_pipe->add_option("--dt", p_dt, "cartoon time step");
  cmd_pipe->add_option("--percentile", p_percentile, "texture threshold percentile");
  cmd_pipe->add_option("--clusters", p_clusters, "texture classes");
  cmd_pipe->add_option("--method", p_method, "kmeans | mbo")
      ->check(CLI::IsMember({"", "kmeans", "mbo"}));
  cmd_pipe->add_option("--mbo-dt", p_mbo_dt, "texture MBO diffusion step");
  cmd_pipe->add_flag("--dump-subbands", p_dump, "write curvelet subbands + manifest");

  // synth
  auto* cmd_synth = app.add_subcommand("synth", "generate a ground-truthed synthetic scene");
  CommonFlags synth_flags;
  std::string kind = "composite";
  SynthParams synth_params;
  bool write_truth = false;
  add_common(cmd_synth, synth_flags, /*needs_input=*/false);
  cmd_synth->add_option("--kind", kind, "four-quadrant | ramp-bias | stripes | composite");
  cmd_synth->add_option("--width", synth_params.width);
  cmd_synth->add_option("--height", synth_params.height);
  cmd_synth->add_option("--values", synth_params.quadrant_values, "four quadrant gray levels");
  cmd_synth->add_option("--ramp", synth_params.ramp_amplitude, "illumination ramp amplitude");
  cmd_synth->add_option("--angles", synth_params.stripe_angles_deg, "stripe angles in degrees");
  cmd_synth->add_option("--periods", synth_params.stripe_periods, "stripe periods in pixels");
  cmd_synth->add_option("--stripe-amplitude", synth_params.stripe_amplitude);
  cmd_synth->add_option("--noise-std", synth_params.noise_std, "additive Gaussian noise std");
  cmd_synth->add_flag("--truth", write_truth, "also write ground-truth label maps");

  CLI11_PARSE(app, argc, argv);

  try {
    if (cmd_dec->parsed()) {
      auto loaded = load_image(dec_flags.input);
      std::string stem = default_stem(dec_flags.input, dec_flags.output_stem);
      write_sidecar(stem, dec_flags.input, loaded);
      DecompositionParams params;
      params.sigma = sigma;
      params.a1 = a1;
      params.a2 = a2;
      Decomposition dec =
          linear ? decompose_linear(loaded.image, sigma) : decompose(loaded.image, params);
      save_image_png(stem + ".cartoon.png", dec.cartoon);
      Image tex_shifted = dec.texture;  // texture is signed; recenter for viewing
      for (auto& v : tex_shifted.data) v += 128.0;
      save_image_png(stem + ".texture.png", tex_shifted);
      nlohmann::json rep;
      rep["command"] = "decompose";
      rep["input"] = dec_flags.input;
      rep["sigma"] = sigma;
      rep["a1"] = a1;
      rep["a2"] = a2;
      rep["linear"] = linear;
      rep["texture_offset"] = 128.0;
      std::ofstream out(stem + ".report.json");
      out << rep.dump(2) << "\n";
      std::cout << "wrote " << stem << ".cartoon.png / .texture.png\n";
      return 0;
    }

    if (cmd_cart->parsed()) {
      auto loaded = load_image(cart_flags.input);
      std::string stem = default_stem(cart_flags.input, cart_flags.output_stem);
      write_sidecar(stem, cart_flags.input, loaded);
      PipelineConfig cfg = build_config(cart_flags);
      if (cmd_cart->count("--lambda")) cfg.cartoon.lambda = cart_cli.lambda;
      if (cmd_cart->count("--mu")) cfg.cartoon.mu = cart_cli.mu;
      if (cmd_cart->count("--beta")) cfg.cartoon.beta = cart_cli.beta;
      if (cmd_cart->count("--dt")) cfg.cartoon.dt = cart_cli.dt;
      if (cmd_cart->count("--kernel-std")) cfg.cartoon.kernel_std = cart_cli.kernel_std;
      if (cmd_cart->count("--max-iter")) cfg.cartoon.max_iter = cart_cli.max_iter;
      Image cartoon_input = skip_decomposition
                                ? loaded.image
                                : decompose(loaded.image, cfg.decomposition).cartoon;
      SegmentResult res = segment(cartoon_input, cfg.cartoon);
      save_label_map(stem + ".cartoon.png", res.labels, PaletteMode::Raw);
      save_label_map(stem + ".cartoon.color.png", res.labels, PaletteMode::Colorized);
      nlohmann::json rep;
      rep["command"] = "cartoon";
      rep["input"] = cart_flags.input;
      rep["seed"] = cart_flags.seed;
      rep["parameters"] = nlohmann::json::parse(config_to_json(cfg));
      rep["iterations"] = res.iterations;
      rep["converged"] = res.converged;
      rep["c"] = res.stats.c;
      std::ofstream out(stem + ".report.json");
      out << rep.dump(2) << "\n";
      std::cout << "wrote " << stem << ".cartoon.png (" << res.iterations << " iterations)\n";
      return 0;
    }

    if (cmd_tex->parsed()) {
      auto loaded = load_image(tex_flags.input);
      std::string stem = default_stem(tex_flags.input, tex_flags.output_stem);
      write_sidecar(stem, tex_flags.input, loaded);
      PipelineConfig cfg = build_config(tex_flags);
      if (cmd_tex->count("--percentile")) cfg.detection.percentile = percentile;
      if (cmd_tex->count("--eta")) cfg.detection.eta = eta;
      if (cmd_tex->count("--clusters")) cfg.clusters = clusters;
      if (cmd_tex->count("--method"))
        cfg.method = method == "kmeans" ? ClusterMethod::KMeans : ClusterMethod::MBO;
      if (cmd_tex->count("--dt")) cfg.mbo.dt = mbo_dt;
      cfg.dump_subbands = dump_bands;

      Image texture_input = tex_no_decompose
                                ? loaded.image
                                : decompose(loaded.image, cfg.decomposition).texture;
      ModifiedEctResult ect = modified_ect(texture_input, cfg.detection);
      FeatureMatrix features = feature_matrix(ect.coeffs, ect.partition);
      KMeansParams km = cfg.kmeans;
      km.k = cfg.clusters;
      km.seed = cfg.seed;
      ClusterResult km_result = kmeans(features, km);
      ClusterResult final_result = km_result;
      if (cfg.method == ClusterMethod::MBO) {
        MBOClusterParams mp = cfg.mbo;
        mp.seed = cfg.seed + 1;
        final_result = multiclass_mbo(features, km_result.labels, mp);
      }
      save_label_map(stem + ".texture.png", final_result.labels, PaletteMode::Raw);
      save_label_map(stem + ".texture.color.png", final_result.labels, PaletteMode::Colorized);
      std::ofstream pj(stem + ".partition.json");
      pj << partition_to_json(ect.partition, ect.tau, cfg.detection.eta) << "\n";
      if (dump_bands) dump_subbands(stem + ".subbands", ect.coeffs, ect.bank);
      nlohmann::json rep;
      rep["command"] = "texture";
      rep["input"] = tex_flags.input;
      rep["seed"] = tex_flags.seed;
      rep["parameters"] = nlohmann::json::parse(config_to_json(cfg));
      rep["tau"] = ect.tau;
      rep["n_sectors"] = ect.partition.n_sectors();
      rep["n_subbands"] = features.cols;
      rep["kmeans_objective"] = km_result.objective;
      std::ofstream out(stem + ".report.json");
      out << rep.dump(2) << "\n";
      std::cout << "wrote " << stem << ".texture.png (" << ect.partition.n_sectors()
                << " sectors, " << features.cols << " subbands)\n";
      return 0;
    }

    if (cmd_pipe->parsed()) {
      auto loaded = load_image(pipe_flags.input);
      std::string stem = default_stem(pipe_flags.input, pipe_flags.output_stem);
      write_sidecar(stem, pipe_flags.input, loaded);
      PipelineConfig cfg = build_config(pipe_flags);
      if (p_sigma > 0) cfg.decomposition.sigma = p_sigma;
      if (p_lambda > 0) cfg.cartoon.lambda = p_lambda;
      if (p_mu > 0) cfg.cartoon.mu = p_mu;
      if (p_beta >= 0) cfg.cartoon.beta = p_beta;
      if (p_dt > 0) cfg.cartoon.dt = p_dt;
      if (p_percentile > 0) cfg.detection.percentile = p_percentile;
      if (p_clusters > 0) cfg.clusters = static_cast<size_t>(p_clusters);
      if (!p_method.empty())
        cfg.method = p_method == "kmeans" ? ClusterMethod::KMeans : ClusterMethod::MBO;
      if (p_mbo_dt > 0) cfg.mbo.dt = p_mbo_dt;
      cfg.dump_subbands = p_dump;
      cfg.output_stem = stem;
      PipelineResult res = run_pipeline(loaded.image, cfg, pipe_flags.input);
      std::cout << "wrote " << stem << ".cartoon.png / .texture.png / .partition.json / "
                << ".report.json (cartoon iters " << res.cartoon.iterations << ")\n";
      return 0;
    }

    if (cmd_synth->parsed()) {
      std::string stem = synth_flags.output_stem.empty() ? "scene" : synth_flags.output_stem;
      SyntheticScene scene =
          synth_generate(scene_kind_from_string(kind), synth_params, synth_flags.seed);
      save_image_png(stem + ".png", scene.image);
      if (write_truth) {
        save_label_map(stem + ".cartoon_truth.png", scene.cartoon_truth, PaletteMode::Raw);
        save_label_map(stem + ".texture_truth.png", scene.texture_truth, PaletteMode::Raw);
      }
      nlohmann::json rep;
      rep["command"] = "synth";
      rep["kind"] = kind;
      rep["seed"] = synth_flags.seed;
      rep["width"] = synth_params.width;
      rep["height"] = synth_params.height;
      rep["values"] = synth_params.quadrant_values;
      rep["ramp"] = synth_params.ramp_amplitude;
      rep["angles"] = synth_params.stripe_angles_deg;
      rep["periods"] = synth_params.stripe_periods;
      rep["noise_std"] = synth_params.noise_std;
      std::ofstream out(stem + ".report.json");
      out << rep.dump(2) << "\n";
      std::cout << "wrote " << stem << ".png\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
