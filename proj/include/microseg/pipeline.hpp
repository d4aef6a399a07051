#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "microseg/cartoon_segmentation.hpp"
#include "microseg/clustering.hpp"
#include "microseg/decomposition.hpp"
#include "microseg/image.hpp"
#include "microseg/spectral_partition.hpp"
#include "microseg/synthetic.hpp"

namespace microseg {

enum class ClusterMethod { KMeans, MBO };

struct PipelineConfig {
  DecompositionParams decomposition;
  bool linear_decomposition = false;
  CartoonSegParams cartoon;
  DetectionParams detection;
  size_t clusters = 2;
  ClusterMethod method = ClusterMethod::MBO;
  KMeansParams kmeans;
  MBOClusterParams mbo;
  uint64_t seed = 12345;
  std::string output_stem;
  bool dump_subbands = false;
  bool colorized_labels = true;
};

/// Cartoon/texture parameter sets from the experiment presets; unknown
/// names raise invalid_argument. Fields untouched by a preset keep their
/// configured values.
void apply_preset(PipelineConfig& cfg, const std::string& name);
std::vector<std::string> preset_names();

PipelineConfig config_from_json(const std::string& text);
std::string config_to_json(const PipelineConfig& cfg);

struct PipelineResult {
  Decomposition decomposition;
  SegmentResult cartoon;
  SpectrumPartition partition;
  double tau = 0.0;
  ClusterResult texture;
  ClusterResult kmeans_stage;  // also kept when MBO refines it
  std::string report_json;
};

/// decompose -> cartoon segmentation on u -> modified ECT + features +
/// clustering on v. Writes label maps, the partition JSON and a run report
/// when output_stem is set; stage failures still produce a report with a
/// failure marker before the error propagates.
PipelineResult run_pipeline(const Image& input, const PipelineConfig& cfg,
                            const std::string& input_name = "<memory>");

/// Raw little-endian doubles per subband plus a JSON manifest.
void dump_subbands(const std::string& dir, const struct CoefficientSet& coeffs,
                   const struct CurveletFilterBank& bank);

}  // namespace microseg
