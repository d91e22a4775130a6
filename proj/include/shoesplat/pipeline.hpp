#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "shoesplat/dataprep.hpp"
#include "shoesplat/gaussian.hpp"
#include "shoesplat/mesh_io.hpp"
#include "shoesplat/metrics.hpp"
#include "shoesplat/synth.hpp"
#include "shoesplat/trainer.hpp"

namespace shoesplat::pipeline {

struct PathsConfig {
  std::filesystem::path sfm_dir;
  std::filesystem::path images_dir;
  std::filesystem::path masks_dir;
  std::filesystem::path output_dir;
};

struct MeshConfig {
  int resolution = 128;
  double iso = 0.3;
  double tau = mesh::kBlackThreshold;
  int bake_k = 8;
  mesh::MeshFormat format = mesh::MeshFormat::PlyBinary;
};

struct PrepConfig {
  bool crop_square = true;
  /// 0 keeps every frame; otherwise frames are sampled evenly per video.
  int frames_per_video = 0;
};

struct SplitConfig {
  prep::SplitRatios ratios;
  std::uint64_t seed = 0;
};

struct PipelineConfig {
  PathsConfig paths;
  train::TrainConfig train;
  gs::InitConfig init;
  metrics::EvalOptions metrics;
  MeshConfig mesh;
  SplitConfig split;
  PrepConfig prep;
  synth::SynthConfig synth;
  int threads = 1;
};

struct ConfigKey {
  std::string name;  // dotted path, e.g. "train.iterations"
  std::string help;
};

/// Every accepted config key with a one-line description.
const std::vector<ConfigKey>& config_keys();
/// Key list with current values, for --help.
std::string describe_config(const PipelineConfig& config);

/// Applies a JSON object; unknown keys or ill-typed values throw ConfigError.
void apply_json(PipelineConfig& config, const nlohmann::json& j);
/// Sets one dotted key from text (parsed as JSON, or taken as a string).
void apply_override(PipelineConfig& config, const std::string& key, const std::string& value);
PipelineConfig load_config(const std::filesystem::path& path);
std::string config_json(const PipelineConfig& config);

/// Propagates `threads` into the module configs.
void finalize(PipelineConfig& config);

struct ImportSummary {
  size_t n_cameras = 0;
  size_t n_images = 0;
  size_t n_points = 0;
  std::string json;
};

/// Parses and validates a sparse reconstruction; writes a manifest of its
/// images (unassigned split) and a summary JSON next to it. Throws
/// InconsistentReconstruction when validation reports issues.
ImportSummary cmd_import(const std::filesystem::path& sfm_dir, const std::filesystem::path& out_manifest);

/// Crops, masks and splits the manifest's frames into `out_dir` (images/,
/// masks/, sparse/0, manifest.csv). Frames with empty masks are dropped.
prep::DatasetManifest cmd_prep(const std::filesystem::path& manifest, const std::filesystem::path& images_dir,
                               const std::filesystem::path& masks_dir, const std::filesystem::path& sfm_dir,
                               const std::filesystem::path& out_dir, const PipelineConfig& config);

/// Views of a prepared dataset in one split, in manifest order.
std::vector<View> load_views(const std::filesystem::path& prepared_dir, prep::Split split);

/// Trains on the train split, evaluating on val. Writes checkpoint.ply,
/// checkpoint.json and loss_trace.csv into `out_dir`.
train::TrainResult cmd_train(const std::filesystem::path& prepared_dir, const std::filesystem::path& out_dir,
                             const PipelineConfig& config);

/// Scores a checkpoint on the test split; writes eval.csv and eval.json.
metrics::EvalReport cmd_eval(const std::filesystem::path& checkpoint, const std::filesystem::path& prepared_dir,
                             const std::filesystem::path& out_dir, const PipelineConfig& config);

/// Density grid, marching cubes and colour baking.
mesh::TriangleMesh extract_mesh(const gs::GaussianCloud& cloud, const MeshConfig& config, int threads);
mesh::TriangleMesh cmd_extract(const std::filesystem::path& checkpoint, const std::filesystem::path& out_mesh,
                               const PipelineConfig& config);

/// Cleans a mesh file; output format follows the output extension.
mesh::TriangleMesh cmd_clean(const std::filesystem::path& mesh_in, const std::filesystem::path& mesh_out,
                             double tau);

synth::SynthScene cmd_synth(const std::filesystem::path& out_dir, const synth::SynthConfig& config);

/// Process exit code for an error kind: 1 usage/config, 2 data, 3 numeric.
int exit_code_for(ErrorKind kind);

}  // namespace shoesplat::pipeline
