#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "shoesplat/colmap_io.hpp"
#include "shoesplat/gaussian.hpp"
#include "shoesplat/view.hpp"

namespace shoesplat::synth {

struct SynthConfig {
  std::uint64_t seed = 0;
  int n_gaussians = 20;
  int n_views = 24;
  int width = 128;
  int height = 128;
  double focal = 150.0;
  double camera_radius = 3.0;
  /// Sparse points sampled around each ground-truth Gaussian.
  int points_per_gaussian = 8;
  /// Ground-truth alpha at or above which a pixel is foreground.
  double mask_threshold = 0.05;

  void validate() const;
};

struct SynthScene {
  gs::GaussianCloud ground_truth;
  colmap::Reconstruction reconstruction;
  /// Rendered views, quantised to 8 bits as they are stored on disk.
  std::vector<View> views;
};

/// Random elongated blob of Gaussians seen from cameras on three rings
/// around the origin. Fully determined by the config.
SynthScene generate(const SynthConfig& config);

/// Writes sparse/0 (binary), images/*.png, masks/*.png and gt_cloud.ply.
void write_scene(const SynthScene& scene, const std::filesystem::path& out_dir);

}  // namespace shoesplat::synth
