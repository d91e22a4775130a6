#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "shoesplat/gaussian.hpp"
#include "shoesplat/view.hpp"

namespace shoesplat::train {

struct LearningRates {
  /// Position rate, scaled by the scene extent and decayed exponentially from
  /// init to final over the run.
  double means_init = 1.6e-4;
  double means_final = 1.6e-6;
  double sh_dc = 2.5e-3;
  double sh_rest = 2.5e-3 / 20.0;
  double opacity = 5e-2;
  double scales = 5e-3;
  double rotation = 1e-3;
};

struct TrainConfig {
  int iterations = 7000;
  double lambda = 0.2;
  LearningRates lr;
  int densify_interval = 100;
  int densify_from = 500;
  int densify_until = 15000;
  double grad_threshold = 2e-4;
  double percent_dense = 0.01;
  double prune_opacity = 0.005;
  /// Densification is skipped while the cloud is at least this large.
  size_t max_gaussians = 200000;
  int eval_interval = 500;
  std::uint64_t seed = 0;
  Rgb background{0.0, 0.0, 0.0};
  int threads = 1;
  /// 0 derives the extent from the training cameras.
  double scene_extent = 0.0;
  /// Where to dump the cloud and state when the loss becomes non-finite.
  std::filesystem::path diagnostic_dir;

  void validate() const;
};

struct Checkpoint {
  gs::GaussianCloud cloud;
  int iteration = 0;
  double train_loss = 0.0;
  std::optional<double> eval_psnr;
};

/// Splat PLY plus a JSON sidecar next to it (same stem, .json).
void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& ply_path);
Checkpoint load_checkpoint(const std::filesystem::path& ply_path);
std::filesystem::path sidecar_path(const std::filesystem::path& ply_path);
std::string checkpoint_metadata_json(const Checkpoint& checkpoint);

struct LossSample {
  int iteration;
  double loss;
  std::optional<double> psnr;

  friend bool operator==(const LossSample&, const LossSample&) = default;
};

struct LossTrace {
  std::vector<LossSample> samples;

  /// Appends a sample; iterations must be strictly increasing.
  void push(const LossSample& sample);
  std::string csv() const;
};

/// Keeps the checkpoint with the highest eval PSNR; the earliest wins a tie.
class BestCheckpointTracker {
 public:
  /// Returns true when this becomes the new best.
  bool offer(int iteration, double eval_psnr, double train_loss, const gs::GaussianCloud& cloud);
  const std::optional<Checkpoint>& best() const { return best_; }

 private:
  std::optional<Checkpoint> best_;
};

struct TrainResult {
  Checkpoint best;
  LossTrace trace;
  gs::GaussianCloud final_cloud;
};

/// 1.1 times the largest distance of a camera centre from their mean.
double camera_extent(std::span<const View> views);

/// Fits `init` to the training views. Eval points use `eval_views`, or the
/// training views when that list is empty. Throws NonFiniteLoss when the loss
/// or a gradient stops being finite.
TrainResult train(std::span<const View> views, std::span<const View> eval_views,
                  gs::GaussianCloud init, const TrainConfig& config);

}  // namespace shoesplat::train
