#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "shoesplat/gaussian.hpp"

namespace shoesplat::train {

struct DensifyConfig {
  /// Threshold on the averaged view-space (NDC) mean gradient norm.
  double grad_threshold = 2e-4;
  /// Gaussians with max scale above percent_dense * extent are split,
  /// smaller ones cloned.
  double percent_dense = 0.01;
  double scene_extent = 1.0;
  /// Prune Gaussians whose opacity falls below this.
  double prune_opacity = 0.005;
  /// Children of a split have their scales divided by this.
  double split_scale_divisor = 1.6;
};

struct DensifyResult {
  gs::GaussianCloud cloud;
  /// For each output Gaussian, the input index it continues, or -1 when new.
  std::vector<std::int64_t> origin;
  size_t n_split = 0;
  size_t n_cloned = 0;
  size_t n_pruned = 0;
};

/// Clone small high-gradient Gaussians, split large ones into two children
/// placed at +-0.5 sigma along the major axis, then prune transparent ones.
/// Survivors keep their order; clones and then split children are appended.
DensifyResult densify_and_prune(const gs::GaussianCloud& cloud, std::span<const double> grad_norms,
                                const DensifyConfig& config);

/// Prune only.
DensifyResult prune(const gs::GaussianCloud& cloud, double min_opacity);

}  // namespace shoesplat::train
