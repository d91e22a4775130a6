#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "shoesplat/gaussian.hpp"
#include "shoesplat/image.hpp"

namespace shoesplat::raster {

using geom::Vec2;
using geom::Vec3;
using geom::Vec4;

inline constexpr int kTileSize = 16;
inline constexpr double kTransmittanceCutoff = 1e-4;
/// Squared Mahalanobis radius of per-pixel support (3 sigma).
inline constexpr double kSupportMahalanobis2 = gs::kSupportSigma * gs::kSupportSigma;

struct RenderOptions {
  int tile_size = kTileSize;
  /// Worker threads for tile-parallel work; 0 = hardware concurrency. Results
  /// do not depend on this.
  int threads = 1;
};

struct RenderOutput {
  ImageF color;  // RGB
  /// Accumulated opacity 1 - T_final per pixel, row-major.
  std::vector<double> alpha;
  /// Number of splats composited at each pixel, row-major.
  std::vector<std::uint32_t> splat_count;

  int width() const { return color.width(); }
  int height() const { return color.height(); }
};

/// Per-Gaussian gradients in the unconstrained parameterization, indexed like
/// the cloud.
struct ParamGradients {
  std::vector<Vec3> means;
  std::vector<Vec3> log_scales;
  std::vector<Vec4> rotations;
  std::vector<double> opacity_logits;
  std::vector<std::array<double, gs::kMaxShCoeffs * 3>> sh;
  /// Gradient w.r.t. the projected pixel-space mean (densification statistic).
  std::vector<Vec2> mean2d;
  /// Whether the Gaussian survived culling in this view.
  std::vector<std::uint8_t> visible;

  explicit ParamGradients(size_t n = 0);
  size_t size() const { return means.size(); }
};

/// A projected Gaussian together with its cloud index.
struct Splat {
  gs::ProjectedGaussian proj;
  std::uint32_t index;
};

/// Projects every Gaussian, drops culled ones and sorts by (depth, index).
std::vector<Splat> project_and_sort(const gs::GaussianCloud& cloud, const geom::PinholeCamera& cam);

struct TileBins {
  int tiles_x = 0;
  int tiles_y = 0;
  /// Per tile (row-major), positions into the splat list, in list order.
  std::vector<std::vector<std::uint32_t>> lists;
};

/// Assigns each splat to every tile its support AABB intersects.
TileBins tile_bin(std::span<const Splat> splats, int width, int height, int tile = kTileSize);

RenderOutput render(const gs::GaussianCloud& cloud, const geom::PinholeCamera& cam,
                    const Vec3& background, const RenderOptions& options = {});

/// `upstream` holds dLoss/dColor, same shape as the rendered color image.
ParamGradients render_backward(const gs::GaussianCloud& cloud, const geom::PinholeCamera& cam,
                               const Vec3& background, const ImageF& upstream,
                               const RenderOptions& options = {});

/// 8-bit PNG of the color buffer.
void dump_png(const RenderOutput& out, const std::filesystem::path& path);

}  // namespace shoesplat::raster
