#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "shoesplat/gaussian.hpp"
#include "shoesplat/image.hpp"
#include "shoesplat/view.hpp"

namespace shoesplat::metrics {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Mean of squared differences over all pixels and channels.
double mse(const ImageF& original, const ImageF& reconstructed);
double mse(const ImageU8& original, const ImageU8& reconstructed);

/// 10 log10(max^2 / mse); +inf when mse is 0.
double psnr_from_mse(double mse, double max_value);
double psnr(const ImageF& original, const ImageF& reconstructed, double max_value = 1.0);
double psnr(const ImageU8& original, const ImageU8& reconstructed, double max_value = 255.0);

/// MSE restricted to pixels inside either mask (value >= 0.5). Returns 0 when
/// the union is empty.
double masked_mse(const ImageF& original, const ImageF& reconstructed, const MaskBuffer& mask_a,
                  const MaskBuffer& mask_b);

struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;
};

ConfusionCounts confusion(const MaskBuffer& pred, const MaskBuffer& truth, double threshold = 0.5);

/// TP / (TP + FP + FN); 1 when both masks are empty.
double iou(const ConfusionCounts& counts);
double iou(const MaskBuffer& pred, const MaskBuffer& truth, double threshold = 0.5);

struct ViewScore {
  std::string view_id;
  double psnr;
};

struct EvalReport {
  std::vector<ViewScore> views;
  /// Mean over finite scores; +inf when every view is infinite.
  double mean_psnr = 0.0;
  size_t n_views = 0;
  size_t n_infinite = 0;
};

/// Aggregates per-view scores, excluding infinite ones from the mean.
EvalReport summarize(std::vector<ViewScore> scores);

struct EvalOptions {
  Rgb background{0.0, 0.0, 0.0};
  /// Score only pixels inside the union of the view mask and the rendered
  /// alpha mask.
  bool masked = false;
  int threads = 1;
};

/// Renders every view and scores it against its masked image (MAX = 1).
/// Throws EmptyEvalSet for an empty list.
EvalReport evaluate_model(const gs::GaussianCloud& cloud, std::span<const View> views,
                          const EvalOptions& options = {});

std::string report_csv(const EvalReport& report);
std::string report_json(const EvalReport& report);
void write_report(const EvalReport& report, const std::filesystem::path& csv_path,
                  const std::filesystem::path& json_path);

/// Formats a score, writing "inf" for infinity.
std::string format_psnr(double psnr);

}  // namespace shoesplat::metrics
