#include "shoesplat/metrics.hpp"

#include <charconv>
#include <cmath>

#include <nlohmann/json.hpp>

#include "shoesplat/rasterizer.hpp"
#include "shoesplat/util.hpp"

namespace shoesplat {

ImageF masked_target(const View& view, const Rgb& background) {
  const ImageF& img = view.image;
  if (img.width() != view.mask.width() || img.height() != view.mask.height()) {
    fail(ErrorKind::DimensionMismatch, "mask does not match image " + view.id);
  }
  ImageF out = img;
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      if (view.mask.at(x, y) >= 0.5) continue;
      for (int c = 0; c < img.channels(); ++c) out.at(x, y, c) = background[c % 3];
    }
  }
  return out;
}

}  // namespace shoesplat

namespace shoesplat::metrics {

namespace {

template <typename T>
double mse_impl(const Image<T>& a, const Image<T>& b) {
  if (!a.same_shape(b)) fail(ErrorKind::DimensionMismatch, "images differ in shape");
  if (a.empty()) return 0.0;
  double sum = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a.data()[i]) - static_cast<double>(b.data()[i]);
    sum += d * d;
  }
  return sum / static_cast<double>(a.size());
}

void check_mask_pair(const MaskBuffer& a, const MaskBuffer& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    fail(ErrorKind::DimensionMismatch, "masks differ in shape");
  }
}

}  // namespace

double mse(const ImageF& original, const ImageF& reconstructed) {
  return mse_impl(original, reconstructed);
}
double mse(const ImageU8& original, const ImageU8& reconstructed) {
  return mse_impl(original, reconstructed);
}

double psnr_from_mse(double mse, double max_value) {
  if (!(max_value > 0.0)) fail(ErrorKind::InvalidArgument, "MAX must be positive");
  if (mse <= 0.0) return kInfinity;
  return 10.0 * std::log10(max_value * max_value / mse);
}

double psnr(const ImageF& original, const ImageF& reconstructed, double max_value) {
  return psnr_from_mse(mse(original, reconstructed), max_value);
}
double psnr(const ImageU8& original, const ImageU8& reconstructed, double max_value) {
  return psnr_from_mse(mse(original, reconstructed), max_value);
}

double masked_mse(const ImageF& original, const ImageF& reconstructed, const MaskBuffer& mask_a,
                  const MaskBuffer& mask_b) {
  if (!original.same_shape(reconstructed)) fail(ErrorKind::DimensionMismatch, "images differ in shape");
  check_mask_pair(mask_a, mask_b);
  if (mask_a.width() != original.width() || mask_a.height() != original.height()) {
    fail(ErrorKind::DimensionMismatch, "mask does not match image");
  }
  double sum = 0.0;
  size_t n = 0;
  for (int y = 0; y < original.height(); ++y) {
    for (int x = 0; x < original.width(); ++x) {
      if (mask_a.at(x, y) < 0.5 && mask_b.at(x, y) < 0.5) continue;
      for (int c = 0; c < original.channels(); ++c) {
        const double d = original.at(x, y, c) - reconstructed.at(x, y, c);
        sum += d * d;
        ++n;
      }
    }
  }
  return n ? sum / static_cast<double>(n) : 0.0;
}

ConfusionCounts confusion(const MaskBuffer& pred, const MaskBuffer& truth, double threshold) {
  check_mask_pair(pred, truth);
  ConfusionCounts c;
  for (int y = 0; y < pred.height(); ++y) {
    for (int x = 0; x < pred.width(); ++x) {
      const bool p = pred.at(x, y) >= threshold;
      const bool t = truth.at(x, y) >= threshold;
      if (p && t) ++c.tp;
      else if (p) ++c.fp;
      else if (t) ++c.fn;
      else ++c.tn;
    }
  }
  return c;
}

double iou(const ConfusionCounts& counts) {
  const std::uint64_t denom = counts.tp + counts.fp + counts.fn;
  if (denom == 0) return 1.0;
  return static_cast<double>(counts.tp) / static_cast<double>(denom);
}

double iou(const MaskBuffer& pred, const MaskBuffer& truth, double threshold) {
  return iou(confusion(pred, truth, threshold));
}

EvalReport summarize(std::vector<ViewScore> scores) {
  EvalReport r;
  r.views = std::move(scores);
  r.n_views = r.views.size();
  double sum = 0.0;
  size_t finite = 0;
  for (const auto& v : r.views) {
    if (std::isinf(v.psnr)) {
      ++r.n_infinite;
    } else {
      sum += v.psnr;
      ++finite;
    }
  }
  r.mean_psnr = finite ? sum / static_cast<double>(finite) : kInfinity;
  return r;
}

EvalReport evaluate_model(const gs::GaussianCloud& cloud, std::span<const View> views,
                          const EvalOptions& options) {
  if (views.empty()) fail(ErrorKind::EmptyEvalSet, "no views to evaluate");
  std::vector<ViewScore> scores(views.size());
  const geom::Vec3 bg(options.background[0], options.background[1], options.background[2]);
  raster::RenderOptions ro;
  ro.threads = options.threads;
  for (size_t i = 0; i < views.size(); ++i) {
    const View& v = views[i];
    const ImageF target = masked_target(v, options.background);
    const auto out = raster::render(cloud, v.camera, bg, ro);
    if (!out.color.same_shape(target)) {
      fail(ErrorKind::DimensionMismatch, "camera size does not match image " + v.id);
    }
    double m;
    if (options.masked) {
      MaskBuffer rendered_mask(out.width(), out.height(), 1);
      rendered_mask.data() = out.alpha;
      m = masked_mse(target, out.color, v.mask, rendered_mask);
    } else {
      m = mse(target, out.color);
    }
    scores[i] = {v.id, psnr_from_mse(m, 1.0)};
  }
  return summarize(std::move(scores));
}

std::string format_psnr(double psnr) {
  if (std::isinf(psnr)) return psnr > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, psnr);
  return std::string(buf, res.ptr);
}

std::string report_csv(const EvalReport& report) {
  std::string s = "view_id,psnr\n";
  for (const auto& v : report.views) s += v.view_id + "," + format_psnr(v.psnr) + "\n";
  return s;
}

std::string report_json(const EvalReport& report) {
  nlohmann::ordered_json j;
  if (std::isinf(report.mean_psnr)) {
    j["mean_psnr"] = format_psnr(report.mean_psnr);
  } else {
    j["mean_psnr"] = report.mean_psnr;
  }
  j["n_views"] = report.n_views;
  j["n_infinite"] = report.n_infinite;
  return j.dump(2) + "\n";
}

void write_report(const EvalReport& report, const std::filesystem::path& csv_path,
                  const std::filesystem::path& json_path) {
  atomic_write_file(csv_path, report_csv(report));
  atomic_write_file(json_path, report_json(report));
}

}  // namespace shoesplat::metrics
