#include "shoesplat/trainer.hpp"

#include <charconv>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "shoesplat/adam.hpp"
#include "shoesplat/density_control.hpp"
#include "shoesplat/loss.hpp"
#include "shoesplat/metrics.hpp"
#include "shoesplat/rasterizer.hpp"
#include "shoesplat/splat_ply.hpp"
#include "shoesplat/util.hpp"

namespace shoesplat::train {

using geom::Vec3;

void TrainConfig::validate() const {
  if (iterations <= 0) fail(ErrorKind::ConfigError, "iterations must be positive");
  if (!(lambda >= 0.0 && lambda <= 1.0)) fail(ErrorKind::ConfigError, "lambda must be in [0, 1]");
  if (densify_interval <= 0) fail(ErrorKind::ConfigError, "densify_interval must be positive");
  if (eval_interval <= 0) fail(ErrorKind::ConfigError, "eval_interval must be positive");
  if (!(prune_opacity >= 0.0 && prune_opacity < 1.0)) {
    fail(ErrorKind::ConfigError, "prune_opacity must be in [0, 1)");
  }
  for (double r : {lr.means_init, lr.means_final, lr.sh_dc, lr.sh_rest, lr.opacity, lr.scales, lr.rotation}) {
    if (!(r >= 0.0) || !std::isfinite(r)) fail(ErrorKind::ConfigError, "learning rates must be finite and >= 0");
  }
  if (scene_extent < 0.0) fail(ErrorKind::ConfigError, "scene_extent must be >= 0");
}

namespace {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Optimiser parameter groups, each with its own rate.
enum Group { kMeans, kShDc, kShRest, kOpacity, kScales, kRotation, kGroupCount };

int group_width(Group g, int sh_degree) {
  switch (g) {
    case kMeans: return 3;
    case kShDc: return 3;
    case kShRest: return 3 * (gs::sh_coeff_count(sh_degree) - 1);
    case kOpacity: return 1;
    case kScales: return 3;
    case kRotation: return 4;
    default: return 0;
  }
}

void gather(const gs::GaussianCloud& cloud, Group grp, std::vector<double>& out) {
  const int w = group_width(grp, cloud.sh_degree);
  out.resize(cloud.size() * w);
  for (size_t i = 0; i < cloud.size(); ++i) {
    const auto& g = cloud.gaussians[i];
    double* o = out.data() + i * w;
    switch (grp) {
      case kMeans: for (int k = 0; k < 3; ++k) o[k] = g.mean[k]; break;
      case kShDc: for (int k = 0; k < 3; ++k) o[k] = g.sh[k]; break;
      case kShRest: for (int k = 0; k < w; ++k) o[k] = g.sh[3 + k]; break;
      case kOpacity: o[0] = g.opacity_logit; break;
      case kScales: for (int k = 0; k < 3; ++k) o[k] = g.log_scale[k]; break;
      case kRotation: for (int k = 0; k < 4; ++k) o[k] = g.rotation[k]; break;
      default: break;
    }
  }
}

void scatter(gs::GaussianCloud& cloud, Group grp, const std::vector<double>& in) {
  const int w = group_width(grp, cloud.sh_degree);
  for (size_t i = 0; i < cloud.size(); ++i) {
    auto& g = cloud.gaussians[i];
    const double* v = in.data() + i * w;
    switch (grp) {
      case kMeans: for (int k = 0; k < 3; ++k) g.mean[k] = v[k]; break;
      case kShDc: for (int k = 0; k < 3; ++k) g.sh[k] = v[k]; break;
      case kShRest: for (int k = 0; k < w; ++k) g.sh[3 + k] = v[k]; break;
      case kOpacity: g.opacity_logit = v[0]; break;
      case kScales: for (int k = 0; k < 3; ++k) g.log_scale[k] = v[k]; break;
      case kRotation: for (int k = 0; k < 4; ++k) g.rotation[k] = v[k]; break;
      default: break;
    }
  }
}

void gather_grad(const raster::ParamGradients& pg, Group grp, int sh_degree, std::vector<double>& out) {
  const int w = group_width(grp, sh_degree);
  out.resize(pg.size() * w);
  for (size_t i = 0; i < pg.size(); ++i) {
    double* o = out.data() + i * w;
    switch (grp) {
      case kMeans: for (int k = 0; k < 3; ++k) o[k] = pg.means[i][k]; break;
      case kShDc: for (int k = 0; k < 3; ++k) o[k] = pg.sh[i][k]; break;
      case kShRest: for (int k = 0; k < w; ++k) o[k] = pg.sh[i][3 + k]; break;
      case kOpacity: o[0] = pg.opacity_logits[i]; break;
      case kScales: for (int k = 0; k < 3; ++k) o[k] = pg.log_scales[i][k]; break;
      case kRotation: for (int k = 0; k < 4; ++k) o[k] = pg.rotations[i][k]; break;
      default: break;
    }
  }
}

AdamState remap_state(const AdamState& s, const std::vector<std::int64_t>& origin, int width) {
  AdamState out(origin.size() * width);
  out.step = s.step;
  for (size_t i = 0; i < origin.size(); ++i) {
    if (origin[i] < 0) continue;
    const size_t src = static_cast<size_t>(origin[i]) * width;
    for (int k = 0; k < width; ++k) {
      out.m[i * width + k] = s.m[src + k];
      out.v[i * width + k] = s.v[src + k];
    }
  }
  return out;
}

double means_lr(const TrainConfig& c, double extent, int iteration) {
  const double t = std::clamp(static_cast<double>(iteration) / c.iterations, 0.0, 1.0);
  if (c.lr.means_init <= 0.0 || c.lr.means_final <= 0.0) return c.lr.means_init * extent;
  const double log_lr = (1.0 - t) * std::log(c.lr.means_init) + t * std::log(c.lr.means_final);
  return std::exp(log_lr) * extent;
}

bool all_finite(const std::vector<double>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

[[noreturn]] void non_finite(const TrainConfig& config, const gs::GaussianCloud& cloud, int iteration,
                             const std::string& view_id, double loss, const std::string& what) {
  const std::string msg = what + " at iteration " + std::to_string(iteration) + " on view " + view_id +
                          " (" + std::to_string(cloud.size()) + " gaussians)";
  spdlog::error("{}", msg);
  if (!config.diagnostic_dir.empty()) {
    try {
      gs::save_cloud(cloud, config.diagnostic_dir / "nonfinite_cloud.ply");
      nlohmann::ordered_json j;
      j["iteration"] = iteration;
      j["view"] = view_id;
      j["loss"] = std::isfinite(loss) ? nlohmann::json(loss) : nlohmann::json(format_double(loss));
      j["n_gaussians"] = cloud.size();
      j["reason"] = what;
      atomic_write_file(config.diagnostic_dir / "nonfinite_state.json", j.dump(2) + "\n");
    } catch (const std::exception& e) {
      spdlog::error("diagnostic dump failed: {}", e.what());
    }
  }
  fail(ErrorKind::NonFiniteLoss, msg);
}

}  // namespace

std::filesystem::path sidecar_path(const std::filesystem::path& ply_path) {
  auto p = ply_path;
  p.replace_extension(".json");
  return p;
}

std::string checkpoint_metadata_json(const Checkpoint& checkpoint) {
  nlohmann::ordered_json j;
  j["iteration"] = checkpoint.iteration;
  j["train_loss"] = checkpoint.train_loss;
  if (!checkpoint.eval_psnr) {
    j["eval_psnr"] = nullptr;
  } else if (std::isinf(*checkpoint.eval_psnr)) {
    j["eval_psnr"] = metrics::format_psnr(*checkpoint.eval_psnr);
  } else {
    j["eval_psnr"] = *checkpoint.eval_psnr;
  }
  j["sh_degree"] = checkpoint.cloud.sh_degree;
  j["n_gaussians"] = checkpoint.cloud.size();
  return j.dump(2) + "\n";
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& ply_path) {
  gs::save_cloud(checkpoint.cloud, ply_path);
  atomic_write_file(sidecar_path(ply_path), checkpoint_metadata_json(checkpoint));
}

Checkpoint load_checkpoint(const std::filesystem::path& ply_path) {
  Checkpoint c;
  c.cloud = gs::load_cloud(ply_path);
  const auto meta = sidecar_path(ply_path);
  if (!std::filesystem::exists(meta)) return c;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(meta));
    c.iteration = j.at("iteration").get<int>();
    c.train_loss = j.at("train_loss").get<double>();
    const auto& e = j.at("eval_psnr");
    if (e.is_number()) {
      c.eval_psnr = e.get<double>();
    } else if (e.is_string() && e.get<std::string>() == "inf") {
      c.eval_psnr = metrics::kInfinity;
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::FormatError, "bad checkpoint metadata " + meta.string() + ": " + e.what());
  }
  return c;
}

void LossTrace::push(const LossSample& sample) {
  if (!samples.empty() && sample.iteration <= samples.back().iteration) {
    fail(ErrorKind::InvalidArgument, "loss trace iterations must be strictly increasing");
  }
  samples.push_back(sample);
}

std::string LossTrace::csv() const {
  std::string s = "iteration,loss,psnr\n";
  for (const auto& e : samples) {
    s += std::to_string(e.iteration) + "," + format_double(e.loss) + ",";
    if (e.psnr) s += metrics::format_psnr(*e.psnr);
    s += "\n";
  }
  return s;
}

bool BestCheckpointTracker::offer(int iteration, double eval_psnr, double train_loss,
                                  const gs::GaussianCloud& cloud) {
  if (std::isnan(eval_psnr)) return false;
  if (best_ && !(eval_psnr > *best_->eval_psnr)) return false;
  best_ = Checkpoint{cloud, iteration, train_loss, eval_psnr};
  return true;
}

double camera_extent(std::span<const View> views) {
  if (views.empty()) return 1.0;
  Vec3 mean = Vec3::Zero();
  for (const auto& v : views) mean += v.camera.center();
  mean /= static_cast<double>(views.size());
  double r = 0.0;
  for (const auto& v : views) r = std::max(r, (v.camera.center() - mean).norm());
  return r > 0.0 ? 1.1 * r : 1.0;
}

TrainResult train(std::span<const View> views, std::span<const View> eval_views,
                  gs::GaussianCloud init, const TrainConfig& config) {
  config.validate();
  if (views.size() < 2) fail(ErrorKind::InvalidArgument, "training needs at least 2 views");
  if (init.empty()) fail(ErrorKind::EmptyPointCloud, "initial cloud is empty");

  std::vector<ImageF> targets;
  targets.reserve(views.size());
  for (const auto& v : views) {
    if (v.image.channels() != 3 || v.image.width() != v.camera.width ||
        v.image.height() != v.camera.height) {
      fail(ErrorKind::DimensionMismatch, "image does not match its camera: " + v.id);
    }
    bool any = false;
    for (double m : v.mask.data()) any = any || m >= 0.5;
    if (!any) fail(ErrorKind::EmptyMask, "mask of view " + v.id + " is empty");
    targets.push_back(masked_target(v, config.background));
  }
  const std::span<const View> evals = eval_views.empty() ? views : eval_views;

  const double extent = config.scene_extent > 0.0 ? config.scene_extent : camera_extent(views);
  const Vec3 bg(config.background[0], config.background[1], config.background[2]);
  raster::RenderOptions ro;
  ro.threads = config.threads;
  metrics::EvalOptions eo;
  eo.background = config.background;
  eo.threads = config.threads;

  gs::GaussianCloud cloud = std::move(init);
  const int degree = cloud.sh_degree;
  const double group_lr[kGroupCount] = {0.0, config.lr.sh_dc, config.lr.sh_rest,
                                        config.lr.opacity, config.lr.scales, config.lr.rotation};
  std::vector<AdamState> states;
  for (int g = 0; g < kGroupCount; ++g) {
    states.emplace_back(cloud.size() * group_width(static_cast<Group>(g), degree));
  }
  std::vector<double> grad_accum(cloud.size(), 0.0);
  std::vector<double> grad_count(cloud.size(), 0.0);

  Rng rng(config.seed);
  std::vector<size_t> order;
  TrainResult result;
  BestCheckpointTracker tracker;
  double loss_sum = 0.0;
  int loss_n = 0;
  std::vector<double> params, grads;

  for (int it = 1; it <= config.iterations; ++it) {
    if (order.empty()) {
      order.resize(views.size());
      std::iota(order.begin(), order.end(), size_t{0});
      rng.shuffle(order);
      std::reverse(order.begin(), order.end());
    }
    const size_t vi = order.back();
    order.pop_back();
    const View& view = views[vi];

    const auto rendered = raster::render(cloud, view.camera, bg, ro);
    const auto loss = photometric_loss(rendered.color, targets[vi], config.lambda);
    if (!std::isfinite(loss.loss)) non_finite(config, cloud, it, view.id, loss.loss, "non-finite loss");
    loss_sum += loss.loss;
    ++loss_n;

    const auto pg = raster::render_backward(cloud, view.camera, bg, loss.grad, ro);

    if (it < config.densify_until) {
      const double hw = 0.5 * view.camera.width, hh = 0.5 * view.camera.height;
      for (size_t i = 0; i < cloud.size(); ++i) {
        if (!pg.visible[i]) continue;
        grad_accum[i] += std::hypot(pg.mean2d[i].x() * hw, pg.mean2d[i].y() * hh);
        grad_count[i] += 1.0;
      }
    }

    for (int g = 0; g < kGroupCount; ++g) {
      const Group grp = static_cast<Group>(g);
      if (group_width(grp, degree) == 0) continue;
      gather(cloud, grp, params);
      gather_grad(pg, grp, degree, grads);
      if (!all_finite(grads)) non_finite(config, cloud, it, view.id, loss.loss, "non-finite gradient");
      const double lr = grp == kMeans ? means_lr(config, extent, it) : group_lr[g];
      adam_step(params, grads, states[g], lr);
      if (!all_finite(params)) non_finite(config, cloud, it, view.id, loss.loss, "non-finite parameter");
      scatter(cloud, grp, params);
    }

    if (it > config.densify_from && it < config.densify_until && it % config.densify_interval == 0) {
      std::vector<double> avg(cloud.size(), 0.0);
      for (size_t i = 0; i < cloud.size(); ++i) {
        if (grad_count[i] > 0.0) avg[i] = grad_accum[i] / grad_count[i];
      }
      DensifyConfig dc;
      dc.grad_threshold = config.grad_threshold;
      dc.percent_dense = config.percent_dense;
      dc.scene_extent = extent;
      dc.prune_opacity = config.prune_opacity;
      const DensifyResult dr = cloud.size() >= config.max_gaussians
                                   ? prune(cloud, config.prune_opacity)
                                   : densify_and_prune(cloud, avg, dc);
      if (dr.cloud.empty()) {
        spdlog::warn("iteration {}: pruning would empty the cloud, keeping it", it);
      } else {
        for (int g = 0; g < kGroupCount; ++g) {
          states[g] = remap_state(states[g], dr.origin, group_width(static_cast<Group>(g), degree));
        }
        cloud = dr.cloud;
        spdlog::debug("iteration {}: split {} clone {} prune {} -> {} gaussians", it, dr.n_split,
                      dr.n_cloned, dr.n_pruned, cloud.size());
      }
      grad_accum.assign(cloud.size(), 0.0);
      grad_count.assign(cloud.size(), 0.0);
    }

    if (it % config.eval_interval == 0 || it == config.iterations) {
      const double mean_loss = loss_sum / loss_n;
      const auto report = metrics::evaluate_model(cloud, evals, eo);
      result.trace.push({it, mean_loss, report.mean_psnr});
      tracker.offer(it, report.mean_psnr, mean_loss, cloud);
      spdlog::info("iteration {}: loss {:.6f} eval psnr {} ({} gaussians)", it, mean_loss,
                   metrics::format_psnr(report.mean_psnr), cloud.size());
      loss_sum = 0.0;
      loss_n = 0;
    }
  }

  result.best = tracker.best() ? *tracker.best() : Checkpoint{cloud, config.iterations, 0.0, std::nullopt};
  result.final_cloud = std::move(cloud);
  return result;
}

}  // namespace shoesplat::train
