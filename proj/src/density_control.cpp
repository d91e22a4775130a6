#include "shoesplat/density_control.hpp"

#include <cmath>

namespace shoesplat::train {

using geom::Vec3;

namespace {

DensifyResult prune_result(DensifyResult in, double min_opacity) {
  DensifyResult out;
  out.cloud.sh_degree = in.cloud.sh_degree;
  out.n_split = in.n_split;
  out.n_cloned = in.n_cloned;
  for (size_t i = 0; i < in.cloud.size(); ++i) {
    if (in.cloud.gaussians[i].opacity() < min_opacity) {
      ++out.n_pruned;
      continue;
    }
    out.cloud.gaussians.push_back(in.cloud.gaussians[i]);
    out.origin.push_back(in.origin[i]);
  }
  return out;
}

}  // namespace

DensifyResult densify_and_prune(const gs::GaussianCloud& cloud, std::span<const double> grad_norms,
                                const DensifyConfig& config) {
  if (grad_norms.size() != cloud.size()) {
    fail(ErrorKind::DimensionMismatch, "gradient statistics do not match the cloud size");
  }
  const double size_limit = config.percent_dense * config.scene_extent;
  DensifyResult r;
  r.cloud.sh_degree = cloud.sh_degree;
  std::vector<gs::Gaussian> clones, children;
  for (size_t i = 0; i < cloud.size(); ++i) {
    const auto& g = cloud.gaussians[i];
    if (!(grad_norms[i] >= config.grad_threshold)) {
      r.cloud.gaussians.push_back(g);
      r.origin.push_back(static_cast<std::int64_t>(i));
      continue;
    }
    const Vec3 s = g.scale();
    int major = 0;
    for (int k = 1; k < 3; ++k) {
      if (s[k] > s[major]) major = k;
    }
    if (s[major] <= size_limit) {
      r.cloud.gaussians.push_back(g);
      r.origin.push_back(static_cast<std::int64_t>(i));
      clones.push_back(g);
      ++r.n_cloned;
      continue;
    }
    const Vec3 axis = geom::quat_to_rotmat(g.rotation.normalized()).col(major);
    const Vec3 offset = 0.5 * s[major] * axis;
    for (const double sign : {1.0, -1.0}) {
      gs::Gaussian child = g;
      child.mean = g.mean + sign * offset;
      child.log_scale = g.log_scale.array() - std::log(config.split_scale_divisor);
      children.push_back(child);
    }
    ++r.n_split;
  }
  for (const auto& g : clones) {
    r.cloud.gaussians.push_back(g);
    r.origin.push_back(-1);
  }
  for (const auto& g : children) {
    r.cloud.gaussians.push_back(g);
    r.origin.push_back(-1);
  }
  return prune_result(std::move(r), config.prune_opacity);
}

DensifyResult prune(const gs::GaussianCloud& cloud, double min_opacity) {
  DensifyResult r;
  r.cloud = cloud;
  r.origin.resize(cloud.size());
  for (size_t i = 0; i < cloud.size(); ++i) r.origin[i] = static_cast<std::int64_t>(i);
  return prune_result(std::move(r), min_opacity);
}

}  // namespace shoesplat::train
