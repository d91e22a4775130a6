#include "shoesplat/synth.hpp"

#include <cmath>
#include <numbers>

#include "shoesplat/image_io.hpp"
#include "shoesplat/rasterizer.hpp"
#include "shoesplat/splat_ply.hpp"
#include "shoesplat/util.hpp"

namespace shoesplat::synth {

using geom::Vec3;
using geom::Vec4;

void SynthConfig::validate() const {
  if (n_gaussians < 1) fail(ErrorKind::ConfigError, "n_gaussians must be >= 1");
  if (n_views < 2) fail(ErrorKind::ConfigError, "n_views must be >= 2");
  if (width < 1 || height < 1) fail(ErrorKind::ConfigError, "image size must be positive");
  if (!(focal > 0.0)) fail(ErrorKind::ConfigError, "focal must be positive");
  if (!(camera_radius > 1.0)) fail(ErrorKind::ConfigError, "camera_radius must exceed 1");
  if (points_per_gaussian < 1) fail(ErrorKind::ConfigError, "points_per_gaussian must be >= 1");
  if (!(mask_threshold > 0.0 && mask_threshold < 1.0)) {
    fail(ErrorKind::ConfigError, "mask_threshold must be in (0, 1)");
  }
}

namespace {

std::string view_name(int i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "view_%03d.png", i);
  return buf;
}

}  // namespace

SynthScene generate(const SynthConfig& config) {
  config.validate();
  Rng rng(config.seed);
  SynthScene scene;

  // Ground truth: a shoe-like elongated blob, view-independent colours.
  auto& gt = scene.ground_truth;
  gt.sh_degree = 0;
  const Vec3 half_size(0.55, 0.25, 0.2);
  for (int i = 0; i < config.n_gaussians; ++i) {
    gs::Gaussian g;
    for (int d = 0; d < 3; ++d) g.mean[d] = rng.uniform(-half_size[d], half_size[d]);
    for (int d = 0; d < 3; ++d) g.log_scale[d] = std::log(rng.uniform(0.05, 0.14));
    Vec4 q(rng.normal(), rng.normal(), rng.normal(), rng.normal());
    g.rotation = q.normalized();
    g.opacity_logit = gs::logit(rng.uniform(0.6, 0.95));
    const Vec3 rgb(rng.uniform(0.15, 0.95), rng.uniform(0.15, 0.95), rng.uniform(0.15, 0.95));
    const Vec3 dc = gs::rgb_to_dc(rgb);
    for (int c = 0; c < 3; ++c) g.sh[c] = dc[c];
    gt.gaussians.push_back(g);
  }

  // Cameras on three rings looking at the origin.
  auto& rec = scene.reconstruction;
  colmap::CameraIntrinsics intr;
  intr.camera_id = 1;
  intr.model = colmap::CameraModel::Pinhole;
  intr.width = static_cast<std::uint64_t>(config.width);
  intr.height = static_cast<std::uint64_t>(config.height);
  intr.params = {config.focal, config.focal, 0.5 * config.width, 0.5 * config.height};
  rec.cameras[1] = intr;

  const double elevations[] = {-0.25, 0.3, 0.8};
  std::vector<geom::PinholeCamera> cams;
  for (int i = 0; i < config.n_views; ++i) {
    const int ring = i % 3;
    const double az = 2.0 * std::numbers::pi * i / config.n_views + 0.4 * ring;
    const double el = elevations[ring];
    const Vec3 eye = config.camera_radius *
                     Vec3(std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el));
    const auto pose = geom::look_at(eye, Vec3::Zero(), Vec3(0, 0, 1));
    colmap::ViewPose vp;
    vp.image_id = static_cast<std::uint32_t>(i + 1);
    vp.rotation = geom::rotmat_to_quat(pose.rotation);
    vp.translation = pose.translation;
    vp.camera_id = 1;
    vp.image_name = view_name(i);
    rec.poses[vp.image_id] = vp;
    cams.push_back(geom::PinholeCamera::from_colmap(intr, vp));
  }

  // Sparse points drawn from each Gaussian, observed wherever they project.
  std::uint64_t next_id = 1;
  for (const auto& g : gt.gaussians) {
    const geom::Mat3 r = geom::quat_to_rotmat(g.rotation);
    const Vec3 s = g.scale();
    const Vec3 rgb = gs::dc_color(g);
    for (int k = 0; k < config.points_per_gaussian; ++k) {
      const Vec3 z(rng.normal(), rng.normal(), rng.normal());
      colmap::SparsePoint pt;
      pt.point3d_id = next_id++;
      pt.position = g.mean + r * s.cwiseProduct(z);
      for (int c = 0; c < 3; ++c) pt.color[c] = to_u8(rgb[c]);
      pt.reprojection_error = 0.0;
      for (int v = 0; v < config.n_views; ++v) {
        const Vec3 pc = cams[v].pose.apply(pt.position);
        if (pc.z() <= cams[v].near_plane) continue;
        const auto px = geom::project(cams[v], pc).pixel;
        if (px.x() < 0 || px.y() < 0 || px.x() >= config.width || px.y() >= config.height) continue;
        auto& pose = rec.poses[static_cast<std::uint32_t>(v + 1)];
        pt.track.push_back({pose.image_id, static_cast<std::uint32_t>(pose.observations.size())});
        pose.observations.push_back({px.x(), px.y(), static_cast<std::int64_t>(pt.point3d_id)});
      }
      if (!pt.track.empty()) rec.points[pt.point3d_id] = pt;
    }
  }

  for (int v = 0; v < config.n_views; ++v) {
    const auto out = raster::render(gt, cams[v], Vec3::Zero());
    View view;
    view.id = view_name(v);
    view.image = to_float(to_u8(out.color));
    view.mask = MaskBuffer(config.width, config.height, 1);
    for (size_t i = 0; i < out.alpha.size(); ++i) {
      view.mask.data()[i] = out.alpha[i] >= config.mask_threshold ? 1.0 : 0.0;
    }
    view.camera = cams[v];
    scene.views.push_back(std::move(view));
  }
  return scene;
}

void write_scene(const SynthScene& scene, const std::filesystem::path& out_dir) {
  colmap::write_reconstruction(scene.reconstruction, out_dir / "sparse" / "0");
  for (const auto& v : scene.views) {
    write_png(out_dir / "images" / v.id, to_u8(v.image));
    write_png(out_dir / "masks" / v.id, mask_to_u8(v.mask));
  }
  gs::save_cloud(scene.ground_truth, out_dir / "gt_cloud.ply");
}

}  // namespace shoesplat::synth
