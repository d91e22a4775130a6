#include "shoesplat/rasterizer.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>

#include "shoesplat/image_io.hpp"
#include "shoesplat/util.hpp"

namespace shoesplat::raster {

using geom::Mat2;
using geom::Mat23;
using geom::Mat3;

ParamGradients::ParamGradients(size_t n)
    : means(n, Vec3::Zero()), log_scales(n, Vec3::Zero()), rotations(n, Vec4::Zero()),
      opacity_logits(n, 0.0), sh(n, std::array<double, gs::kMaxShCoeffs * 3>{}),
      mean2d(n, Vec2::Zero()), visible(n, 0) {}

std::vector<Splat> project_and_sort(const gs::GaussianCloud& cloud, const geom::PinholeCamera& cam) {
  std::vector<Splat> splats;
  splats.reserve(cloud.size());
  for (size_t i = 0; i < cloud.size(); ++i) {
    if (auto p = gs::project_gaussian(cloud.gaussians[i], cloud.sh_degree, cam)) {
      splats.push_back({*p, static_cast<std::uint32_t>(i)});
    }
  }
  std::sort(splats.begin(), splats.end(), [](const Splat& a, const Splat& b) {
    if (a.proj.depth != b.proj.depth) return a.proj.depth < b.proj.depth;
    return a.index < b.index;
  });
  return splats;
}

TileBins tile_bin(std::span<const Splat> splats, int width, int height, int tile) {
  if (tile <= 0) fail(ErrorKind::InvalidArgument, "tile size must be positive");
  TileBins bins;
  bins.tiles_x = (width + tile - 1) / tile;
  bins.tiles_y = (height + tile - 1) / tile;
  bins.lists.resize(static_cast<size_t>(bins.tiles_x) * bins.tiles_y);
  for (size_t k = 0; k < splats.size(); ++k) {
    const auto& p = splats[k].proj;
    const double x0 = p.mean2d.x() - p.extent_x, x1 = p.mean2d.x() + p.extent_x;
    const double y0 = p.mean2d.y() - p.extent_y, y1 = p.mean2d.y() + p.extent_y;
    if (x1 < 0.0 || y1 < 0.0 || x0 >= width || y0 >= height) continue;
    const int tx0 = std::max(0, static_cast<int>(std::floor(x0 / tile)));
    const int ty0 = std::max(0, static_cast<int>(std::floor(y0 / tile)));
    const int tx1 = std::min(bins.tiles_x - 1, static_cast<int>(std::floor(x1 / tile)));
    const int ty1 = std::min(bins.tiles_y - 1, static_cast<int>(std::floor(y1 / tile)));
    for (int ty = ty0; ty <= ty1; ++ty) {
      for (int tx = tx0; tx <= tx1; ++tx) {
        bins.lists[static_cast<size_t>(ty) * bins.tiles_x + tx].push_back(static_cast<std::uint32_t>(k));
      }
    }
  }
  return bins;
}

namespace {

// Splat weight a' at pixel centre (px, py); false outside the support.
inline bool splat_weight(const gs::ProjectedGaussian& p, double px, double py, double& dx,
                         double& dy, double& g, double& a) {
  dx = px - p.mean2d.x();
  dy = py - p.mean2d.y();
  const double power = p.conic[0] * dx * dx + 2.0 * p.conic[1] * dx * dy + p.conic[2] * dy * dy;
  if (!(power <= kSupportMahalanobis2)) return false;
  g = std::exp(-0.5 * power);
  a = p.alpha * g;
  return true;
}

struct ScreenGrad {
  Vec2 mean2d = Vec2::Zero();
  Vec3 conic = Vec3::Zero();
  Vec3 rgb = Vec3::Zero();
  double alpha = 0.0;
};

// Pixel range [x0, x1) x [y0, y1) of a tile.
struct TileRect {
  int x0, y0, x1, y1;
};

TileRect tile_rect(const TileBins& bins, size_t t, int tile, int width, int height) {
  const int tx = static_cast<int>(t % bins.tiles_x);
  const int ty = static_cast<int>(t / bins.tiles_x);
  return {tx * tile, ty * tile, std::min(width, (tx + 1) * tile), std::min(height, (ty + 1) * tile)};
}

void check_camera(const geom::PinholeCamera& cam) {
  if (cam.width <= 0 || cam.height <= 0) {
    fail(ErrorKind::InvalidCamera, "camera image size must be positive");
  }
}

}  // namespace

RenderOutput render(const gs::GaussianCloud& cloud, const geom::PinholeCamera& cam,
                    const Vec3& background, const RenderOptions& options) {
  check_camera(cam);
  const int w = cam.width, h = cam.height;
  RenderOutput out;
  out.color = ImageF(w, h, 3);
  out.alpha.assign(static_cast<size_t>(w) * h, 0.0);
  out.splat_count.assign(static_cast<size_t>(w) * h, 0);

  const auto splats = project_and_sort(cloud, cam);
  const auto bins = tile_bin(splats, w, h, options.tile_size);

  parallel_for(bins.lists.size(), options.threads, [&](size_t t) {
    const auto& list = bins.lists[t];
    const TileRect r = tile_rect(bins, t, options.tile_size, w, h);
    for (int y = r.y0; y < r.y1; ++y) {
      for (int x = r.x0; x < r.x1; ++x) {
        const double px = x + 0.5, py = y + 0.5;
        double tr = 1.0;
        Vec3 c = Vec3::Zero();
        std::uint32_t count = 0;
        for (const std::uint32_t k : list) {
          const auto& p = splats[k].proj;
          double dx, dy, g, a;
          if (!splat_weight(p, px, py, dx, dy, g, a)) continue;
          c += p.rgb * (a * tr);
          tr *= 1.0 - a;
          ++count;
          if (tr < kTransmittanceCutoff) break;
        }
        c += background * tr;
        const size_t idx = static_cast<size_t>(y) * w + x;
        for (int ch = 0; ch < 3; ++ch) out.color.at(x, y, ch) = c[ch];
        out.alpha[idx] = 1.0 - tr;
        out.splat_count[idx] = count;
      }
    }
  });
  return out;
}

namespace {

// Chains screen-space gradients of one splat back to its 3D parameters.
void backward_gaussian(const gs::Gaussian& gauss, int sh_degree, const geom::PinholeCamera& cam,
                       const ScreenGrad& sg, ParamGradients& out, size_t i) {
  const Mat3& w = cam.pose.rotation;
  const Vec3 p_cam = cam.pose.apply(gauss.mean);
  const double x = p_cam.x(), y = p_cam.y(), z = p_cam.z();
  const Mat23 j = geom::projection_jacobian(cam, p_cam);
  const Mat23 t = j * w;

  const Vec4 q = gauss.rotation;
  const double qnorm = q.norm();
  const Vec4 qn = q / qnorm;
  const Mat3 rot = geom::quat_to_rotmat(qn);
  const Vec3 s = gauss.log_scale.array().exp();
  const Mat3 m = rot * s.asDiagonal();
  const Mat3 sigma = m * m.transpose();

  Mat2 cov = t * sigma * t.transpose();
  cov(0, 1) = cov(1, 0) = 0.5 * (cov(0, 1) + cov(1, 0));
  cov(0, 0) += gs::kCovarianceFloor;
  cov(1, 1) += gs::kCovarianceFloor;
  const Mat2 conic = cov.inverse();

  // conic -> cov2d
  Mat2 gq;
  gq << sg.conic[0], 0.5 * sg.conic[1], 0.5 * sg.conic[1], sg.conic[2];
  const Mat2 gcov = -conic * gq * conic;

  // cov2d = T Sigma T^T
  const Mat3 gsigma = t.transpose() * gcov * t;
  const Mat23 gt = 2.0 * gcov * t * sigma;
  const Mat23 gj = gt * w.transpose();

  Vec3 gp_cam = j.transpose() * sg.mean2d;
  const double iz2 = 1.0 / (z * z), iz3 = iz2 / z;
  gp_cam.x() += gj(0, 2) * (-cam.fx * iz2);
  gp_cam.y() += gj(1, 2) * (-cam.fy * iz2);
  gp_cam.z() += gj(0, 0) * (-cam.fx * iz2) + gj(0, 2) * (2.0 * cam.fx * x * iz3) +
                gj(1, 1) * (-cam.fy * iz2) + gj(1, 2) * (2.0 * cam.fy * y * iz3);
  Vec3 gmean = w.transpose() * gp_cam;

  // Sigma = M M^T, M = R S
  const Mat3 gm = 2.0 * gsigma * m;
  Vec3 glog_s;
  for (int k = 0; k < 3; ++k) glog_s[k] = gm.col(k).dot(rot.col(k)) * s[k];
  const Mat3 gr = gm * s.asDiagonal();

  const double qw = qn[0], qx = qn[1], qy = qn[2], qz = qn[3];
  Vec4 gqn;
  gqn[0] = 2.0 * (-gr(0, 1) * qz + gr(0, 2) * qy + gr(1, 0) * qz - gr(1, 2) * qx -
                  gr(2, 0) * qy + gr(2, 1) * qx);
  gqn[1] = 2.0 * (gr(0, 1) * qy + gr(0, 2) * qz + gr(1, 0) * qy - gr(1, 2) * qw +
                  gr(2, 0) * qz + gr(2, 1) * qw) -
           4.0 * qx * (gr(1, 1) + gr(2, 2));
  gqn[2] = 2.0 * (gr(0, 1) * qx + gr(0, 2) * qw + gr(1, 0) * qx + gr(1, 2) * qz -
                  gr(2, 0) * qw + gr(2, 1) * qz) -
           4.0 * qy * (gr(0, 0) + gr(2, 2));
  gqn[3] = 2.0 * (-gr(0, 1) * qw + gr(0, 2) * qx + gr(1, 0) * qw + gr(1, 2) * qy +
                  gr(2, 0) * qx + gr(2, 1) * qy) -
           4.0 * qz * (gr(0, 0) + gr(1, 1));
  const Vec4 gquat = (gqn - qn * qn.dot(gqn)) / qnorm;

  // Colour from SH at the view direction.
  const Vec3 v = gauss.mean - cam.center();
  const double vnorm = v.norm();
  const Vec3 dir = v / vnorm;
  const int n = gs::sh_coeff_count(sh_degree);
  const auto basis = gs::sh_basis(dir, sh_degree);
  Vec3 raw = Vec3::Constant(0.5);
  for (int k = 0; k < n; ++k) {
    for (int c = 0; c < 3; ++c) raw[c] += basis[k] * gauss.sh[k * 3 + c];
  }
  Vec3 grgb = sg.rgb;
  for (int c = 0; c < 3; ++c) {
    if (raw[c] < 0.0 || raw[c] > 1.0) grgb[c] = 0.0;
  }
  auto& gsh = out.sh[i];
  for (int k = 0; k < n; ++k) {
    for (int c = 0; c < 3; ++c) gsh[k * 3 + c] = basis[k] * grgb[c];
  }
  if (sh_degree > 0) {
    const auto db = gs::sh_basis_jacobian(dir, sh_degree);
    Vec3 gdir = Vec3::Zero();
    for (int a = 0; a < 3; ++a) {
      for (int k = 1; k < n; ++k) {
        double acc = 0.0;
        for (int c = 0; c < 3; ++c) acc += grgb[c] * gauss.sh[k * 3 + c];
        gdir[a] += acc * db[a][k];
      }
    }
    gmean += (gdir - dir * dir.dot(gdir)) / vnorm;
  }

  const double alpha = gauss.opacity();
  out.means[i] = gmean;
  out.log_scales[i] = glog_s;
  out.rotations[i] = gquat;
  out.opacity_logits[i] = sg.alpha * alpha * (1.0 - alpha);
  out.mean2d[i] = sg.mean2d;
  out.visible[i] = 1;
}

}  // namespace

ParamGradients render_backward(const gs::GaussianCloud& cloud, const geom::PinholeCamera& cam,
                               const Vec3& background, const ImageF& upstream,
                               const RenderOptions& options) {
  check_camera(cam);
  const int w = cam.width, h = cam.height;
  if (upstream.width() != w || upstream.height() != h || upstream.channels() != 3) {
    fail(ErrorKind::DimensionMismatch, "upstream gradient does not match the camera image size");
  }
  ParamGradients out(cloud.size());
  const auto splats = project_and_sort(cloud, cam);
  for (const auto& s : splats) out.visible[s.index] = 1;
  const auto bins = tile_bin(splats, w, h, options.tile_size);

  // Per tile, gradients indexed by position in the tile list.
  std::vector<std::vector<ScreenGrad>> tile_grads(bins.lists.size());
  parallel_for(bins.lists.size(), options.threads, [&](size_t t) {
    const auto& list = bins.lists[t];
    if (list.empty()) return;
    auto& grads = tile_grads[t];
    grads.assign(list.size(), ScreenGrad{});
    struct Hit {
      size_t slot;
      double dx, dy, g, a, t;
    };
    std::vector<Hit> hits;
    const TileRect r = tile_rect(bins, t, options.tile_size, w, h);
    for (int y = r.y0; y < r.y1; ++y) {
      for (int x = r.x0; x < r.x1; ++x) {
        const Vec3 dl(upstream.at(x, y, 0), upstream.at(x, y, 1), upstream.at(x, y, 2));
        if (dl.isZero(0.0)) continue;
        const double px = x + 0.5, py = y + 0.5;
        hits.clear();
        double tr = 1.0;
        for (size_t slot = 0; slot < list.size(); ++slot) {
          const auto& p = splats[list[slot]].proj;
          double dx, dy, g, a;
          if (!splat_weight(p, px, py, dx, dy, g, a)) continue;
          hits.push_back({slot, dx, dy, g, a, tr});
          tr *= 1.0 - a;
          if (tr < kTransmittanceCutoff) break;
        }
        // Colour of everything behind the current splat, background included.
        Vec3 behind = background;
        for (size_t hi = hits.size(); hi-- > 0;) {
          const Hit& hit = hits[hi];
          const auto& p = splats[list[hit.slot]].proj;
          ScreenGrad& sg = grads[hit.slot];
          sg.rgb += dl * (hit.a * hit.t);
          const double ga = hit.t * dl.dot(p.rgb - behind);
          behind = p.rgb * hit.a + behind * (1.0 - hit.a);
          sg.alpha += ga * hit.g;
          const double gpow = -0.5 * ga * hit.a;
          sg.conic[0] += gpow * hit.dx * hit.dx;
          sg.conic[1] += gpow * 2.0 * hit.dx * hit.dy;
          sg.conic[2] += gpow * hit.dy * hit.dy;
          sg.mean2d.x() -= gpow * 2.0 * (p.conic[0] * hit.dx + p.conic[1] * hit.dy);
          sg.mean2d.y() -= gpow * 2.0 * (p.conic[1] * hit.dx + p.conic[2] * hit.dy);
        }
      }
    }
  });

  // Reduce in tile order so the sum does not depend on scheduling.
  std::vector<ScreenGrad> screen(splats.size());
  for (size_t t = 0; t < bins.lists.size(); ++t) {
    const auto& list = bins.lists[t];
    const auto& grads = tile_grads[t];
    for (size_t slot = 0; slot < grads.size(); ++slot) {
      ScreenGrad& dst = screen[list[slot]];
      dst.mean2d += grads[slot].mean2d;
      dst.conic += grads[slot].conic;
      dst.rgb += grads[slot].rgb;
      dst.alpha += grads[slot].alpha;
    }
  }

  parallel_for(splats.size(), options.threads, [&](size_t k) {
    backward_gaussian(cloud.gaussians[splats[k].index], cloud.sh_degree, cam, screen[k], out,
                      splats[k].index);
  });
  return out;
}

void dump_png(const RenderOutput& out, const std::filesystem::path& path) {
  write_png(path, to_u8(out.color));
}

}  // namespace shoesplat::raster
