#include "shoesplat/gaussian.hpp"

#include <algorithm>
#include <cmath>

#include "shoesplat/spatial.hpp"

namespace shoesplat::gs {

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double logit(double p) { return std::log(p / (1.0 - p)); }

Mat3 covariance3d(const Gaussian& g) {
  const Mat3 r = geom::quat_to_rotmat(g.rotation.normalized());
  const Vec3 var = (2.0 * g.log_scale).array().exp();
  return r * var.asDiagonal() * r.transpose();
}

std::array<double, kMaxShCoeffs> sh_basis(const Vec3& dir, int degree) {
  // Real SH with the Condon-Shortley phase, ordered m = -l..l per band.
  constexpr double c1 = 0.4886025119029199;
  constexpr double c2[] = {1.0925484305920792, -1.0925484305920792, 0.31539156525252005,
                           -1.0925484305920792, 0.5462742152960396};
  constexpr double c3[] = {-0.5900435899266435, 2.890611442640554, -0.4570457994644658,
                           0.3731763325901154, -0.4570457994644658, 1.445305721320277,
                           -0.5900435899266435};
  std::array<double, kMaxShCoeffs> y{};
  y[0] = kShC0;
  if (degree < 1) return y;
  const double x = dir.x(), yy_ = dir.y(), z = dir.z();
  y[1] = -c1 * yy_;
  y[2] = c1 * z;
  y[3] = -c1 * x;
  if (degree < 2) return y;
  const double xx = x * x, yy = yy_ * yy_, zz = z * z;
  const double xy = x * yy_, yz = yy_ * z, xz = x * z;
  y[4] = c2[0] * xy;
  y[5] = c2[1] * yz;
  y[6] = c2[2] * (2.0 * zz - xx - yy);
  y[7] = c2[3] * xz;
  y[8] = c2[4] * (xx - yy);
  if (degree < 3) return y;
  y[9] = c3[0] * yy_ * (3.0 * xx - yy);
  y[10] = c3[1] * xy * z;
  y[11] = c3[2] * yy_ * (4.0 * zz - xx - yy);
  y[12] = c3[3] * z * (2.0 * zz - 3.0 * xx - 3.0 * yy);
  y[13] = c3[4] * x * (4.0 * zz - xx - yy);
  y[14] = c3[5] * z * (xx - yy);
  y[15] = c3[6] * x * (xx - 3.0 * yy);
  return y;
}

std::array<std::array<double, kMaxShCoeffs>, 3> sh_basis_jacobian(const Vec3& dir, int degree) {
  constexpr double c1 = 0.4886025119029199;
  constexpr double c2[] = {1.0925484305920792, -1.0925484305920792, 0.31539156525252005,
                           -1.0925484305920792, 0.5462742152960396};
  constexpr double c3[] = {-0.5900435899266435, 2.890611442640554, -0.4570457994644658,
                           0.3731763325901154, -0.4570457994644658, 1.445305721320277,
                           -0.5900435899266435};
  std::array<std::array<double, kMaxShCoeffs>, 3> d{};
  auto& dx = d[0];
  auto& dy = d[1];
  auto& dz = d[2];
  if (degree < 1) return d;
  const double x = dir.x(), y = dir.y(), z = dir.z();
  dy[1] = -c1;
  dz[2] = c1;
  dx[3] = -c1;
  if (degree < 2) return d;
  const double xx = x * x, yy = y * y, zz = z * z;
  dx[4] = c2[0] * y;
  dy[4] = c2[0] * x;
  dy[5] = c2[1] * z;
  dz[5] = c2[1] * y;
  dx[6] = -2.0 * c2[2] * x;
  dy[6] = -2.0 * c2[2] * y;
  dz[6] = 4.0 * c2[2] * z;
  dx[7] = c2[3] * z;
  dz[7] = c2[3] * x;
  dx[8] = 2.0 * c2[4] * x;
  dy[8] = -2.0 * c2[4] * y;
  if (degree < 3) return d;
  dx[9] = 6.0 * c3[0] * x * y;
  dy[9] = c3[0] * (3.0 * xx - 3.0 * yy);
  dx[10] = c3[1] * y * z;
  dy[10] = c3[1] * x * z;
  dz[10] = c3[1] * x * y;
  dx[11] = -2.0 * c3[2] * x * y;
  dy[11] = c3[2] * (4.0 * zz - xx - 3.0 * yy);
  dz[11] = 8.0 * c3[2] * y * z;
  dx[12] = -6.0 * c3[3] * x * z;
  dy[12] = -6.0 * c3[3] * y * z;
  dz[12] = c3[3] * (6.0 * zz - 3.0 * xx - 3.0 * yy);
  dx[13] = c3[4] * (4.0 * zz - 3.0 * xx - yy);
  dy[13] = -2.0 * c3[4] * x * y;
  dz[13] = 8.0 * c3[4] * x * z;
  dx[14] = 2.0 * c3[5] * x * z;
  dy[14] = -2.0 * c3[5] * y * z;
  dz[14] = c3[5] * (xx - yy);
  dx[15] = c3[6] * (3.0 * xx - 3.0 * yy);
  dy[15] = -6.0 * c3[6] * x * y;
  return d;
}

Vec3 sh_to_rgb(std::span<const double> sh, const Vec3& view_dir, int degree) {
  const auto basis = sh_basis(view_dir, degree);
  const int n = sh_coeff_count(degree);
  Vec3 rgb = Vec3::Constant(0.5);
  for (int k = 0; k < n; ++k) {
    for (int c = 0; c < 3; ++c) rgb[c] += basis[k] * sh[k * 3 + c];
  }
  return rgb.cwiseMax(0.0).cwiseMin(1.0);
}

Vec3 dc_color(const Gaussian& g) {
  return (Vec3(g.sh[0], g.sh[1], g.sh[2]) * kShC0 + Vec3::Constant(0.5)).cwiseMax(0.0).cwiseMin(1.0);
}

Vec3 rgb_to_dc(const Vec3& rgb) { return (rgb - Vec3::Constant(0.5)) / kShC0; }

std::optional<ProjectedGaussian> project_gaussian(const Gaussian& g, int sh_degree,
                                                  const geom::PinholeCamera& cam) {
  const Vec3 p_cam = cam.pose.apply(g.mean);
  if (!(p_cam.z() > cam.near_plane)) return std::nullopt;

  const auto j = geom::projection_jacobian(cam, p_cam);
  const Eigen::Matrix<double, 2, 3> t = j * cam.pose.rotation;
  Mat2 cov = t * covariance3d(g) * t.transpose();
  cov(0, 1) = cov(1, 0) = 0.5 * (cov(0, 1) + cov(1, 0));
  cov(0, 0) += kCovarianceFloor;
  cov(1, 1) += kCovarianceFloor;

  const double det = cov(0, 0) * cov(1, 1) - cov(0, 1) * cov(0, 1);
  if (!(det > 0.0)) return std::nullopt;

  ProjectedGaussian out;
  out.mean2d = geom::project(cam, p_cam).pixel;
  out.cov2d = cov;
  const double inv_det = 1.0 / det;
  out.conic = Vec3(cov(1, 1) * inv_det, -cov(0, 1) * inv_det, cov(0, 0) * inv_det);
  out.depth = p_cam.z();
  out.extent_x = kSupportSigma * std::sqrt(cov(0, 0));
  out.extent_y = kSupportSigma * std::sqrt(cov(1, 1));
  if (out.mean2d.x() + out.extent_x < 0.0 || out.mean2d.x() - out.extent_x > cam.width ||
      out.mean2d.y() + out.extent_y < 0.0 || out.mean2d.y() - out.extent_y > cam.height) {
    return std::nullopt;
  }
  const Vec3 dir = (g.mean - cam.center()).normalized();
  out.rgb = sh_to_rgb(g, dir, sh_degree);
  out.alpha = g.opacity();
  return out;
}

double scene_extent(std::span<const Vec3> positions) {
  if (positions.size() < 2) return 1.0;
  Vec3 lo = positions[0], hi = positions[0];
  for (const auto& p : positions) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double d = (hi - lo).norm();
  return d > 0.0 ? d : 1.0;
}

GaussianCloud init_from_points(const colmap::PointMap& points, const InitConfig& config) {
  if (points.empty()) fail(ErrorKind::EmptyPointCloud, "cannot initialise from an empty point cloud");
  if (config.sh_degree < 0 || config.sh_degree > kMaxShDegree) {
    fail(ErrorKind::InvalidArgument, "sh_degree must be in [0, 3]");
  }

  std::vector<Vec3> positions;
  positions.reserve(points.size());
  for (const auto& [id, pt] : points) positions.push_back(pt.position);
  const double extent = scene_extent(positions);
  const KdTree tree(positions);

  GaussianCloud cloud;
  cloud.sh_degree = config.sh_degree;
  cloud.gaussians.reserve(points.size());
  size_t i = 0;
  for (const auto& [id, pt] : points) {
    const auto nn = tree.nearest(pt.position, static_cast<size_t>(config.neighbors),
                                 static_cast<std::int64_t>(i));
    double scale = 0.01 * extent;  // lone point: no neighbour distance to use
    if (!nn.empty()) {
      double sum = 0.0;
      for (const auto& n : nn) sum += std::sqrt(n.squared_distance);
      scale = sum / static_cast<double>(nn.size());
    }
    scale = std::clamp(scale, config.min_scale, std::max(extent, config.min_scale));

    Gaussian g;
    g.mean = pt.position;
    g.log_scale = Vec3::Constant(std::log(scale));
    g.opacity_logit = logit(config.initial_opacity);
    const Vec3 rgb(pt.color[0] / 255.0, pt.color[1] / 255.0, pt.color[2] / 255.0);
    const Vec3 dc = rgb_to_dc(rgb);
    for (int c = 0; c < 3; ++c) g.sh[c] = dc[c];
    cloud.gaussians.push_back(g);
    ++i;
  }
  return cloud;
}

}  // namespace shoesplat::gs
