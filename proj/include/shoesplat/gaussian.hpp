#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "shoesplat/colmap_io.hpp"
#include "shoesplat/geometry.hpp"

namespace shoesplat::gs {

using geom::Mat2;
using geom::Mat3;
using geom::Vec2;
using geom::Vec3;
using geom::Vec4;

inline constexpr int kMaxShDegree = 3;
inline constexpr int kMaxShCoeffs = (kMaxShDegree + 1) * (kMaxShDegree + 1);
inline constexpr double kShC0 = 0.28209479177387814;
/// Added to the projected 2D covariance diagonal (px^2).
inline constexpr double kCovarianceFloor = 0.3;
/// Splat support: Mahalanobis radius of the screen ellipse.
inline constexpr double kSupportSigma = 3.0;

constexpr int sh_coeff_count(int degree) { return (degree + 1) * (degree + 1); }

double sigmoid(double x);
double logit(double p);

/// One anisotropic Gaussian. Scales live in the log domain and opacity in the
/// logit domain so unconstrained updates keep them valid.
struct Gaussian {
  Vec3 mean = Vec3::Zero();
  Vec3 log_scale = Vec3::Zero();
  Vec4 rotation{1.0, 0.0, 0.0, 0.0};  // (w, x, y, z), normalised on use
  double opacity_logit = 0.0;
  /// Spherical-harmonic colour coefficients, term-major: sh[term * 3 + channel].
  std::array<double, kMaxShCoeffs * 3> sh{};

  double opacity() const { return sigmoid(opacity_logit); }
  Vec3 scale() const { return log_scale.array().exp(); }
  double& sh_at(int term, int channel) { return sh[term * 3 + channel]; }
  double sh_at(int term, int channel) const { return sh[term * 3 + channel]; }

  friend bool operator==(const Gaussian&, const Gaussian&) = default;
};

struct GaussianCloud {
  std::vector<Gaussian> gaussians;
  int sh_degree = kMaxShDegree;

  size_t size() const { return gaussians.size(); }
  bool empty() const { return gaussians.empty(); }

  friend bool operator==(const GaussianCloud&, const GaussianCloud&) = default;
};

/// Sigma = R diag(exp(2 log_scale)) R^T with R from the normalised quaternion.
Mat3 covariance3d(const Gaussian& g);

struct ProjectedGaussian {
  Vec2 mean2d;
  Mat2 cov2d;    // includes the anti-aliasing floor
  Vec3 conic;    // (a, b, c) of cov2d^-1 = [[a, b], [b, c]]
  double depth;
  Vec3 rgb;
  double alpha;
  // Half extents of the axis-aligned box around the support ellipse.
  double extent_x;
  double extent_y;
};

/// Affine (EWA) projection of a Gaussian into `cam`. Returns nullopt when the
/// mean is not beyond the near plane or the support ellipse misses the image.
std::optional<ProjectedGaussian> project_gaussian(const Gaussian& g, int sh_degree,
                                                  const geom::PinholeCamera& cam);

/// Real spherical-harmonic basis up to `degree`, evaluated at a unit direction.
std::array<double, kMaxShCoeffs> sh_basis(const Vec3& dir, int degree);

/// d basis / d dir, one row per direction component (x, y, z), treating the
/// components as independent.
std::array<std::array<double, kMaxShCoeffs>, 3> sh_basis_jacobian(const Vec3& dir, int degree);

/// rgb = clamp(0.5 + sum_lm c_lm Y_lm(dir), 0, 1) per channel.
Vec3 sh_to_rgb(std::span<const double> sh, const Vec3& view_dir, int degree);
inline Vec3 sh_to_rgb(const Gaussian& g, const Vec3& view_dir, int degree) {
  return sh_to_rgb(std::span<const double>(g.sh), view_dir, degree);
}
/// View-independent (DC) colour.
Vec3 dc_color(const Gaussian& g);
/// DC coefficient reproducing `rgb` (in [0,1]) under sh_to_rgb.
Vec3 rgb_to_dc(const Vec3& rgb);

struct InitConfig {
  int sh_degree = kMaxShDegree;
  double initial_opacity = 0.1;
  int neighbors = 3;
  double min_scale = 1e-4;
};

/// Diagonal of the bounding box of the points, the largest admissible initial
/// scale. Falls back to 1 for a single point.
double scene_extent(std::span<const Vec3> positions);

/// One isotropic Gaussian per sparse point. Initial scale is the mean distance
/// to the nearest `neighbors` points, clamped to [min_scale, scene extent].
GaussianCloud init_from_points(const colmap::PointMap& points, const InitConfig& config = {});

}  // namespace shoesplat::gs
