#pragma once

#include <Eigen/Core>

#include "shoesplat/colmap_io.hpp"

namespace shoesplat::geom {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat3 = Eigen::Matrix3d;
using Mat23 = Eigen::Matrix<double, 2, 3>;

inline constexpr double kDefaultNearPlane = 0.01;

/// Rotation matrix of a unit quaternion stored as (w, x, y, z).
Mat3 quat_to_rotmat(const Vec4& q);
/// Inverse of quat_to_rotmat for proper rotations; returns w >= 0.
Vec4 rotmat_to_quat(const Mat3& r);

/// World-to-camera rigid motion: p_cam = rotation * p_world + translation.
struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static RigidTransform from_pose(const colmap::ViewPose& pose);

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  RigidTransform inverse() const;
  /// (this * other)(p) == this(other(p))
  RigidTransform compose(const RigidTransform& other) const;
  /// Camera centre in world coordinates when this maps world to camera.
  Vec3 center() const { return -rotation.transpose() * translation; }
};

Vec3 world_to_camera(const RigidTransform& t, const Vec3& p);

struct ProjectedPoint {
  Vec2 pixel;
  double depth;
};

/// Undistorted pinhole camera. `width` is the column count (M) and `height`
/// the row count (N) of the images it produces. Pixel (col, row) covers
/// [col, col+1) x [row, row+1), so its centre sits at (col+0.5, row+0.5).
struct PinholeCamera {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;
  RigidTransform pose;
  double near_plane = kDefaultNearPlane;

  /// Radial distortion in the intrinsics is ignored; inputs are treated as
  /// undistorted images.
  static PinholeCamera from_colmap(const colmap::CameraIntrinsics& intrinsics,
                                   const colmap::ViewPose& pose);

  Vec3 center() const { return pose.center(); }
};

/// Throws BehindCamera when p_cam.z <= near plane.
ProjectedPoint project(const PinholeCamera& cam, const Vec3& p_cam);

/// d(pixel)/d(p_cam) of the perspective projection.
Mat23 projection_jacobian(const PinholeCamera& cam, const Vec3& p_cam);

/// Camera looking from `eye` toward `target` with the image y axis pointing
/// roughly along -`up`.
RigidTransform look_at(const Vec3& eye, const Vec3& target, const Vec3& up);

}  // namespace shoesplat::geom
