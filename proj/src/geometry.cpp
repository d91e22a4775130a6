#include "shoesplat/geometry.hpp"

#include <cmath>

#include <Eigen/Geometry>

namespace shoesplat::geom {

Mat3 quat_to_rotmat(const Vec4& q) {
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  Mat3 r;
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return r;
}

Vec4 rotmat_to_quat(const Mat3& r) {
  // Shepperd's method: pivot on the largest of the four squared components.
  const double trace = r.trace();
  Vec4 q;
  if (trace > r(0, 0) && trace > r(1, 1) && trace > r(2, 2)) {
    const double s = std::sqrt(1.0 + trace) * 2.0;
    q << 0.25 * s, (r(2, 1) - r(1, 2)) / s, (r(0, 2) - r(2, 0)) / s, (r(1, 0) - r(0, 1)) / s;
  } else if (r(0, 0) > r(1, 1) && r(0, 0) > r(2, 2)) {
    const double s = std::sqrt(1.0 + r(0, 0) - r(1, 1) - r(2, 2)) * 2.0;
    q << (r(2, 1) - r(1, 2)) / s, 0.25 * s, (r(0, 1) + r(1, 0)) / s, (r(0, 2) + r(2, 0)) / s;
  } else if (r(1, 1) > r(2, 2)) {
    const double s = std::sqrt(1.0 + r(1, 1) - r(0, 0) - r(2, 2)) * 2.0;
    q << (r(0, 2) - r(2, 0)) / s, (r(0, 1) + r(1, 0)) / s, 0.25 * s, (r(1, 2) + r(2, 1)) / s;
  } else {
    const double s = std::sqrt(1.0 + r(2, 2) - r(0, 0) - r(1, 1)) * 2.0;
    q << (r(1, 0) - r(0, 1)) / s, (r(0, 2) + r(2, 0)) / s, (r(1, 2) + r(2, 1)) / s, 0.25 * s;
  }
  q.normalize();
  if (q[0] < 0) q = -q;
  return q;
}

RigidTransform RigidTransform::from_pose(const colmap::ViewPose& pose) {
  return {quat_to_rotmat(pose.rotation.normalized()), pose.translation};
}

RigidTransform RigidTransform::inverse() const {
  const Mat3 rt = rotation.transpose();
  return {rt, -rt * translation};
}

RigidTransform RigidTransform::compose(const RigidTransform& other) const {
  return {rotation * other.rotation, rotation * other.translation + translation};
}

Vec3 world_to_camera(const RigidTransform& t, const Vec3& p) { return t.apply(p); }

PinholeCamera PinholeCamera::from_colmap(const colmap::CameraIntrinsics& intrinsics,
                                         const colmap::ViewPose& pose) {
  PinholeCamera cam;
  cam.fx = intrinsics.fx();
  cam.fy = intrinsics.fy();
  cam.cx = intrinsics.cx();
  cam.cy = intrinsics.cy();
  cam.width = static_cast<int>(intrinsics.width);
  cam.height = static_cast<int>(intrinsics.height);
  cam.pose = RigidTransform::from_pose(pose);
  return cam;
}

ProjectedPoint project(const PinholeCamera& cam, const Vec3& p_cam) {
  if (!(p_cam.z() > cam.near_plane)) {
    fail(ErrorKind::BehindCamera, "point is behind the near plane");
  }
  const double inv_z = 1.0 / p_cam.z();
  return {Vec2(cam.cx + cam.fx * p_cam.x() * inv_z, cam.cy + cam.fy * p_cam.y() * inv_z),
          p_cam.z()};
}

Mat23 projection_jacobian(const PinholeCamera& cam, const Vec3& p_cam) {
  const double x = p_cam.x(), y = p_cam.y(), z = p_cam.z();
  const double inv_z = 1.0 / z;
  const double inv_z2 = inv_z * inv_z;
  Mat23 j;
  j << cam.fx * inv_z, 0.0, -cam.fx * x * inv_z2,
      0.0, cam.fy * inv_z, -cam.fy * y * inv_z2;
  return j;
}

RigidTransform look_at(const Vec3& eye, const Vec3& target, const Vec3& up) {
  const Vec3 forward = (target - eye).normalized();
  Vec3 right = forward.cross(up);
  if (right.norm() < 1e-9) right = forward.cross(Vec3::UnitX());
  right.normalize();
  const Vec3 down = forward.cross(right);
  Mat3 r;
  r.row(0) = right.transpose();
  r.row(1) = down.transpose();
  r.row(2) = forward.transpose();
  return {r, -r * eye};
}

}  // namespace shoesplat::geom
