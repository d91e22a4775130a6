#include <gtest/gtest.h>

#include <Eigen/Geometry>

#include "oracles.hpp"
#include "shoesplat/geometry.hpp"

using namespace shoesplat;
using namespace shoesplat::geom;

namespace {

RigidTransform random_transform(Rng& rng) {
  RigidTransform t;
  t.rotation = quat_to_rotmat(oracle::random_quat(rng));
  t.translation = Vec3(rng.normal(), rng.normal(), rng.normal());
  return t;
}

PinholeCamera camera100() {
  PinholeCamera cam;
  cam.fx = cam.fy = 100;
  cam.cx = cam.cy = 64;
  cam.width = cam.height = 128;
  return cam;
}

}  // namespace

TEST(Quaternion, Identity) {
  EXPECT_TRUE(quat_to_rotmat({1, 0, 0, 0}).isApprox(Mat3::Identity(), 1e-15));
}

TEST(Quaternion, HalfTurnAboutZ) {
  Mat3 expected = Mat3::Zero();
  expected.diagonal() << -1, -1, 1;
  EXPECT_TRUE(quat_to_rotmat({0, 0, 0, 1}).isApprox(expected, 1e-15));
}

TEST(Quaternion, QuarterTurnMatchesSandwichProduct) {
  const double h = std::sqrt(2.0) / 2.0;
  const Vec3 out = quat_to_rotmat({h, 0, 0, h}) * Vec3(1, 0, 0);
  EXPECT_NEAR((out - Vec3(0, 1, 0)).norm(), 0.0, 1e-9);

  Rng rng(4);
  for (int i = 0; i < 100; ++i) {
    const Vec4 q = oracle::random_quat(rng);
    const Vec3 v(rng.normal(), rng.normal(), rng.normal());
    const Eigen::Quaterniond eq(q[0], q[1], q[2], q[3]);
    const Eigen::Quaterniond pv(0, v.x(), v.y(), v.z());
    const Vec3 sandwich = (eq * pv * eq.conjugate()).vec();
    EXPECT_NEAR((quat_to_rotmat(q) * v - sandwich).norm(), 0.0, 1e-9);
  }
}

TEST(Quaternion, DoubleCoverAndOrthonormal) {
  Rng rng(8);
  for (int i = 0; i < 100; ++i) {
    const Vec4 q = oracle::random_quat(rng);
    const Mat3 r = quat_to_rotmat(q);
    EXPECT_TRUE(r.isApprox(quat_to_rotmat(-q), 1e-12));
    EXPECT_TRUE((r.transpose() * r).isApprox(Mat3::Identity(), 1e-12));
    EXPECT_NEAR(r.determinant(), 1.0, 1e-12);
    EXPECT_TRUE(quat_to_rotmat(rotmat_to_quat(r)).isApprox(r, 1e-12));
  }
}

TEST(Transform, Examples) {
  EXPECT_EQ(world_to_camera(RigidTransform{}, Vec3(1, 2, 3)), Vec3(1, 2, 3));
  RigidTransform t;
  t.translation = Vec3(0, 0, -2);
  EXPECT_EQ(world_to_camera(t, Vec3(0, 0, 2)), Vec3::Zero());
}

TEST(Transform, InverseLaw) {
  Rng rng(12);
  for (int i = 0; i < 100; ++i) {
    const auto t = random_transform(rng);
    const Vec3 p(rng.normal(), rng.normal(), rng.normal());
    EXPECT_NEAR((world_to_camera(t.inverse(), world_to_camera(t, p)) - p).norm(), 0.0, 1e-9);
  }
}

TEST(Projection, Examples) {
  const auto cam = camera100();
  auto p = project(cam, {0, 0, 2});
  EXPECT_EQ(p.pixel, Vec2(64, 64));
  EXPECT_EQ(p.depth, 2.0);
  p = project(cam, {0.2, 0, 2});
  EXPECT_NEAR((p.pixel - Vec2(74, 64)).norm(), 0.0, 1e-12);
  try {
    project(cam, {0, 0, -1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BehindCamera);
  }
}

TEST(Projection, RigidMotionInvariance) {
  Rng rng(13);
  auto cam = camera100();
  for (int i = 0; i < 50; ++i) {
    cam.pose = look_at(Vec3(rng.normal(), rng.normal(), 4.0), Vec3::Zero(), Vec3(0, 1, 0));
    const Vec3 p(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5));
    const auto m = random_transform(rng);
    auto moved = cam;
    moved.pose = cam.pose.compose(m.inverse());
    const auto a = project(cam, world_to_camera(cam.pose, p));
    const auto b = project(moved, world_to_camera(moved.pose, m.apply(p)));
    EXPECT_NEAR((a.pixel - b.pixel).norm(), 0.0, 1e-9);
  }
}

TEST(Jacobian, Examples) {
  PinholeCamera cam;
  Mat23 expected;
  expected << 1, 0, 0, 0, 1, 0;
  EXPECT_TRUE(projection_jacobian(cam, {0, 0, 1}).isApprox(expected));
  const auto cam2 = camera100();
  const Mat23 j1 = projection_jacobian(cam2, {0.3, -0.2, 2});
  const Mat23 j2 = projection_jacobian(cam2, {0.3, -0.2, 4});
  EXPECT_NEAR(j2(0, 0), 0.5 * j1(0, 0), 1e-12);
  EXPECT_NEAR(j2(1, 1), 0.5 * j1(1, 1), 1e-12);
}

TEST(Jacobian, MatchesCentralDifferences) {
  Rng rng(14);
  const auto cam = camera100();
  for (int i = 0; i < 100; ++i) {
    const Vec3 p(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(1, 5));
    const Mat23 j = projection_jacobian(cam, p);
    Mat23 fd;
    const double h = 1e-5;
    for (int k = 0; k < 3; ++k) {
      Vec3 d = Vec3::Zero();
      d[k] = h;
      fd.col(k) = (project(cam, p + d).pixel - project(cam, p - d).pixel) / (2 * h);
    }
    EXPECT_LT((j - fd).norm() / j.norm(), 1e-4);
  }
}
