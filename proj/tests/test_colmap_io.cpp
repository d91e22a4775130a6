#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "shoesplat/colmap_io.hpp"
#include "shoesplat/util.hpp"

using namespace shoesplat;
using namespace shoesplat::colmap;

namespace {

template <typename Fn>
ErrorKind kind_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorKind::IoError;
}

CameraIntrinsics simple_camera() {
  CameraIntrinsics c;
  c.camera_id = 1;
  c.model = CameraModel::SimplePinhole;
  c.width = 640;
  c.height = 480;
  c.params = {500.0, 320.0, 240.0};
  return c;
}

SparsePoint random_point(Rng& rng, std::uint64_t id) {
  SparsePoint p;
  p.point3d_id = id;
  p.position = {rng.normal(), rng.normal(), rng.normal()};
  p.color = {static_cast<std::uint8_t>(rng.below(256)), static_cast<std::uint8_t>(rng.below(256)),
             static_cast<std::uint8_t>(rng.below(256))};
  p.reprojection_error = rng.uniform(0, 2);
  const size_t n = 1 + rng.below(5);
  for (size_t i = 0; i < n; ++i) {
    p.track.push_back({static_cast<std::uint32_t>(rng.below(100)), static_cast<std::uint32_t>(rng.below(1000))});
  }
  return p;
}

}  // namespace

TEST(Cameras, RoundTripSimplePinhole) {
  CameraMap cams{{1, simple_camera()}};
  for (auto fmt : {FileFormat::Binary, FileFormat::Text}) {
    EXPECT_EQ(parse_cameras(write_cameras(cams, fmt), fmt), cams);
  }
}

TEST(Cameras, TruncatedAfterCount) {
  const std::string bytes = write_cameras(CameraMap{{1, simple_camera()}}, FileFormat::Binary);
  EXPECT_EQ(kind_of([&] { parse_cameras(std::string_view(bytes).substr(0, 8), FileFormat::Binary); }),
            ErrorKind::TruncatedFile);
}

TEST(Cameras, UnknownModelRejected) {
  std::string bytes = write_cameras(CameraMap{{1, simple_camera()}}, FileFormat::Binary);
  const std::int32_t bad = 99;
  std::memcpy(bytes.data() + 12, &bad, 4);
  EXPECT_EQ(kind_of([&] { parse_cameras(bytes, FileFormat::Binary); }), ErrorKind::UnsupportedModel);
  EXPECT_EQ(kind_of([&] { parse_cameras("1 OPENCV 10 10 1 2 3 4 5 6 7 8\n", FileFormat::Text); }),
            ErrorKind::UnsupportedModel);
}

TEST(Cameras, WrongFieldCount) {
  EXPECT_EQ(kind_of([&] { parse_cameras("1 PINHOLE 10 10 1 2 3\n", FileFormat::Text); }),
            ErrorKind::MalformedText);
}

TEST(Images, IdentityPoseRoundTrip) {
  ViewPose pose;
  pose.image_id = 3;
  pose.camera_id = 1;
  pose.image_name = "shoe/frame_0001.png";
  PoseMap poses{{3, pose}};
  for (auto fmt : {FileFormat::Binary, FileFormat::Text}) {
    EXPECT_EQ(parse_images(write_images(poses, fmt), fmt), poses);
  }
}

TEST(Images, ZeroQuaternionRejected) {
  ViewPose pose;
  pose.image_id = 1;
  pose.rotation = Eigen::Vector4d::Zero();
  pose.image_name = "a.png";
  const auto bytes = write_images(PoseMap{{1, pose}}, FileFormat::Binary);
  EXPECT_EQ(kind_of([&] { parse_images(bytes, FileFormat::Binary); }), ErrorKind::MalformedPose);
}

TEST(Images, NearUnitQuaternionNormalised) {
  ViewPose pose;
  pose.image_id = 1;
  pose.rotation = {1.0005, 0, 0, 0};
  pose.image_name = "a.png";
  const auto parsed = parse_images(write_images(PoseMap{{1, pose}}, FileFormat::Text), FileFormat::Text);
  EXPECT_NEAR(parsed.at(1).rotation.norm(), 1.0, 1e-12);
}

TEST(Images, ObservationsRoundTrip) {
  ViewPose pose;
  pose.image_id = 2;
  pose.camera_id = 1;
  pose.image_name = "b.png";
  pose.observations = {{1.5, 2.5, 7}, {3.0, 4.0, -1}};
  PoseMap poses{{2, pose}};
  for (auto fmt : {FileFormat::Binary, FileFormat::Text}) {
    EXPECT_EQ(parse_images(write_images(poses, fmt), fmt), poses);
  }
}

TEST(Points, TwoPointRoundTrip) {
  Rng rng(1);
  PointMap pts{{1, random_point(rng, 1)}, {2, random_point(rng, 2)}};
  for (auto fmt : {FileFormat::Binary, FileFormat::Text}) {
    const auto parsed = parse_points3d(write_points3d(pts, fmt), fmt);
    if (fmt == FileFormat::Binary) EXPECT_EQ(parsed, pts);
    ASSERT_EQ(parsed.size(), 2u);
    for (const auto& [id, p] : pts) {
      EXPECT_EQ(parsed.at(id).track, p.track);
      EXPECT_NEAR((parsed.at(id).position - p.position).norm(), 0.0, 1e-12);
    }
  }
}

TEST(Points, EmptyTrackRejected) {
  SparsePoint p;
  p.point3d_id = 4;
  const auto bytes = write_points3d(PointMap{{4, p}}, FileFormat::Binary);
  EXPECT_EQ(kind_of([&] { parse_points3d(bytes, FileFormat::Binary); }), ErrorKind::MalformedTrack);
}

TEST(Points, HundredRandomBinaryBitwise) {
  Rng rng(100);
  PointMap pts;
  for (std::uint64_t id = 0; id < 100; ++id) pts[id * 3 + 1] = random_point(rng, id * 3 + 1);
  EXPECT_EQ(parse_points3d(write_points3d(pts, FileFormat::Binary), FileFormat::Binary), pts);
}

TEST(Validate, ConsistentRigIsClean) {
  CameraMap cams{{1, simple_camera()}};
  ViewPose pose;
  pose.image_id = 1;
  pose.camera_id = 1;
  pose.image_name = "a.png";
  pose.observations = {{1, 1, 5}};
  SparsePoint p;
  p.point3d_id = 5;
  p.track = {{1, 0}};
  EXPECT_TRUE(validate_reconstruction(cams, {{1, pose}}, {{5, p}}).ok());
}

TEST(Validate, DanglingReferences) {
  CameraMap cams{{1, simple_camera()}};
  ViewPose pose;
  pose.image_id = 1;
  pose.camera_id = 7;
  pose.image_name = "a.png";
  SparsePoint p;
  p.point3d_id = 5;
  p.track = {{9, 0}};
  const auto report = validate_reconstruction(cams, {{1, pose}}, {{5, p}});
  EXPECT_EQ(report.count(ValidationIssue::Kind::DanglingCamera), 1u);
  EXPECT_EQ(report.count(ValidationIssue::Kind::DanglingImage), 1u);
}

TEST(Directory, MissingFile) {
  const auto dir = std::filesystem::temp_directory_path() / "shoesplat_colmap_missing";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  Reconstruction rec;
  rec.cameras = {{1, simple_camera()}};
  write_reconstruction(rec, dir);
  std::filesystem::remove(dir / "points3D.bin");
  EXPECT_EQ(kind_of([&] { read_reconstruction(dir); }), ErrorKind::MissingFile);
  std::filesystem::remove_all(dir);
}
