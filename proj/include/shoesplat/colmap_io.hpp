#pragma once

// Reader/writer for sparse SfM reconstructions (cameras, images, points3D)
// in the binary and text layouts used by COLMAP.
//
// Binary layout (little-endian):
//   cameras.bin   u64 count; per camera: u32 camera_id, i32 model_id,
//                 u64 width, u64 height, f64 params[n(model)]
//   images.bin    u64 count; per image: u32 image_id, f64 qw qx qy qz,
//                 f64 tx ty tz, u32 camera_id, name bytes + '\0',
//                 u64 num_points2D, then (f64 x, f64 y, u64 point3D_id)*
//                 where point3D_id == 2^64-1 marks an unmatched keypoint
//   points3D.bin  u64 count; per point: u64 point3D_id, f64 x y z,
//                 u8 r g b, f64 error, u64 track_length,
//                 then (u32 image_id, u32 point2D_idx)*
//
// Text layout: '#' comment lines, whitespace separated fields.
//   cameras.txt   CAMERA_ID MODEL WIDTH HEIGHT PARAMS...
//   images.txt    IMAGE_ID QW QX QY QZ TX TY TZ CAMERA_ID NAME
//                 X Y POINT3D_ID ...        (second line, may be empty)
//   points3D.txt  POINT3D_ID X Y Z R G B ERROR (IMAGE_ID POINT2D_IDX)...

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "shoesplat/error.hpp"

namespace shoesplat::colmap {

enum class CameraModel : int {
  SimplePinhole = 0,  // f, cx, cy
  Pinhole = 1,        // fx, fy, cx, cy
  SimpleRadial = 2,   // f, cx, cy, k
};

enum class FileFormat { Binary, Text };

std::string_view model_name(CameraModel model);
size_t model_param_count(CameraModel model);

struct CameraIntrinsics {
  std::uint32_t camera_id = 0;
  CameraModel model = CameraModel::Pinhole;
  std::uint64_t width = 0;
  std::uint64_t height = 0;
  std::vector<double> params;

  double fx() const;
  double fy() const;
  double cx() const;
  double cy() const;

  friend bool operator==(const CameraIntrinsics&, const CameraIntrinsics&) = default;
};

struct Observation {
  double u = 0.0;
  double v = 0.0;
  std::int64_t point3d_id = -1;  // -1: keypoint without a triangulated point

  friend bool operator==(const Observation&, const Observation&) = default;
};

struct ViewPose {
  std::uint32_t image_id = 0;
  /// Unit quaternion (w, x, y, z) rotating world into camera coordinates.
  Eigen::Vector4d rotation{1.0, 0.0, 0.0, 0.0};
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  std::uint32_t camera_id = 0;
  std::string image_name;
  std::vector<Observation> observations;

  friend bool operator==(const ViewPose&, const ViewPose&) = default;
};

struct TrackElement {
  std::uint32_t image_id = 0;
  std::uint32_t point2d_index = 0;

  friend bool operator==(const TrackElement&, const TrackElement&) = default;
};

struct SparsePoint {
  std::uint64_t point3d_id = 0;
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  std::array<std::uint8_t, 3> color{0, 0, 0};
  double reprojection_error = 0.0;
  std::vector<TrackElement> track;

  friend bool operator==(const SparsePoint&, const SparsePoint&) = default;
};

using CameraMap = std::map<std::uint32_t, CameraIntrinsics>;
using PoseMap = std::map<std::uint32_t, ViewPose>;
using PointMap = std::map<std::uint64_t, SparsePoint>;

CameraMap parse_cameras(std::istream& source, FileFormat format);
PoseMap parse_images(std::istream& source, FileFormat format);
PointMap parse_points3d(std::istream& source, FileFormat format);

CameraMap parse_cameras(std::string_view bytes, FileFormat format);
PoseMap parse_images(std::string_view bytes, FileFormat format);
PointMap parse_points3d(std::string_view bytes, FileFormat format);

void write_cameras(const CameraMap& cameras, std::ostream& sink, FileFormat format);
void write_images(const PoseMap& poses, std::ostream& sink, FileFormat format);
void write_points3d(const PointMap& points, std::ostream& sink, FileFormat format);

std::string write_cameras(const CameraMap& cameras, FileFormat format);
std::string write_images(const PoseMap& poses, FileFormat format);
std::string write_points3d(const PointMap& points, FileFormat format);

struct ValidationIssue {
  enum class Kind { DanglingCamera, DanglingPoint, DanglingImage, BrokenTrack };
  Kind kind;
  std::uint64_t owner_id;       // image id, or point id for DanglingImage/BrokenTrack
  std::uint64_t referenced_id;  // the id that does not resolve
  std::string describe() const;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;
  bool ok() const { return issues.empty(); }
  size_t count(ValidationIssue::Kind kind) const;
};

/// Lists dangling camera references, observations that name missing points,
/// and point tracks that name missing images (or out-of-range keypoints).
ValidationReport validate_reconstruction(const CameraMap& cameras, const PoseMap& poses,
                                         const PointMap& points);

struct Reconstruction {
  CameraMap cameras;
  PoseMap poses;
  PointMap points;
};

/// Loads `cameras`, `images` and `points3D` from a directory, preferring the
/// binary files and falling back to text. Throws MissingFile if any of the
/// three is absent in both forms.
Reconstruction read_reconstruction(const std::filesystem::path& dir);
void write_reconstruction(const Reconstruction& rec, const std::filesystem::path& dir,
                          FileFormat format = FileFormat::Binary);

}  // namespace shoesplat::colmap
