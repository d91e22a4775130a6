#include "shoesplat/colmap_io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>

#include "shoesplat/util.hpp"

namespace shoesplat::colmap {

static_assert(std::endian::native == std::endian::little,
              "binary reconstruction I/O assumes a little-endian host");

namespace {

constexpr std::uint64_t kInvalidPoint3D = std::numeric_limits<std::uint64_t>::max();
constexpr double kQuatTolerance = 1e-3;

bool model_from_id(std::int32_t id, CameraModel& out) {
  switch (id) {
    case 0: out = CameraModel::SimplePinhole; return true;
    case 1: out = CameraModel::Pinhole; return true;
    case 2: out = CameraModel::SimpleRadial; return true;
    default: return false;
  }
}

bool model_from_name(std::string_view name, CameraModel& out) {
  for (auto m : {CameraModel::SimplePinhole, CameraModel::Pinhole, CameraModel::SimpleRadial}) {
    if (name == model_name(m)) {
      out = m;
      return true;
    }
  }
  return false;
}

void check_camera(const CameraIntrinsics& cam) {
  const auto id = std::to_string(cam.camera_id);
  if (cam.width == 0 || cam.height == 0) {
    fail(ErrorKind::InvalidCamera, "camera " + id + " has zero size");
  }
  if (cam.params.size() != model_param_count(cam.model)) {
    fail(ErrorKind::InvalidCamera, "camera " + id + " has wrong parameter count");
  }
  for (double p : cam.params) {
    if (!std::isfinite(p)) fail(ErrorKind::InvalidCamera, "camera " + id + " has non-finite parameter");
  }
  if (!(cam.fx() > 0.0) || !(cam.fy() > 0.0)) {
    fail(ErrorKind::InvalidCamera, "camera " + id + " focal length must be positive");
  }
}

Eigen::Vector4d normalized_pose_quaternion(const Eigen::Vector4d& q, std::uint32_t image_id) {
  const double n = q.norm();
  if (!std::isfinite(n) || std::abs(n - 1.0) > kQuatTolerance) {
    fail(ErrorKind::MalformedPose,
         "image " + std::to_string(image_id) + " quaternion norm is not close to 1");
  }
  // Already unit to machine precision: keep the exact bits so files round-trip.
  if (std::abs(n - 1.0) <= 4 * std::numeric_limits<double>::epsilon()) return q;
  return q / n;
}

void check_finite(const Eigen::Ref<const Eigen::VectorXd>& v, ErrorKind kind, const std::string& what) {
  if (!v.allFinite()) fail(kind, what + " contains non-finite values");
}

// ---------------------------------------------------------------------------
// Binary helpers

class ByteReader {
 public:
  ByteReader(std::string_view bytes, const char* what) : bytes_(bytes), what_(what) {}

  template <typename T>
  T read() {
    static_assert(std::is_trivially_copyable_v<T>);
    need(sizeof(T));
    T value;
    std::memcpy(&value, bytes_.data() + offset_, sizeof(T));
    offset_ += sizeof(T);
    return value;
  }

  std::string read_cstring() {
    const size_t end = bytes_.find('\0', offset_);
    if (end == std::string_view::npos) truncated();
    std::string s(bytes_.substr(offset_, end - offset_));
    offset_ = end + 1;
    return s;
  }

  /// Rejects element counts that cannot possibly fit in the remaining bytes,
  /// so corrupt headers never trigger huge allocations.
  void need_records(std::uint64_t count, size_t min_record_bytes) {
    if (min_record_bytes > 0 && count > remaining() / min_record_bytes) truncated();
  }

  size_t remaining() const { return bytes_.size() - offset_; }

 private:
  void need(size_t n) {
    if (remaining() < n) truncated();
  }
  [[noreturn]] void truncated() const {
    fail(ErrorKind::TruncatedFile, std::string(what_) + " ends mid-record at byte " +
                                       std::to_string(offset_));
  }

  std::string_view bytes_;
  const char* what_;
  size_t offset_ = 0;
};

template <typename T>
void put(std::string& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

// ---------------------------------------------------------------------------
// Text helpers

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    if (j > i) tokens.push_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

std::string_view trim(std::string_view s) {
  size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  bool next(std::string_view& line) {
    if (pos_ >= text_.size()) return false;
    size_t end = text_.find('\n', pos_);
    if (end == std::string_view::npos) end = text_.size();
    line = trim(text_.substr(pos_, end - pos_));
    pos_ = end + 1;
    ++number_;
    return true;
  }

  /// Next line that is neither blank nor a comment.
  bool next_record(std::string_view& line) {
    while (next(line)) {
      if (!line.empty() && line.front() != '#') return true;
    }
    return false;
  }

  size_t number() const { return number_; }

 private:
  std::string_view text_;
  size_t pos_ = 0;
  size_t number_ = 0;
};

template <typename T>
T parse_number(std::string_view token, const char* what, size_t line) {
  T value{};
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if constexpr (std::is_floating_point_v<T>) {
    if (!token.empty() && token.front() == '+') ++first;
  }
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last) {
    fail(ErrorKind::MalformedText, std::string(what) + " line " + std::to_string(line) +
                                       ": bad number '" + std::string(token) + "'");
  }
  return value;
}

std::string format_double(double v) {
  std::ostringstream ss;
  ss << std::setprecision(std::numeric_limits<double>::max_digits10) << v;
  return ss.str();
}

std::string stream_bytes(std::istream& in) {
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string_view model_name(CameraModel model) {
  switch (model) {
    case CameraModel::SimplePinhole: return "SIMPLE_PINHOLE";
    case CameraModel::Pinhole: return "PINHOLE";
    case CameraModel::SimpleRadial: return "SIMPLE_RADIAL";
  }
  return "UNKNOWN";
}

size_t model_param_count(CameraModel model) {
  switch (model) {
    case CameraModel::SimplePinhole: return 3;
    case CameraModel::Pinhole: return 4;
    case CameraModel::SimpleRadial: return 4;
  }
  return 0;
}

double CameraIntrinsics::fx() const { return params.at(0); }
double CameraIntrinsics::fy() const {
  return model == CameraModel::Pinhole ? params.at(1) : params.at(0);
}
double CameraIntrinsics::cx() const {
  return model == CameraModel::Pinhole ? params.at(2) : params.at(1);
}
double CameraIntrinsics::cy() const {
  return model == CameraModel::Pinhole ? params.at(3) : params.at(2);
}

// ---------------------------------------------------------------------------
// cameras

CameraMap parse_cameras(std::string_view bytes, FileFormat format) {
  CameraMap cameras;
  if (format == FileFormat::Binary) {
    ByteReader in(bytes, "cameras");
    const auto count = in.read<std::uint64_t>();
    in.need_records(count, 4 + 4 + 8 + 8 + 3 * 8);
    for (std::uint64_t i = 0; i < count; ++i) {
      CameraIntrinsics cam;
      cam.camera_id = in.read<std::uint32_t>();
      const auto model_id = in.read<std::int32_t>();
      if (!model_from_id(model_id, cam.model)) {
        fail(ErrorKind::UnsupportedModel, "camera " + std::to_string(cam.camera_id) +
                                              " uses unsupported model id " +
                                              std::to_string(model_id));
      }
      cam.width = in.read<std::uint64_t>();
      cam.height = in.read<std::uint64_t>();
      cam.params.resize(model_param_count(cam.model));
      for (double& p : cam.params) p = in.read<double>();
      check_camera(cam);
      cameras[cam.camera_id] = std::move(cam);
    }
    return cameras;
  }

  LineReader lines(bytes);
  std::string_view line;
  while (lines.next_record(line)) {
    const auto tok = split_ws(line);
    if (tok.size() < 4) {
      fail(ErrorKind::MalformedText, "cameras line " + std::to_string(lines.number()) +
                                         ": expected at least 4 fields");
    }
    CameraIntrinsics cam;
    cam.camera_id = parse_number<std::uint32_t>(tok[0], "cameras", lines.number());
    if (!model_from_name(tok[1], cam.model)) {
      fail(ErrorKind::UnsupportedModel, "camera model '" + std::string(tok[1]) + "' is not supported");
    }
    if (tok.size() != 4 + model_param_count(cam.model)) {
      fail(ErrorKind::MalformedText, "cameras line " + std::to_string(lines.number()) +
                                         ": wrong field count for " + std::string(tok[1]));
    }
    cam.width = parse_number<std::uint64_t>(tok[2], "cameras", lines.number());
    cam.height = parse_number<std::uint64_t>(tok[3], "cameras", lines.number());
    for (size_t k = 4; k < tok.size(); ++k) {
      cam.params.push_back(parse_number<double>(tok[k], "cameras", lines.number()));
    }
    check_camera(cam);
    cameras[cam.camera_id] = std::move(cam);
  }
  return cameras;
}

void write_cameras(const CameraMap& cameras, std::ostream& sink, FileFormat format) {
  const std::string bytes = write_cameras(cameras, format);
  sink.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::string write_cameras(const CameraMap& cameras, FileFormat format) {
  std::string out;
  if (format == FileFormat::Binary) {
    put<std::uint64_t>(out, cameras.size());
    for (const auto& [id, cam] : cameras) {
      put<std::uint32_t>(out, cam.camera_id);
      put<std::int32_t>(out, static_cast<std::int32_t>(cam.model));
      put<std::uint64_t>(out, cam.width);
      put<std::uint64_t>(out, cam.height);
      for (double p : cam.params) put<double>(out, p);
    }
    return out;
  }
  out += "# Camera list with one line of data per camera:\n";
  out += "#   CAMERA_ID, MODEL, WIDTH, HEIGHT, PARAMS[]\n";
  out += "# Number of cameras: " + std::to_string(cameras.size()) + "\n";
  for (const auto& [id, cam] : cameras) {
    out += std::to_string(cam.camera_id) + " " + std::string(model_name(cam.model)) + " " +
           std::to_string(cam.width) + " " + std::to_string(cam.height);
    for (double p : cam.params) out += " " + format_double(p);
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// images

PoseMap parse_images(std::string_view bytes, FileFormat format) {
  PoseMap poses;
  if (format == FileFormat::Binary) {
    ByteReader in(bytes, "images");
    const auto count = in.read<std::uint64_t>();
    in.need_records(count, 4 + 7 * 8 + 4 + 1 + 8);
    for (std::uint64_t i = 0; i < count; ++i) {
      ViewPose pose;
      pose.image_id = in.read<std::uint32_t>();
      Eigen::Vector4d q;
      for (int k = 0; k < 4; ++k) q[k] = in.read<double>();
      for (int k = 0; k < 3; ++k) pose.translation[k] = in.read<double>();
      pose.camera_id = in.read<std::uint32_t>();
      pose.image_name = in.read_cstring();
      pose.rotation = normalized_pose_quaternion(q, pose.image_id);
      check_finite(pose.translation, ErrorKind::MalformedPose, "image translation");
      const auto n_obs = in.read<std::uint64_t>();
      in.need_records(n_obs, 3 * 8);
      pose.observations.resize(n_obs);
      for (auto& obs : pose.observations) {
        obs.u = in.read<double>();
        obs.v = in.read<double>();
        const auto id = in.read<std::uint64_t>();
        if (id == kInvalidPoint3D) {
          obs.point3d_id = -1;
        } else if (id > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) {
          fail(ErrorKind::MalformedTrack, "observation references out-of-range point id");
        } else {
          obs.point3d_id = static_cast<std::int64_t>(id);
        }
      }
      poses[pose.image_id] = std::move(pose);
    }
    return poses;
  }

  LineReader lines(bytes);
  std::string_view line;
  while (lines.next_record(line)) {
    const size_t header_line = lines.number();
    const auto tok = split_ws(line);
    if (tok.size() != 10) {
      fail(ErrorKind::MalformedText,
           "images line " + std::to_string(header_line) + ": expected 10 fields");
    }
    ViewPose pose;
    pose.image_id = parse_number<std::uint32_t>(tok[0], "images", header_line);
    Eigen::Vector4d q;
    for (int k = 0; k < 4; ++k) q[k] = parse_number<double>(tok[1 + k], "images", header_line);
    for (int k = 0; k < 3; ++k) {
      pose.translation[k] = parse_number<double>(tok[5 + k], "images", header_line);
    }
    pose.camera_id = parse_number<std::uint32_t>(tok[8], "images", header_line);
    pose.image_name = std::string(tok[9]);
    pose.rotation = normalized_pose_quaternion(q, pose.image_id);
    check_finite(pose.translation, ErrorKind::MalformedPose, "image translation");

    // The keypoint line always follows the header line and may be empty.
    std::string_view points_line;
    if (lines.next(points_line)) {
      const auto ptok = split_ws(points_line);
      if (ptok.size() % 3 != 0) {
        fail(ErrorKind::MalformedText, "images line " + std::to_string(lines.number()) +
                                           ": keypoint fields must come in triples");
      }
      for (size_t k = 0; k < ptok.size(); k += 3) {
        Observation obs;
        obs.u = parse_number<double>(ptok[k], "images", lines.number());
        obs.v = parse_number<double>(ptok[k + 1], "images", lines.number());
        obs.point3d_id = parse_number<std::int64_t>(ptok[k + 2], "images", lines.number());
        if (obs.point3d_id < -1) {
          fail(ErrorKind::MalformedTrack, "observation references negative point id");
        }
        pose.observations.push_back(obs);
      }
    }
    poses[pose.image_id] = std::move(pose);
  }
  return poses;
}

void write_images(const PoseMap& poses, std::ostream& sink, FileFormat format) {
  const std::string bytes = write_images(poses, format);
  sink.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::string write_images(const PoseMap& poses, FileFormat format) {
  std::string out;
  if (format == FileFormat::Binary) {
    put<std::uint64_t>(out, poses.size());
    for (const auto& [id, pose] : poses) {
      put<std::uint32_t>(out, pose.image_id);
      for (int k = 0; k < 4; ++k) put<double>(out, pose.rotation[k]);
      for (int k = 0; k < 3; ++k) put<double>(out, pose.translation[k]);
      put<std::uint32_t>(out, pose.camera_id);
      out.append(pose.image_name);
      out.push_back('\0');
      put<std::uint64_t>(out, pose.observations.size());
      for (const auto& obs : pose.observations) {
        put<double>(out, obs.u);
        put<double>(out, obs.v);
        put<std::uint64_t>(out, obs.point3d_id < 0 ? kInvalidPoint3D
                                                   : static_cast<std::uint64_t>(obs.point3d_id));
      }
    }
    return out;
  }
  out += "# Image list with two lines of data per image:\n";
  out += "#   IMAGE_ID, QW, QX, QY, QZ, TX, TY, TZ, CAMERA_ID, NAME\n";
  out += "#   POINTS2D[] as (X, Y, POINT3D_ID)\n";
  out += "# Number of images: " + std::to_string(poses.size()) + "\n";
  for (const auto& [id, pose] : poses) {
    out += std::to_string(pose.image_id);
    for (int k = 0; k < 4; ++k) out += " " + format_double(pose.rotation[k]);
    for (int k = 0; k < 3; ++k) out += " " + format_double(pose.translation[k]);
    out += " " + std::to_string(pose.camera_id) + " " + pose.image_name + "\n";
    bool first = true;
    for (const auto& obs : pose.observations) {
      if (!first) out += " ";
      first = false;
      out += format_double(obs.u) + " " + format_double(obs.v) + " " +
             std::to_string(obs.point3d_id);
    }
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// points3D

PointMap parse_points3d(std::string_view bytes, FileFormat format) {
  PointMap points;
  if (format == FileFormat::Binary) {
    ByteReader in(bytes, "points3D");
    const auto count = in.read<std::uint64_t>();
    in.need_records(count, 8 + 3 * 8 + 3 + 8 + 8);
    for (std::uint64_t i = 0; i < count; ++i) {
      SparsePoint pt;
      pt.point3d_id = in.read<std::uint64_t>();
      for (int k = 0; k < 3; ++k) pt.position[k] = in.read<double>();
      for (int k = 0; k < 3; ++k) pt.color[k] = in.read<std::uint8_t>();
      pt.reprojection_error = in.read<double>();
      const auto track_length = in.read<std::uint64_t>();
      if (track_length == 0) {
        fail(ErrorKind::MalformedTrack, "point " + std::to_string(pt.point3d_id) + " has an empty track");
      }
      in.need_records(track_length, 8);
      pt.track.resize(track_length);
      for (auto& el : pt.track) {
        el.image_id = in.read<std::uint32_t>();
        el.point2d_index = in.read<std::uint32_t>();
      }
      check_finite(pt.position, ErrorKind::MalformedTrack, "point position");
      points[pt.point3d_id] = std::move(pt);
    }
    return points;
  }

  LineReader lines(bytes);
  std::string_view line;
  while (lines.next_record(line)) {
    const auto tok = split_ws(line);
    const size_t n = lines.number();
    if (tok.size() < 8 || (tok.size() - 8) % 2 != 0) {
      fail(ErrorKind::MalformedText,
           "points3D line " + std::to_string(n) + ": expected 8 fields plus track pairs");
    }
    SparsePoint pt;
    pt.point3d_id = parse_number<std::uint64_t>(tok[0], "points3D", n);
    for (int k = 0; k < 3; ++k) pt.position[k] = parse_number<double>(tok[1 + k], "points3D", n);
    for (int k = 0; k < 3; ++k) {
      const int c = parse_number<int>(tok[4 + k], "points3D", n);
      if (c < 0 || c > 255) {
        fail(ErrorKind::MalformedText, "points3D line " + std::to_string(n) + ": color out of range");
      }
      pt.color[k] = static_cast<std::uint8_t>(c);
    }
    pt.reprojection_error = parse_number<double>(tok[7], "points3D", n);
    for (size_t k = 8; k < tok.size(); k += 2) {
      pt.track.push_back({parse_number<std::uint32_t>(tok[k], "points3D", n),
                          parse_number<std::uint32_t>(tok[k + 1], "points3D", n)});
    }
    if (pt.track.empty()) {
      fail(ErrorKind::MalformedTrack, "point " + std::to_string(pt.point3d_id) + " has an empty track");
    }
    check_finite(pt.position, ErrorKind::MalformedTrack, "point position");
    points[pt.point3d_id] = std::move(pt);
  }
  return points;
}

void write_points3d(const PointMap& points, std::ostream& sink, FileFormat format) {
  const std::string bytes = write_points3d(points, format);
  sink.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::string write_points3d(const PointMap& points, FileFormat format) {
  std::string out;
  if (format == FileFormat::Binary) {
    put<std::uint64_t>(out, points.size());
    for (const auto& [id, pt] : points) {
      put<std::uint64_t>(out, pt.point3d_id);
      for (int k = 0; k < 3; ++k) put<double>(out, pt.position[k]);
      for (int k = 0; k < 3; ++k) put<std::uint8_t>(out, pt.color[k]);
      put<double>(out, pt.reprojection_error);
      put<std::uint64_t>(out, pt.track.size());
      for (const auto& el : pt.track) {
        put<std::uint32_t>(out, el.image_id);
        put<std::uint32_t>(out, el.point2d_index);
      }
    }
    return out;
  }
  out += "# 3D point list with one line of data per point:\n";
  out += "#   POINT3D_ID, X, Y, Z, R, G, B, ERROR, TRACK[] as (IMAGE_ID, POINT2D_IDX)\n";
  out += "# Number of points: " + std::to_string(points.size()) + "\n";
  for (const auto& [id, pt] : points) {
    out += std::to_string(pt.point3d_id);
    for (int k = 0; k < 3; ++k) out += " " + format_double(pt.position[k]);
    for (int k = 0; k < 3; ++k) out += " " + std::to_string(pt.color[k]);
    out += " " + format_double(pt.reprojection_error);
    for (const auto& el : pt.track) {
      out += " " + std::to_string(el.image_id) + " " + std::to_string(el.point2d_index);
    }
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// stream overloads

CameraMap parse_cameras(std::istream& source, FileFormat format) {
  return parse_cameras(std::string_view(stream_bytes(source)), format);
}
PoseMap parse_images(std::istream& source, FileFormat format) {
  return parse_images(std::string_view(stream_bytes(source)), format);
}
PointMap parse_points3d(std::istream& source, FileFormat format) {
  return parse_points3d(std::string_view(stream_bytes(source)), format);
}

// ---------------------------------------------------------------------------
// validation

std::string ValidationIssue::describe() const {
  switch (kind) {
    case Kind::DanglingCamera:
      return "DanglingCamera: image " + std::to_string(owner_id) + " references missing camera " +
             std::to_string(referenced_id);
    case Kind::DanglingPoint:
      return "DanglingPoint: image " + std::to_string(owner_id) + " observes missing point " +
             std::to_string(referenced_id);
    case Kind::DanglingImage:
      return "DanglingImage: point " + std::to_string(owner_id) + " is tracked by missing image " +
             std::to_string(referenced_id);
    case Kind::BrokenTrack:
      return "BrokenTrack: point " + std::to_string(owner_id) +
             " references an out-of-range keypoint in image " + std::to_string(referenced_id);
  }
  return "unknown issue";
}

size_t ValidationReport::count(ValidationIssue::Kind kind) const {
  size_t n = 0;
  for (const auto& issue : issues) n += issue.kind == kind;
  return n;
}

ValidationReport validate_reconstruction(const CameraMap& cameras, const PoseMap& poses,
                                         const PointMap& points) {
  using Kind = ValidationIssue::Kind;
  ValidationReport report;
  for (const auto& [image_id, pose] : poses) {
    if (!cameras.contains(pose.camera_id)) {
      report.issues.push_back({Kind::DanglingCamera, image_id, pose.camera_id});
    }
    std::set<std::int64_t> missing;
    for (const auto& obs : pose.observations) {
      if (obs.point3d_id >= 0 && !points.contains(static_cast<std::uint64_t>(obs.point3d_id))) {
        missing.insert(obs.point3d_id);
      }
    }
    for (auto id : missing) {
      report.issues.push_back({Kind::DanglingPoint, image_id, static_cast<std::uint64_t>(id)});
    }
  }
  for (const auto& [point_id, pt] : points) {
    std::set<std::uint32_t> missing;
    for (const auto& el : pt.track) {
      auto it = poses.find(el.image_id);
      if (it == poses.end()) {
        missing.insert(el.image_id);
      } else if (el.point2d_index >= it->second.observations.size() &&
                 !it->second.observations.empty()) {
        report.issues.push_back({Kind::BrokenTrack, point_id, el.image_id});
      }
    }
    for (auto id : missing) report.issues.push_back({Kind::DanglingImage, point_id, id});
  }
  return report;
}

// ---------------------------------------------------------------------------
// directories

namespace {

std::pair<std::string, FileFormat> load_either(const std::filesystem::path& dir,
                                               const std::string& stem) {
  const auto bin = dir / (stem + ".bin");
  const auto txt = dir / (stem + ".txt");
  if (std::filesystem::exists(bin)) return {read_file(bin), FileFormat::Binary};
  if (std::filesystem::exists(txt)) return {read_file(txt), FileFormat::Text};
  fail(ErrorKind::MissingFile, "no " + stem + ".bin or " + stem + ".txt in " + dir.string());
}

}  // namespace

Reconstruction read_reconstruction(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    fail(ErrorKind::MissingFile, "reconstruction directory not found: " + dir.string());
  }
  // Probe all three first so a missing file is reported before any parse error.
  const auto cams = load_either(dir, "cameras");
  const auto imgs = load_either(dir, "images");
  const auto pts = load_either(dir, "points3D");
  Reconstruction rec;
  rec.cameras = parse_cameras(cams.first, cams.second);
  rec.poses = parse_images(imgs.first, imgs.second);
  rec.points = parse_points3d(pts.first, pts.second);
  return rec;
}

void write_reconstruction(const Reconstruction& rec, const std::filesystem::path& dir,
                          FileFormat format) {
  const std::string ext = format == FileFormat::Binary ? ".bin" : ".txt";
  atomic_write_file(dir / ("cameras" + ext), write_cameras(rec.cameras, format));
  atomic_write_file(dir / ("images" + ext), write_images(rec.poses, format));
  atomic_write_file(dir / ("points3D" + ext), write_points3d(rec.points, format));
}

}  // namespace shoesplat::colmap
