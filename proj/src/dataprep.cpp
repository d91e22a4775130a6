#include "shoesplat/dataprep.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "shoesplat/util.hpp"

namespace shoesplat::prep {

std::vector<std::int64_t> sample_frame_indices(std::int64_t total_frames, std::int64_t k) {
  if (k < 1) fail(ErrorKind::InvalidArgument, "frame count k must be >= 1");
  if (total_frames < k) {
    fail(ErrorKind::TooFewFrames, "need " + std::to_string(k) + " frames, have " +
                                      std::to_string(total_frames));
  }
  std::vector<std::int64_t> out(static_cast<size_t>(k));
  for (std::int64_t i = 0; i < k; ++i) {
    // i * total stays far from overflow at any realistic frame count.
    out[static_cast<size_t>(i)] = i * total_frames / k;
  }
  return out;
}

const char* split_name(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
    case Split::Unassigned: return "";
  }
  return "";
}

Split parse_split(const std::string& name) {
  if (name == "train") return Split::Train;
  if (name == "val") return Split::Val;
  if (name == "test") return Split::Test;
  if (name.empty() || name == "unassigned") return Split::Unassigned;
  fail(ErrorKind::FormatError, "unknown split '" + name + "'");
}

void SplitRatios::validate() const {
  if (!(train >= 0.0 && val >= 0.0 && test >= 0.0)) {
    fail(ErrorKind::ConfigError, "split ratios must be non-negative");
  }
  if (std::abs(train + val + test - 1.0) > 1e-9) {
    fail(ErrorKind::ConfigError, "split ratios must sum to 1");
  }
}

std::map<std::string, Split> split_by_video(std::vector<std::string> video_ids,
                                            const SplitRatios& ratios, std::uint64_t seed) {
  ratios.validate();
  std::sort(video_ids.begin(), video_ids.end());
  video_ids.erase(std::unique(video_ids.begin(), video_ids.end()), video_ids.end());
  Rng rng(seed);
  rng.shuffle(video_ids);
  const double n = static_cast<double>(video_ids.size());
  // The small bias keeps products such as 0.29 * 100 from flooring to 28.
  const size_t n_train = static_cast<size_t>(std::floor(ratios.train * n + 1e-9));
  const size_t n_val = std::min(video_ids.size() - n_train,
                                static_cast<size_t>(std::floor(ratios.val * n + 1e-9)));
  std::map<std::string, Split> out;
  for (size_t i = 0; i < video_ids.size(); ++i) {
    out[video_ids[i]] = i < n_train ? Split::Train : (i < n_train + n_val ? Split::Val : Split::Test);
  }
  return out;
}

namespace {

template <typename T, typename Conv>
Image<T> apply_mask_impl(const Image<T>& image, const MaskBuffer& mask, Conv conv) {
  if (image.width() != mask.width() || image.height() != mask.height()) {
    fail(ErrorKind::DimensionMismatch, "mask does not match image");
  }
  Image<T> out = image;
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      if (mask.at(x, y) >= 0.5) continue;
      for (int c = 0; c < image.channels(); ++c) out.at(x, y, c) = conv(c);
    }
  }
  return out;
}

}  // namespace

ImageF apply_mask(const ImageF& image, const MaskBuffer& mask, const Rgb& background) {
  return apply_mask_impl(image, mask, [&](int c) { return background[c % 3]; });
}

ImageU8 apply_mask(const ImageU8& image, const MaskBuffer& mask, const Rgb& background) {
  return apply_mask_impl(image, mask, [&](int c) { return to_u8(background[c % 3]); });
}

CropWindow square_window(int width, int height) {
  const int side = std::min(width, height);
  return {(width - side) / 2, (height - side) / 2, side};
}

geom::PinholeCamera crop_camera(const geom::PinholeCamera& cam, const CropWindow& w) {
  geom::PinholeCamera out = cam;
  out.cx -= w.x0;
  out.cy -= w.y0;
  out.width = w.side;
  out.height = w.side;
  return out;
}

void DatasetManifest::validate() const {
  std::set<std::pair<std::string, std::int64_t>> seen;
  std::map<std::string, Split> video_split;
  for (const auto& e : entries) {
    if (!seen.insert({e.video_id, e.frame_index}).second) {
      fail(ErrorKind::InvalidArgument,
           "duplicate manifest entry " + e.video_id + "/" + std::to_string(e.frame_index));
    }
    auto [it, inserted] = video_split.emplace(e.video_id, e.split);
    if (!inserted && it->second != e.split) {
      fail(ErrorKind::InvalidArgument, "video " + e.video_id + " appears in several splits");
    }
  }
}

std::vector<const ManifestEntry*> DatasetManifest::in_split(Split s) const {
  std::vector<const ManifestEntry*> out;
  for (const auto& e : entries) {
    if (e.split == s) out.push_back(&e);
  }
  return out;
}

namespace {

void check_field(const std::string& f) {
  if (f.find_first_of(",\n\r") != std::string::npos) {
    fail(ErrorKind::InvalidArgument, "manifest field contains a separator: " + f);
  }
}

}  // namespace

std::string manifest_csv(const DatasetManifest& manifest) {
  std::string s = "video_id,frame_index,image_path,mask_path,split\n";
  for (const auto& e : manifest.entries) {
    check_field(e.video_id);
    check_field(e.image_path);
    check_field(e.mask_path);
    s += e.video_id + "," + std::to_string(e.frame_index) + "," + e.image_path + "," + e.mask_path +
         "," + split_name(e.split) + "\n";
  }
  return s;
}

DatasetManifest parse_manifest_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::FormatError, "empty manifest");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "video_id,frame_index,image_path,mask_path,split") {
    fail(ErrorKind::FormatError, "unexpected manifest header: " + line);
  }
  DatasetManifest m;
  size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    size_t start = 0;
    for (;;) {
      const size_t comma = line.find(',', start);
      f.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (f.size() != 5) fail(ErrorKind::FormatError, "manifest line " + std::to_string(lineno) + " needs 5 fields");
    ManifestEntry e;
    e.video_id = f[0];
    const auto r = std::from_chars(f[1].data(), f[1].data() + f[1].size(), e.frame_index);
    if (r.ec != std::errc() || r.ptr != f[1].data() + f[1].size()) {
      fail(ErrorKind::FormatError, "bad frame index on manifest line " + std::to_string(lineno));
    }
    e.image_path = f[2];
    e.mask_path = f[3];
    e.split = parse_split(f[4]);
    m.entries.push_back(std::move(e));
  }
  m.validate();
  return m;
}

void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
  manifest.validate();
  atomic_write_file(path, manifest_csv(manifest));
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
  return parse_manifest_csv(read_file(path));
}

std::string video_id_of(const std::string& image_name) {
  const std::filesystem::path p(image_name);
  auto it = p.begin();
  if (p.has_parent_path() && it != p.end()) return it->string();
  return p.stem().string();
}

}  // namespace shoesplat::prep
