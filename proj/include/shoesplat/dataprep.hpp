#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "shoesplat/geometry.hpp"
#include "shoesplat/image.hpp"

namespace shoesplat::prep {

/// floor(i * total / k) for i in [0, k). Throws TooFewFrames when total < k.
std::vector<std::int64_t> sample_frame_indices(std::int64_t total_frames, std::int64_t k);

enum class Split { Train, Val, Test, Unassigned };
const char* split_name(Split s);
Split parse_split(const std::string& name);

struct SplitRatios {
  double train = 0.8;
  double val = 0.1;
  double test = 0.1;

  void validate() const;
};

/// Shuffles the distinct, sorted video ids with `seed` and assigns the first
/// floor(train * n) to train, the next floor(val * n) to val and the rest to
/// test.
std::map<std::string, Split> split_by_video(std::vector<std::string> video_ids,
                                            const SplitRatios& ratios, std::uint64_t seed);

/// Pixels with mask < 0.5 take the background colour.
ImageF apply_mask(const ImageF& image, const MaskBuffer& mask, const Rgb& background = {0, 0, 0});
ImageU8 apply_mask(const ImageU8& image, const MaskBuffer& mask, const Rgb& background = {0, 0, 0});

struct CropWindow {
  int x0 = 0;
  int y0 = 0;
  int side = 0;
};

/// Largest centred square.
CropWindow square_window(int width, int height);

template <typename T>
Image<T> crop(const Image<T>& image, const CropWindow& w) {
  Image<T> out(w.side, w.side, image.channels());
  for (int y = 0; y < w.side; ++y) {
    for (int x = 0; x < w.side; ++x) {
      for (int c = 0; c < image.channels(); ++c) out.at(x, y, c) = image.at(x + w.x0, y + w.y0, c);
    }
  }
  return out;
}

template <typename T>
Image<T> crop_square(const Image<T>& image) {
  return crop(image, square_window(image.width(), image.height()));
}

/// Shifts the principal point by the crop offsets and sets the new size.
geom::PinholeCamera crop_camera(const geom::PinholeCamera& cam, const CropWindow& w);

struct ManifestEntry {
  std::string video_id;
  std::int64_t frame_index = 0;
  std::string image_path;
  std::string mask_path;
  Split split = Split::Unassigned;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;

  /// Throws InvalidArgument on a repeated (video_id, frame_index) or a video
  /// spread over several splits.
  void validate() const;
  std::vector<const ManifestEntry*> in_split(Split s) const;

  friend bool operator==(const DatasetManifest&, const DatasetManifest&) = default;
};

std::string manifest_csv(const DatasetManifest& manifest);
DatasetManifest parse_manifest_csv(const std::string& text);
void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);
DatasetManifest read_manifest(const std::filesystem::path& path);

/// Video id of an image name: its first directory component, or the file stem
/// when the name has no directory.
std::string video_id_of(const std::string& image_name);

}  // namespace shoesplat::prep
