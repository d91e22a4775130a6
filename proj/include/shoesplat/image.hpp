#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "shoesplat/error.hpp"

namespace shoesplat {

/// Interleaved row-major image: `height` rows (N) by `width` columns (M),
/// `channels` samples per pixel.
template <typename T>
class Image {
 public:
  using value_type = T;

  Image() = default;
  Image(int width, int height, int channels, T fill = T{})
      : width_(width), height_(height), channels_(channels),
        data_(static_cast<size_t>(width) * height * channels, fill) {
    if (width < 0 || height < 0 || channels <= 0) {
      fail(ErrorKind::InvalidArgument, "image dimensions must be non-negative");
    }
  }

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  size_t pixel_count() const { return static_cast<size_t>(width_) * height_; }
  size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  T& at(int x, int y, int c = 0) { return data_[index(x, y, c)]; }
  const T& at(int x, int y, int c = 0) const { return data_[index(x, y, c)]; }

  std::vector<T>& data() { return data_; }
  const std::vector<T>& data() const { return data_; }

  bool same_shape(const Image& other) const {
    return width_ == other.width_ && height_ == other.height_ &&
           channels_ == other.channels_;
  }

  friend bool operator==(const Image& a, const Image& b) {
    return a.same_shape(b) && a.data_ == b.data_;
  }

 private:
  size_t index(int x, int y, int c) const {
    return (static_cast<size_t>(y) * width_ + x) * channels_ + c;
  }

  int width_ = 0;
  int height_ = 0;
  int channels_ = 1;
  std::vector<T> data_;
};

using ImageU8 = Image<std::uint8_t>;
/// Linear color in [0,1].
using ImageF = Image<double>;
/// Single-channel soft mask in [0,1]; foreground where value >= 0.5.
using MaskBuffer = Image<double>;

using Rgb = std::array<double, 3>;

inline std::uint8_t to_u8(double v) {
  return static_cast<std::uint8_t>(std::lround(255.0 * std::clamp(v, 0.0, 1.0)));
}

inline ImageF to_float(const ImageU8& img) {
  ImageF out(img.width(), img.height(), img.channels());
  std::transform(img.data().begin(), img.data().end(), out.data().begin(),
                 [](std::uint8_t v) { return v / 255.0; });
  return out;
}

inline ImageU8 to_u8(const ImageF& img) {
  ImageU8 out(img.width(), img.height(), img.channels());
  std::transform(img.data().begin(), img.data().end(), out.data().begin(),
                 [](double v) { return to_u8(v); });
  return out;
}

/// Drops an alpha channel if present.
inline ImageU8 to_rgb(const ImageU8& img) {
  if (img.channels() == 3) return img;
  ImageU8 out(img.width(), img.height(), 3);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      for (int c = 0; c < 3; ++c) {
        out.at(x, y, c) = img.at(x, y, img.channels() >= 3 ? c : 0);
      }
    }
  }
  return out;
}

inline MaskBuffer mask_from_u8(const ImageU8& img) {
  MaskBuffer out(img.width(), img.height(), 1);
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) out.at(x, y) = img.at(x, y, 0) / 255.0;
  }
  return out;
}

inline ImageU8 mask_to_u8(const MaskBuffer& mask) {
  ImageU8 out(mask.width(), mask.height(), 1);
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      out.at(x, y) = mask.at(x, y) >= 0.5 ? 255 : 0;
    }
  }
  return out;
}

}  // namespace shoesplat
