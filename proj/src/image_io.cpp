#include "shoesplat/image_io.hpp"

#include <csetjmp>
#include <cstring>
#include <string>
#include <vector>

#include <png.h>

#include "shoesplat/util.hpp"

namespace shoesplat {
namespace {

struct MemoryReader {
  const std::string* bytes;
  size_t offset = 0;
};

void read_callback(png_structp png, png_bytep out, png_size_t length) {
  auto* reader = static_cast<MemoryReader*>(png_get_io_ptr(png));
  if (reader->offset + length > reader->bytes->size()) {
    png_error(png, "unexpected end of PNG data");
  }
  std::memcpy(out, reader->bytes->data() + reader->offset, length);
  reader->offset += length;
}

void write_callback(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::string*>(png_get_io_ptr(png));
  out->append(reinterpret_cast<const char*>(data), length);
}

void flush_callback(png_structp) {}

struct ErrorSlot {
  char message[256] = {};
};

void error_callback(png_structp png, png_const_charp message) {
  auto* slot = static_cast<ErrorSlot*>(png_get_error_ptr(png));
  std::strncpy(slot->message, message, sizeof(slot->message) - 1);
  png_longjmp(png, 1);
}

// libpng reports failures with longjmp, so each libpng call sequence lives in
// a frame without non-trivial destructors.
bool decode_rows(png_structp png, png_infop info, MemoryReader* reader, ImageU8* image) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_set_read_fn(png, reader, read_callback);
  png_read_info(png, info);
  const png_byte color_type = png_get_color_type(png, info);
  const png_byte bit_depth = png_get_bit_depth(png, info);
  if (bit_depth == 16) png_set_strip_16(png);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_read_update_info(png, info);

  const png_uint_32 width = png_get_image_width(png, info);
  const png_uint_32 height = png_get_image_height(png, info);
  const int channels = png_get_channels(png, info);
  if (width > (1u << 15) || height > (1u << 15)) png_error(png, "image too large");
  *image = ImageU8(static_cast<int>(width), static_cast<int>(height), channels);
  png_bytep base = image->data().data();
  const size_t stride = static_cast<size_t>(width) * channels;
  for (png_uint_32 y = 0; y < height; ++y) png_read_row(png, base + y * stride, nullptr);
  png_read_end(png, nullptr);
  return true;
}

bool encode_rows(png_structp png, png_infop info, std::string* out, const ImageU8* image,
                 int color_type) {
  if (setjmp(png_jmpbuf(png))) return false;
  png_set_write_fn(png, out, write_callback, flush_callback);
  png_set_compression_level(png, 6);
  png_set_IHDR(png, info, image->width(), image->height(), 8, color_type, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  const size_t stride = static_cast<size_t>(image->width()) * image->channels();
  for (int y = 0; y < image->height(); ++y) {
    png_write_row(png, const_cast<png_bytep>(image->data().data() + y * stride));
  }
  png_write_end(png, nullptr);
  return true;
}

void warning_callback(png_structp, png_const_charp) {}

}  // namespace

ImageU8 read_png(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  if (bytes.size() < 8 || png_sig_cmp(reinterpret_cast<png_const_bytep>(bytes.data()), 0, 8) != 0) {
    fail(ErrorKind::FormatError, "not a PNG file: " + path.string());
  }

  ErrorSlot slot;
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &slot, error_callback,
                                           warning_callback);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail(ErrorKind::IoError, "libpng initialisation failed");
  }

  MemoryReader reader{&bytes};
  ImageU8 image;
  const bool ok = decode_rows(png, info, &reader, &image);
  png_destroy_read_struct(&png, &info, nullptr);
  if (!ok) fail(ErrorKind::FormatError, path.string() + ": png: " + slot.message);
  return image;
}

std::string encode_png(const ImageU8& image) {
  int color_type = 0;
  switch (image.channels()) {
    case 1: color_type = PNG_COLOR_TYPE_GRAY; break;
    case 2: color_type = PNG_COLOR_TYPE_GRAY_ALPHA; break;
    case 3: color_type = PNG_COLOR_TYPE_RGB; break;
    case 4: color_type = PNG_COLOR_TYPE_RGBA; break;
    default: fail(ErrorKind::InvalidArgument, "PNG supports 1-4 channels");
  }
  if (image.width() == 0 || image.height() == 0) {
    fail(ErrorKind::InvalidArgument, "cannot encode an empty image");
  }

  ErrorSlot slot;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &slot, error_callback,
                                            warning_callback);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    fail(ErrorKind::IoError, "libpng initialisation failed");
  }

  std::string out;
  const bool ok = encode_rows(png, info, &out, &image, color_type);
  png_destroy_write_struct(&png, &info);
  if (!ok) fail(ErrorKind::IoError, std::string("png: ") + slot.message);
  return out;
}

void write_png(const std::filesystem::path& path, const ImageU8& image) {
  atomic_write_file(path, encode_png(image));
}

}  // namespace shoesplat
