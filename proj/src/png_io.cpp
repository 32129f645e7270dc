#include "srefi/png_io.hpp"

#include <png.h>

#include <cstdio>
#include <memory>

#include "srefi/error.hpp"

namespace srefi {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void png_error_handler(png_structp png, png_const_charp msg) {
  (void)png;
  fail(ErrorKind::Io, std::string("libpng: ") + msg);
}

void png_warning_handler(png_structp, png_const_charp) {}

}  // namespace

ImageRGB8 read_png(const std::filesystem::path& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) fail(ErrorKind::Io, "cannot open image file: " + path.string());

  png_byte header[8];
  if (std::fread(header, 1, 8, fp.get()) != 8 || png_sig_cmp(header, 0, 8)) {
    fail(ErrorKind::Io, "not a PNG file: " + path.string());
  }

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                           png_error_handler, png_warning_handler);
  if (!png) fail(ErrorKind::Io, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    fail(ErrorKind::Io, "png_create_info_struct failed");
  }

  ImageRGB8 image;
  try {
    png_init_io(png, fp.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    png_set_expand(png);
    png_set_strip_16(png);
    png_set_strip_alpha(png);
    png_set_gray_to_rgb(png);
    png_read_update_info(png, info);

    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    if (png_get_channels(png, info) != 3 || png_get_bit_depth(png, info) != 8) {
      fail(ErrorKind::Io, "unsupported PNG layout after conversion: " + path.string());
    }

    image = ImageRGB8(static_cast<int>(w), static_cast<int>(h));
    std::vector<png_bytep> rows(h);
    for (png_uint_32 y = 0; y < h; ++y) {
      rows[y] = image.data.data() + static_cast<size_t>(y) * w * 3;
    }
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
  } catch (...) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw;
  }
  png_destroy_read_struct(&png, &info, nullptr);
  return image;
}

void write_png(const std::filesystem::path& path, const ImageRGB8& image) {
  if (image.width <= 0 || image.height <= 0) {
    fail(ErrorKind::Shape, "write_png: empty image");
  }
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) fail(ErrorKind::Io, "cannot open for writing: " + path.string());

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                            png_error_handler, png_warning_handler);
  if (!png) fail(ErrorKind::Io, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    fail(ErrorKind::Io, "png_create_info_struct failed");
  }

  try {
    png_init_io(png, fp.get());
    // Fixed encode parameters: byte-identical output for identical pixels.
    png_set_compression_level(png, 6);
    png_set_filter(png, 0, PNG_FILTER_SUB);
    png_set_IHDR(png, info, image.width, image.height, 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);

    std::vector<png_const_bytep> rows(image.height);
    for (int y = 0; y < image.height; ++y) {
      rows[y] = image.data.data() + static_cast<size_t>(y) * image.width * 3;
    }
    png_write_image(png, const_cast<png_bytepp>(rows.data()));
    png_write_end(png, nullptr);
  } catch (...) {
    png_destroy_write_struct(&png, &info);
    throw;
  }
  png_destroy_write_struct(&png, &info);
}

}  // namespace srefi
