#pragma once

#include <cstdint>
#include <vector>

namespace srefi {

// Interleaved 8-bit RGB raster.
struct ImageRGB8 {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> data;  // width * height * 3, row-major

  ImageRGB8() = default;
  ImageRGB8(int w, int h, uint8_t fill = 0)
      : width(w), height(h), data(static_cast<size_t>(w) * h * 3, fill) {}

  uint8_t& at(int x, int y, int c) {
    return data[(static_cast<size_t>(y) * width + x) * 3 + c];
  }
  uint8_t at(int x, int y, int c) const {
    return data[(static_cast<size_t>(y) * width + x) * 3 + c];
  }
  bool same_size(const ImageRGB8& o) const {
    return width == o.width && height == o.height;
  }
};

// Single-channel binary mask, one byte per pixel (0 or 1).
struct MaskU8 {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> data;

  MaskU8() = default;
  MaskU8(int w, int h, uint8_t fill = 0)
      : width(w), height(h), data(static_cast<size_t>(w) * h, fill) {}

  uint8_t& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
  uint8_t at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
};

// Single-channel real-valued raster used for all pyramid math.
struct RasterF {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  RasterF() = default;
  RasterF(int w, int h, double fill = 0.0)
      : width(w), height(h), data(static_cast<size_t>(w) * h, fill) {}

  double& at(int x, int y) { return data[static_cast<size_t>(y) * width + x]; }
  double at(int x, int y) const { return data[static_cast<size_t>(y) * width + x]; }
};

// Clamp to [0, 255] and round half up.
inline uint8_t quantize_u8(double v) {
  if (v <= 0.0) return 0;
  if (v >= 255.0) return 255;
  double q = v + 0.5;
  if (q >= 255.5) return 255;
  return static_cast<uint8_t>(q);
}

RasterF extract_channel(const ImageRGB8& img, int channel);
RasterF mask_to_raster(const MaskU8& mask);
ImageRGB8 merge_channels(const RasterF& r, const RasterF& g, const RasterF& b);

}  // namespace srefi
