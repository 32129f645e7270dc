#include "srefi/image.hpp"

#include "srefi/error.hpp"

namespace srefi {

RasterF extract_channel(const ImageRGB8& img, int channel) {
  RasterF out(img.width, img.height);
  const size_t n = static_cast<size_t>(img.width) * img.height;
  for (size_t i = 0; i < n; ++i) {
    out.data[i] = static_cast<double>(img.data[i * 3 + channel]);
  }
  return out;
}

RasterF mask_to_raster(const MaskU8& mask) {
  RasterF out(mask.width, mask.height);
  for (size_t i = 0; i < mask.data.size(); ++i) {
    out.data[i] = mask.data[i] ? 1.0 : 0.0;
  }
  return out;
}

ImageRGB8 merge_channels(const RasterF& r, const RasterF& g, const RasterF& b) {
  if (r.width != g.width || r.width != b.width || r.height != g.height ||
      r.height != b.height) {
    fail(ErrorKind::Shape, "merge_channels: channel dimensions differ");
  }
  ImageRGB8 out(r.width, r.height);
  const size_t n = r.data.size();
  for (size_t i = 0; i < n; ++i) {
    out.data[i * 3 + 0] = quantize_u8(r.data[i]);
    out.data[i * 3 + 1] = quantize_u8(g.data[i]);
    out.data[i * 3 + 2] = quantize_u8(b.data[i]);
  }
  return out;
}

}  // namespace srefi
