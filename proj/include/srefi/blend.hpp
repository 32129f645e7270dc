#pragma once

#include <vector>

#include "srefi/image.hpp"

namespace srefi {

inline constexpr int kPyramidKernelSize = 5;

struct PyramidStack {
  enum class Kind { Gaussian, Laplacian };
  Kind kind = Kind::Gaussian;
  std::vector<RasterF> levels;  // level 0 = full resolution
};

// One pyramid step down: 5x5 binomial blur ([1,4,6,4,1]/16 outer product,
// reflect-101 borders), then every second sample starting at index 0. Both
// dimensions must be even.
RasterF gaussian_reduce(const RasterF& image);

// Zero-insertion upsample by 2x per axis followed by the same kernel scaled
// so constants are preserved; the counterpart of gaussian_reduce.
RasterF expand(const RasterF& image);

PyramidStack build_gaussian(const RasterF& image, int levels);

// lap[i] = g[i] - expand(g[i+1]); the top level keeps the gaussian as is.
PyramidStack build_laplacian(const PyramidStack& gaussian);

// mask * l_base + (1 - mask) * l_donor, per pixel.
RasterF blend_level(const RasterF& l_base, const RasterF& l_donor,
                    const RasterF& g_mask);

// Top-down accumulation: acc = expand(acc) + lap[i].
RasterF collapse(const PyramidStack& laplacian);

// Full per-channel pyramid blend. mask = 1 keeps `current`, mask = 0 lets
// `donor` through; the mask's own gaussian pyramid drives each level.
// Output is clamped to [0, 255] and quantized round-half-up.
ImageRGB8 blend_patch(const ImageRGB8& current, const ImageRGB8& donor,
                      const MaskU8& mask_keep_current, int levels);

}  // namespace srefi
