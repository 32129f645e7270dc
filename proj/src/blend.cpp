#include "srefi/blend.hpp"

#include <array>
#include <string>

#include "srefi/error.hpp"

namespace srefi {

namespace {

constexpr double kKernel[kPyramidKernelSize] = {1.0, 4.0, 6.0, 4.0, 1.0};

int reflect101(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * n - 2 - i;
  }
  return i;
}

void check_same_size(const RasterF& a, const RasterF& b, const char* what) {
  if (a.width != b.width || a.height != b.height) {
    fail(ErrorKind::Shape, std::string(what) + ": dimension mismatch " +
                               std::to_string(a.width) + "x" +
                               std::to_string(a.height) + " vs " +
                               std::to_string(b.width) + "x" +
                               std::to_string(b.height));
  }
}

}  // namespace

RasterF gaussian_reduce(const RasterF& image) {
  if (image.width < 2 || image.height < 2 || image.width % 2 != 0 ||
      image.height % 2 != 0) {
    fail(ErrorKind::Shape, "gaussian_reduce: dimensions must be even and >= 2, got " +
                               std::to_string(image.width) + "x" +
                               std::to_string(image.height));
  }
  const int ow = image.width / 2, oh = image.height / 2;

  // Horizontal blur evaluated at even columns only, then vertical.
  RasterF tmp(ow, image.height);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kPyramidKernelSize; ++k) {
        acc += kKernel[k] * image.at(reflect101(2 * x + k - 2, image.width), y);
      }
      tmp.at(x, y) = acc * (1.0 / 16.0);
    }
  }
  RasterF out(ow, oh);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kPyramidKernelSize; ++k) {
        acc += kKernel[k] * tmp.at(x, reflect101(2 * y + k - 2, image.height));
      }
      out.at(x, y) = acc * (1.0 / 16.0);
    }
  }
  return out;
}

RasterF expand(const RasterF& image) {
  const int ow = image.width * 2, oh = image.height * 2;

  // Zero-insertion upsample convolved with the kernel, x2 per axis so a
  // constant image stays constant (each phase of [1,4,6,4,1] sums to 8).
  RasterF tmp(ow, image.height);
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kPyramidKernelSize; ++k) {
        const int j = reflect101(x + k - 2, ow);
        if (j % 2 == 0) acc += kKernel[k] * image.at(j / 2, y);
      }
      tmp.at(x, y) = acc * (2.0 / 16.0);
    }
  }
  RasterF out(ow, oh);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int k = 0; k < kPyramidKernelSize; ++k) {
        const int j = reflect101(y + k - 2, oh);
        if (j % 2 == 0) acc += kKernel[k] * tmp.at(x, j / 2);
      }
      out.at(x, y) = acc * (2.0 / 16.0);
    }
  }
  return out;
}

PyramidStack build_gaussian(const RasterF& image, int levels) {
  if (levels < 1) {
    fail(ErrorKind::Config, "pyramid level count must be >= 1");
  }
  const int divisor = 1 << (levels - 1);
  if (image.width % divisor != 0 || image.height % divisor != 0) {
    fail(ErrorKind::Shape, "build_gaussian: " + std::to_string(image.width) +
                               "x" + std::to_string(image.height) +
                               " not divisible by 2^" +
                               std::to_string(levels - 1) + " = " +
                               std::to_string(divisor));
  }
  PyramidStack stack;
  stack.kind = PyramidStack::Kind::Gaussian;
  stack.levels.push_back(image);
  for (int i = 1; i < levels; ++i) {
    stack.levels.push_back(gaussian_reduce(stack.levels.back()));
  }
  return stack;
}

PyramidStack build_laplacian(const PyramidStack& gaussian) {
  if (gaussian.kind != PyramidStack::Kind::Gaussian || gaussian.levels.empty()) {
    fail(ErrorKind::Validation, "build_laplacian: needs a gaussian stack");
  }
  PyramidStack lap;
  lap.kind = PyramidStack::Kind::Laplacian;
  const size_t n = gaussian.levels.size();
  for (size_t i = 0; i + 1 < n; ++i) {
    const RasterF up = expand(gaussian.levels[i + 1]);
    RasterF diff = gaussian.levels[i];
    for (size_t p = 0; p < diff.data.size(); ++p) diff.data[p] -= up.data[p];
    lap.levels.push_back(std::move(diff));
  }
  lap.levels.push_back(gaussian.levels.back());
  return lap;
}

RasterF blend_level(const RasterF& l_base, const RasterF& l_donor,
                    const RasterF& g_mask) {
  check_same_size(l_base, l_donor, "blend_level");
  check_same_size(l_base, g_mask, "blend_level");
  RasterF out(l_base.width, l_base.height);
  for (size_t i = 0; i < out.data.size(); ++i) {
    const double g = g_mask.data[i];
    out.data[i] = g * l_base.data[i] + (1.0 - g) * l_donor.data[i];
  }
  return out;
}

RasterF collapse(const PyramidStack& laplacian) {
  if (laplacian.kind != PyramidStack::Kind::Laplacian || laplacian.levels.empty()) {
    fail(ErrorKind::Validation, "collapse: needs a laplacian stack");
  }
  RasterF acc = laplacian.levels.back();
  for (size_t i = laplacian.levels.size() - 1; i-- > 0;) {
    RasterF up = expand(acc);
    const RasterF& lap = laplacian.levels[i];
    for (size_t p = 0; p < up.data.size(); ++p) up.data[p] += lap.data[p];
    acc = std::move(up);
  }
  return acc;
}

ImageRGB8 blend_patch(const ImageRGB8& current, const ImageRGB8& donor,
                      const MaskU8& mask_keep_current, int levels) {
  if (!current.same_size(donor) || current.width != mask_keep_current.width ||
      current.height != mask_keep_current.height) {
    fail(ErrorKind::Shape, "blend_patch: input dimensions differ");
  }
  const PyramidStack g_mask =
      build_gaussian(mask_to_raster(mask_keep_current), levels);

  std::array<RasterF, 3> out_channels;
  for (int c = 0; c < 3; ++c) {
    const PyramidStack l_cur =
        build_laplacian(build_gaussian(extract_channel(current, c), levels));
    const PyramidStack l_don =
        build_laplacian(build_gaussian(extract_channel(donor, c), levels));
    PyramidStack blended;
    blended.kind = PyramidStack::Kind::Laplacian;
    for (int i = 0; i < levels; ++i) {
      blended.levels.push_back(
          blend_level(l_cur.levels[i], l_don.levels[i], g_mask.levels[i]));
    }
    out_channels[c] = collapse(blended);
  }
  return merge_channels(out_channels[0], out_channels[1], out_channels[2]);
}

}  // namespace srefi
