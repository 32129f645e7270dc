#pragma once

// Independent reference implementations used to check the library. These are
// written from the definitions, not from the library code paths they verify:
// direct 2D convolution for the pyramid ops, brute-force scoring for cosine
// and ROC, naive polygon/area math for the mesh.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <vector>

#include "srefi/eval.hpp"
#include "srefi/image.hpp"

namespace oracle {

inline int reflect_index(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * n - 2 - i;
  }
  return i;
}

// Full (non-separable) 5x5 binomial convolution with reflect-101 borders.
inline srefi::RasterF convolve5x5(const srefi::RasterF& in) {
  static const double k1[5] = {1, 4, 6, 4, 1};
  srefi::RasterF out(in.width, in.height);
  for (int y = 0; y < in.height; ++y) {
    for (int x = 0; x < in.width; ++x) {
      double acc = 0.0;
      for (int dy = -2; dy <= 2; ++dy) {
        for (int dx = -2; dx <= 2; ++dx) {
          acc += k1[dy + 2] * k1[dx + 2] *
                 in.at(reflect_index(x + dx, in.width),
                       reflect_index(y + dy, in.height));
        }
      }
      out.at(x, y) = acc / 256.0;
    }
  }
  return out;
}

inline srefi::RasterF reduce_reference(const srefi::RasterF& in) {
  const srefi::RasterF blurred = convolve5x5(in);
  srefi::RasterF out(in.width / 2, in.height / 2);
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) out.at(x, y) = blurred.at(2 * x, 2 * y);
  }
  return out;
}

inline srefi::RasterF expand_reference(const srefi::RasterF& in) {
  const int ow = in.width * 2, oh = in.height * 2;
  srefi::RasterF up(ow, oh, 0.0);
  for (int y = 0; y < in.height; ++y) {
    for (int x = 0; x < in.width; ++x) up.at(2 * x, 2 * y) = in.at(x, y);
  }
  static const double k1[5] = {1, 4, 6, 4, 1};
  srefi::RasterF out(ow, oh);
  for (int y = 0; y < oh; ++y) {
    for (int x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (int dy = -2; dy <= 2; ++dy) {
        for (int dx = -2; dx <= 2; ++dx) {
          acc += k1[dy + 2] * k1[dx + 2] *
                 up.at(reflect_index(x + dx, ow), reflect_index(y + dy, oh));
        }
      }
      out.at(x, y) = acc * 4.0 / 256.0;
    }
  }
  return out;
}

inline double cosine_reference(const std::vector<double>& a,
                               const std::vector<double>& b) {
  double dot = 0, na = 0, nb = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

// Exhaustive threshold sweep: for every distinct score t (descending),
// recount accepted pairs from scratch.
inline std::vector<srefi::RocPoint> roc_reference(
    const std::vector<srefi::ScoredPair>& pairs) {
  std::set<double, std::greater<double>> thresholds;
  size_t mated_total = 0, nonmated_total = 0;
  for (const auto& p : pairs) {
    thresholds.insert(p.score);
    ++(p.mated ? mated_total : nonmated_total);
  }
  std::vector<srefi::RocPoint> points;
  points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  for (double t : thresholds) {
    size_t tp = 0, fp = 0;
    for (const auto& p : pairs) {
      if (p.score >= t) ++(p.mated ? tp : fp);
    }
    points.push_back({static_cast<double>(fp) / nonmated_total,
                      static_cast<double>(tp) / mated_total, t});
  }
  return points;
}

// Median/quartiles straight from the textbook definition.
inline double median_reference(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace oracle
