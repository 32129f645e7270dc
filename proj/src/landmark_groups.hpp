#pragma once

#include "srefi/dataset.hpp"

// 0-based index ranges of the 68-point landmark convention,
// [begin, end) style.
namespace srefi::lm68 {

inline constexpr int kChin = 8;                          // jaw point 9 (1-based)
inline constexpr int kBrowBegin = 17, kBrowEnd = 27;     // both eyebrows
inline constexpr int kNoseBegin = 27, kNoseEnd = 36;     // bridge + base
inline constexpr int kNoseBase = 33;                     // point 34 (1-based)
inline constexpr int kLeftEyeBegin = 36, kLeftEyeEnd = 42;
inline constexpr int kRightEyeBegin = 42, kRightEyeEnd = 48;
inline constexpr int kEyeBegin = 36, kEyeEnd = 48;
inline constexpr int kMouthBegin = 48, kMouthEnd = 68;

inline double mean_y(const srefi::Landmarks& lm, int begin, int end) {
  double acc = 0.0;
  for (int i = begin; i < end; ++i) acc += lm[i].y;
  return acc / (end - begin);
}

}  // namespace srefi::lm68
