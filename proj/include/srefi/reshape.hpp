#pragma once

#include <optional>

#include "srefi/dataset.hpp"
#include "srefi/mesh.hpp"

namespace srefi {

// Vertical placement ratios measured from landmark-derived feature lines
// (chin, brow line, eye line, nose base, mouth line).
struct FaceRatios {
  double eye_line = 0.0;  // (chin - eye line) / (chin - brow line)
  double nose = 0.0;      // (chin - nose base) / (chin - eye line)
  double mouth = 0.0;     // (chin - mouth line) / (chin - nose base)
};

struct RatioBand {
  double q1 = 0.0;
  double q3 = 0.0;
};

struct RatioBands {
  GroupKey group;
  RatioBand eye_line, nose, mouth;
  int sample_count = 0;
  bool gender_fallback = false;  // true when group stats fell back gender-wide
};

inline constexpr int kDefaultMinBandSubjects = 20;

FaceRatios measure_ratios(const Landmarks& landmarks);

// Tukey hinges with the median excluded from both halves.
RatioBand tukey_hinges(std::vector<double> values);

// IQR bands for one demographic group, measured over every face of the
// group. Groups with fewer than min_subjects subjects fall back to
// gender-wide statistics; a still-undersized pool is a capacity error.
RatioBands compute_bands(const DatasetManifest& manifest, const GroupKey& group,
                         int min_subjects = kDefaultMinBandSubjects);

struct RepositionResult {
  FaceMesh mesh;
  Landmarks landmarks;   // feature groups translated with their regions
  FaceRatios achieved;
};

// Translates the eye/nose/mouth dual-mesh regions vertically so the measured
// ratios clamp into the bands. Regions already in band are left untouched.
// Throws a geometry error if the movement would invert a dual triangle.
RepositionResult reposition_regions(const FaceMesh& mesh,
                                    const Landmarks& base_landmarks,
                                    const RatioBands& bands);

void write_bands_csv(const std::filesystem::path& path,
                     const std::vector<RatioBands>& bands);

}  // namespace srefi
