#pragma once

#include <cstdint>
#include <filesystem>

#include "srefi/dataset.hpp"

namespace srefi {

// Deterministic synthetic face data: plausible 68-point landmark sets and
// matching rendered portraits. Subjects differ strongly in geometry and
// coloring; images of one subject differ only by small jitter, brightness
// and noise. Used by the test suites and the `srefi fixture` subcommand to
// produce demo datasets.

Landmarks fixture_landmarks(int image_size, uint64_t subject_seed,
                            uint64_t image_seed = 0);

ImageRGB8 render_fixture_face(const Landmarks& landmarks, int image_size,
                              uint64_t subject_seed, uint64_t image_seed = 0);

struct FixtureSpec {
  int subjects = 10;
  int images_per_subject = 2;
  int image_size = 128;
  uint64_t seed = 7;
  int group_count = 1;          // demographic groups, subjects cycle through
  bool write_embeddings = false;  // also write embedding sidecar files
};

// Writes images/, landmarks/ (and optionally embeddings/) plus manifest.csv
// under `dir`; returns the manifest path.
std::filesystem::path make_fixture_dataset(const std::filesystem::path& dir,
                                           const FixtureSpec& spec);

}  // namespace srefi
