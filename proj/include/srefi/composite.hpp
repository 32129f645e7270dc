#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "srefi/dataset.hpp"
#include "srefi/image.hpp"
#include "srefi/mesh.hpp"

namespace srefi {

inline constexpr int kMinDonorBudget = 5;
inline constexpr int kMaxDonorBudget = 16;
inline constexpr int kDefaultDonorBudget = 8;

struct CompositeConfig {
  // Left and right eye share one donor by default; splitting them is opt-in.
  bool split_eyes = false;
  // When set, the key regions use exactly these donors (all must be in the
  // pool); only cheek/jaw and outer donors are drawn at random. This is how
  // every image of one synthetic identity keeps the same eyes/nose/mouth.
  std::optional<std::map<Region, std::string>> fixed_region_donors;
};

struct DonorAssignment {
  std::vector<std::string> per_triangle;        // dual triangle -> image_id
  std::map<Region, std::string> region_donors;  // the four key regions
  std::vector<std::string> distinct_images;     // deterministic order
  int c_donor = 0;
};

struct DonorPool;  // from donors.hpp

DonorAssignment assign_donors(const FaceMesh& mesh, const DonorPool& pool,
                              int budget, uint64_t seed,
                              const CompositeConfig& config = {});

// The seeded key-region donor choice used by assign_donors when no fixed
// donors are given. Exposed so a caller can pin one choice across several
// assignments (one synthetic identity, many images).
std::map<Region, std::string> choose_region_donors(const DonorPool& pool,
                                                   int budget, uint64_t seed,
                                                   bool split_eyes);

struct WarpedPatch {
  struct Pixel {
    int x, y;
  };
  int triangle_index = -1;
  std::vector<Pixel> pixels;                    // target pixels, raster order
  std::vector<std::array<double, 3>> values;    // RGB per pixel
  std::array<double, 6> source_affine{};        // row-major 2x3, source->target
};

// Rasterizes the target triangle (top-left fill rule, pixel centers at
// integer coordinates) and fills it with donor content pulled through the
// inverse affine map with bilinear sampling.
WarpedPatch warp_triangle(const ImageRGB8& donor_image,
                          const std::array<Vec2, 3>& donor_triangle,
                          const std::array<Vec2, 3>& target_triangle,
                          int frame_width, int frame_height,
                          int triangle_index = -1);

// Adds the per-channel difference of means (base triangle minus patch) to
// every patch pixel, clamped to [0, 255].
void mean_shift_colors(WarpedPatch& patch, const ImageRGB8& base_image);

// Pixel data + mesh coordinates for one donor.
struct DonorSource {
  const ImageRGB8* image = nullptr;
  std::vector<Vec2> dual_vertices;  // same topology as the target mesh
};

struct CompositeResult {
  ImageRGB8 mosaic;
  std::map<std::string, MaskU8> masks;  // donor image_id -> contributed pixels
};

// Builds the un-blended mosaic: every dual triangle holds its donor's
// warped, mean-shifted content; per-donor masks partition the frame.
// `target_dual_vertices` are the (possibly reshaped) target coordinates.
CompositeResult composite_face(const FaceRecord& base, const FaceMesh& topology,
                               const std::vector<Vec2>& target_dual_vertices,
                               const DonorAssignment& assignment,
                               const std::map<std::string, DonorSource>& donors);

// Deterministic uniform integer in [0, n) from a seeded mt19937_64, with
// rejection sampling so results do not depend on the standard library's
// distribution implementations.
uint64_t uniform_below(std::mt19937_64& rng, uint64_t n);

}  // namespace srefi
