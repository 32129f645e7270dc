#include "srefi/composite.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "srefi/donors.hpp"
#include "srefi/error.hpp"

namespace srefi {

uint64_t uniform_below(std::mt19937_64& rng, uint64_t n) {
  if (n == 0) fail(ErrorKind::Numeric, "uniform_below: empty range");
  const uint64_t limit =
      std::numeric_limits<uint64_t>::max() -
      std::numeric_limits<uint64_t>::max() % n;
  uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

namespace {

template <typename T>
void seeded_shuffle(std::vector<T>& items, std::mt19937_64& rng) {
  for (size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[uniform_below(rng, i)]);
  }
}

}  // namespace

namespace {

void check_pool_and_budget(const DonorPool& pool, int budget) {
  if (budget < kMinDonorBudget) {
    fail(ErrorKind::Config, "c_donor budget " + std::to_string(budget) +
                                " below minimum " +
                                std::to_string(kMinDonorBudget));
  }
  if (pool.candidate_image_ids.size() < 2) {
    fail(ErrorKind::InsufficientDonors,
         "donor pool for base '" + pool.base_image_id + "' has " +
             std::to_string(pool.candidate_image_ids.size()) +
             " images, need at least 2");
  }
}

}  // namespace

std::map<Region, std::string> choose_region_donors(const DonorPool& pool,
                                                   int budget, uint64_t seed,
                                                   bool split_eyes) {
  check_pool_and_budget(pool, budget);
  std::mt19937_64 rng(seed);
  std::vector<std::string> shuffled = pool.candidate_image_ids;
  seeded_shuffle(shuffled, rng);
  const size_t k = std::min<size_t>(budget, shuffled.size());

  std::map<Region, std::string> donors;
  if (split_eyes) {
    donors[Region::LeftEye] = shuffled[0];
    donors[Region::RightEye] = shuffled[1 % k];
    donors[Region::Nose] = shuffled[2 % k];
    donors[Region::Mouth] = shuffled[3 % k];
  } else {
    donors[Region::LeftEye] = shuffled[0];
    donors[Region::RightEye] = shuffled[0];
    donors[Region::Nose] = shuffled[1 % k];
    donors[Region::Mouth] = shuffled[2 % k];
  }
  return donors;
}

DonorAssignment assign_donors(const FaceMesh& mesh, const DonorPool& pool,
                              int budget, uint64_t seed,
                              const CompositeConfig& config) {
  check_pool_and_budget(pool, budget);

  std::mt19937_64 rng(seed);
  std::vector<std::string> shuffled = pool.candidate_image_ids;
  seeded_shuffle(shuffled, rng);
  const size_t k = std::min<size_t>(budget, shuffled.size());

  DonorAssignment out;
  const std::array<Region, 4> key_regions = {Region::LeftEye, Region::RightEye,
                                             Region::Nose, Region::Mouth};
  if (config.fixed_region_donors) {
    const std::set<std::string> in_pool(pool.candidate_image_ids.begin(),
                                        pool.candidate_image_ids.end());
    for (Region r : key_regions) {
      auto it = config.fixed_region_donors->find(r);
      if (it == config.fixed_region_donors->end()) {
        fail(ErrorKind::Config, std::string("fixed donor missing for region ") +
                                    region_name(r));
      }
      if (!in_pool.count(it->second)) {
        fail(ErrorKind::Config, "fixed donor '" + it->second +
                                    "' is not in the donor pool");
      }
      out.region_donors[r] = it->second;
    }
  } else {
    out.region_donors =
        choose_region_donors(pool, budget, seed, config.split_eyes);
  }

  std::vector<std::string> key_images;  // region order, dedup
  for (Region r : key_regions) {
    const std::string& id = out.region_donors.at(r);
    if (std::find(key_images.begin(), key_images.end(), id) == key_images.end()) {
      key_images.push_back(id);
    }
  }

  // Fill the budget with cheek donors not already used by a key region.
  std::vector<std::string> cheek_pool;
  const std::set<std::string> key_set(key_images.begin(), key_images.end());
  for (const std::string& id : shuffled) {
    if (key_set.count(id)) continue;
    if (key_images.size() + cheek_pool.size() >= k) break;
    cheek_pool.push_back(id);
  }
  if (cheek_pool.empty()) cheek_pool = key_images;

  std::vector<int> cheek_tris;
  for (size_t i = 0; i < mesh.dual_triangles.size(); ++i) {
    const Region r = mesh.region_labels[i];
    if (r == Region::CheekJaw || r == Region::Outer) {
      cheek_tris.push_back(static_cast<int>(i));
    }
  }
  if (cheek_pool.size() > cheek_tris.size()) {
    cheek_pool.resize(std::max<size_t>(cheek_tris.size(), 1));
  }

  // Place every cheek donor at least once, then fill the rest uniformly.
  std::vector<int> placement = cheek_tris;
  seeded_shuffle(placement, rng);
  out.per_triangle.assign(mesh.dual_triangles.size(), "");
  for (size_t i = 0; i < placement.size(); ++i) {
    const std::string& id =
        i < cheek_pool.size()
            ? cheek_pool[i]
            : cheek_pool[uniform_below(rng, cheek_pool.size())];
    out.per_triangle[placement[i]] = id;
  }
  for (size_t i = 0; i < mesh.dual_triangles.size(); ++i) {
    const Region r = mesh.region_labels[i];
    if (r != Region::CheekJaw && r != Region::Outer) {
      out.per_triangle[i] = out.region_donors.at(r);
    }
  }

  out.distinct_images = key_images;
  for (const std::string& id : cheek_pool) {
    if (!key_set.count(id)) out.distinct_images.push_back(id);
  }
  out.c_donor = static_cast<int>(out.distinct_images.size());
  return out;
}

namespace {

struct Affine {
  // p -> (m00*x + m01*y + m02, m10*x + m11*y + m12)
  double m00, m01, m02, m10, m11, m12;

  Vec2 apply(const Vec2& p) const {
    return {m00 * p.x + m01 * p.y + m02, m10 * p.x + m11 * p.y + m12};
  }
};

// Affine map sending triangle `from` onto triangle `to` vertex by vertex.
Affine affine_between(const std::array<Vec2, 3>& from,
                      const std::array<Vec2, 3>& to) {
  const Vec2 f1 = from[1] - from[0], f2 = from[2] - from[0];
  const Vec2 t1 = to[1] - to[0], t2 = to[2] - to[0];
  const double det = cross(f1, f2);
  if (det == 0.0) {
    fail(ErrorKind::Geometry, "affine_between: degenerate triangle");
  }
  Affine a{};
  if (f1 == t1 && f2 == t2) {
    // Pure translation: keep it exact.
    a.m00 = 1.0; a.m01 = 0.0;
    a.m10 = 0.0; a.m11 = 1.0;
  } else {
    const double inv = 1.0 / det;
    // Linear part L with L*f1 = t1, L*f2 = t2.
    a.m00 = (t1.x * f2.y - t2.x * f1.y) * inv;
    a.m01 = (t2.x * f1.x - t1.x * f2.x) * inv;
    a.m10 = (t1.y * f2.y - t2.y * f1.y) * inv;
    a.m11 = (t2.y * f1.x - t1.y * f2.x) * inv;
  }
  a.m02 = to[0].x - (a.m00 * from[0].x + a.m01 * from[0].y);
  a.m12 = to[0].y - (a.m10 * from[0].x + a.m11 * from[0].y);
  return a;
}

std::array<double, 3> bilinear_sample(const ImageRGB8& img, double x, double y) {
  const double cx = std::clamp(x, 0.0, static_cast<double>(img.width - 1));
  const double cy = std::clamp(y, 0.0, static_cast<double>(img.height - 1));
  const int x0 = std::min(static_cast<int>(cx), img.width - 2 >= 0 ? img.width - 2 : 0);
  const int y0 = std::min(static_cast<int>(cy), img.height - 2 >= 0 ? img.height - 2 : 0);
  const double fx = cx - x0, fy = cy - y0;
  std::array<double, 3> out{};
  for (int c = 0; c < 3; ++c) {
    const double v00 = img.at(x0, y0, c);
    const double v10 = img.at(std::min(x0 + 1, img.width - 1), y0, c);
    const double v01 = img.at(x0, std::min(y0 + 1, img.height - 1), c);
    const double v11 = img.at(std::min(x0 + 1, img.width - 1),
                              std::min(y0 + 1, img.height - 1), c);
    out[c] = (1 - fy) * ((1 - fx) * v00 + fx * v10) +
             fy * ((1 - fx) * v01 + fx * v11);
  }
  return out;
}

// Top-left fill rule: a pixel exactly on an edge belongs to the triangle
// whose directed edge points up, or left when horizontal (positive-area
// winding, y down). Antisymmetric, so shared edges are claimed exactly once.
bool edge_owns_boundary(const Vec2& a, const Vec2& b) {
  const double dy = b.y - a.y;
  const double dx = b.x - a.x;
  return dy > 0.0 || (dy == 0.0 && dx > 0.0);
}

template <typename Fn>
void rasterize_triangle(const std::array<Vec2, 3>& tri, int width, int height,
                        Fn&& emit) {
  std::array<Vec2, 3> v = tri;
  const double area = signed_area2(v[0], v[1], v[2]);
  if (area == 0.0) {
    fail(ErrorKind::Geometry, "rasterize: degenerate triangle");
  }
  if (area < 0) std::swap(v[1], v[2]);

  const double min_x = std::min({v[0].x, v[1].x, v[2].x});
  const double max_x = std::max({v[0].x, v[1].x, v[2].x});
  const double min_y = std::min({v[0].y, v[1].y, v[2].y});
  const double max_y = std::max({v[0].y, v[1].y, v[2].y});
  const int x0 = std::max(0, static_cast<int>(std::ceil(min_x)));
  const int x1 = std::min(width - 1, static_cast<int>(std::floor(max_x)));
  const int y0 = std::max(0, static_cast<int>(std::ceil(min_y)));
  const int y1 = std::min(height - 1, static_cast<int>(std::floor(max_y)));

  for (int py = y0; py <= y1; ++py) {
    for (int px = x0; px <= x1; ++px) {
      const Vec2 p{static_cast<double>(px), static_cast<double>(py)};
      bool inside = true;
      for (int e = 0; e < 3 && inside; ++e) {
        const Vec2& a = v[e];
        const Vec2& b = v[(e + 1) % 3];
        const double s = cross(b - a, p - a);
        if (s < 0.0 || (s == 0.0 && !edge_owns_boundary(a, b))) inside = false;
      }
      if (inside) emit(px, py);
    }
  }
}

bool point_in_triangle_inclusive(const Vec2& p, const std::array<Vec2, 3>& tri) {
  std::array<Vec2, 3> v = tri;
  const double area = signed_area2(v[0], v[1], v[2]);
  if (area == 0.0) return false;
  if (area < 0) std::swap(v[1], v[2]);
  for (int e = 0; e < 3; ++e) {
    if (cross(v[(e + 1) % 3] - v[e], p - v[e]) < 0.0) return false;
  }
  return true;
}

std::array<Vec2, 3> triangle_coords(const std::vector<Vec2>& verts,
                                    const Triangle& t) {
  return {verts[t.v[0]], verts[t.v[1]], verts[t.v[2]]};
}

}  // namespace

WarpedPatch warp_triangle(const ImageRGB8& donor_image,
                          const std::array<Vec2, 3>& donor_triangle,
                          const std::array<Vec2, 3>& target_triangle,
                          int frame_width, int frame_height,
                          int triangle_index) {
  if (signed_area2(donor_triangle[0], donor_triangle[1], donor_triangle[2]) ==
          0.0 ||
      signed_area2(target_triangle[0], target_triangle[1],
                   target_triangle[2]) == 0.0) {
    fail(ErrorKind::Geometry, "warp_triangle: degenerate triangle");
  }
  const Affine forward = affine_between(donor_triangle, target_triangle);
  const Affine inverse = affine_between(target_triangle, donor_triangle);

  WarpedPatch patch;
  patch.triangle_index = triangle_index;
  patch.source_affine = {forward.m00, forward.m01, forward.m02,
                         forward.m10, forward.m11, forward.m12};
  rasterize_triangle(target_triangle, frame_width, frame_height,
                     [&](int px, int py) {
                       const Vec2 src = inverse.apply(
                           {static_cast<double>(px), static_cast<double>(py)});
                       patch.pixels.push_back({px, py});
                       patch.values.push_back(
                           bilinear_sample(donor_image, src.x, src.y));
                     });
  return patch;
}

void mean_shift_colors(WarpedPatch& patch, const ImageRGB8& base_image) {
  if (patch.pixels.empty()) {
    fail(ErrorKind::Validation,
         "mean_shift_colors: empty region (triangle covers no pixels)");
  }
  std::array<double, 3> base_mean{}, patch_mean{};
  for (size_t i = 0; i < patch.pixels.size(); ++i) {
    for (int c = 0; c < 3; ++c) {
      base_mean[c] += base_image.at(patch.pixels[i].x, patch.pixels[i].y, c);
      patch_mean[c] += patch.values[i][c];
    }
  }
  const double n = static_cast<double>(patch.pixels.size());
  for (int c = 0; c < 3; ++c) {
    const double offset = base_mean[c] / n - patch_mean[c] / n;
    for (auto& value : patch.values) {
      value[c] = std::clamp(value[c] + offset, 0.0, 255.0);
    }
  }
}

CompositeResult composite_face(const FaceRecord& base, const FaceMesh& topology,
                               const std::vector<Vec2>& target_dual_vertices,
                               const DonorAssignment& assignment,
                               const std::map<std::string, DonorSource>& donors) {
  if (assignment.per_triangle.size() != topology.dual_triangles.size()) {
    fail(ErrorKind::Validation, "composite_face: assignment size mismatch");
  }
  const int w = base.image.width, h = base.image.height;

  CompositeResult result;
  result.mosaic = base.image;
  for (const std::string& id : assignment.distinct_images) {
    result.masks.emplace(id, MaskU8(w, h));
  }
  MaskU8 covered(w, h);

  for (size_t i = 0; i < topology.dual_triangles.size(); ++i) {
    const std::string& donor_id = assignment.per_triangle[i];
    auto dit = donors.find(donor_id);
    if (dit == donors.end()) {
      fail(ErrorKind::MissingData, "composite_face: no source for donor '" +
                                       donor_id + "'");
    }
    const DonorSource& src = dit->second;
    const Triangle& tri = topology.dual_triangles[i];
    WarpedPatch patch = warp_triangle(
        *src.image, triangle_coords(src.dual_vertices, tri),
        triangle_coords(target_dual_vertices, tri), w, h, static_cast<int>(i));
    if (patch.pixels.empty()) continue;  // sub-pixel sliver
    mean_shift_colors(patch, base.image);

    MaskU8& mask = result.masks.at(donor_id);
    for (size_t p = 0; p < patch.pixels.size(); ++p) {
      const auto [px, py] = patch.pixels[p];
      for (int c = 0; c < 3; ++c) {
        result.mosaic.at(px, py, c) = quantize_u8(patch.values[p][c]);
      }
      mask.at(px, py) = 1;
      covered.at(px, py) = 1;
    }
  }

  // The top-left rule leaves the far frame edges unclaimed; hand each
  // leftover pixel to the first triangle whose closure contains it.
  for (int py = 0; py < h; ++py) {
    for (int px = 0; px < w; ++px) {
      if (covered.at(px, py)) continue;
      const Vec2 p{static_cast<double>(px), static_cast<double>(py)};
      for (size_t i = 0; i < topology.dual_triangles.size(); ++i) {
        const Triangle& tri = topology.dual_triangles[i];
        const auto target = triangle_coords(target_dual_vertices, tri);
        if (!point_in_triangle_inclusive(p, target)) continue;
        const std::string& donor_id = assignment.per_triangle[i];
        const DonorSource& src = donors.at(donor_id);
        const Affine inverse =
            affine_between(target, triangle_coords(src.dual_vertices, tri));
        const Vec2 q = inverse.apply(p);
        // Frame-edge slivers take the warped value without a mean shift.
        std::array<double, 3> value = bilinear_sample(*src.image, q.x, q.y);
        for (int c = 0; c < 3; ++c) {
          result.mosaic.at(px, py, c) = quantize_u8(value[c]);
        }
        result.masks.at(donor_id).at(px, py) = 1;
        covered.at(px, py) = 1;
        break;
      }
    }
  }
  return result;
}

}  // namespace srefi
