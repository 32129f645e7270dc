#include "srefi/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "landmark_groups.hpp"
#include "srefi/composite.hpp"
#include "srefi/error.hpp"
#include "srefi/geometry.hpp"
#include "srefi/png_io.hpp"

namespace srefi {

namespace {

constexpr double kPi = 3.14159265358979323846;

double uniform_in(std::mt19937_64& rng, double lo, double hi) {
  // 53-bit mantissa draw; avoids distribution-object portability issues.
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

struct FaceGeometry {
  double cx, ear_y, chin_y, face_hw;
  double brow_y, eye_y, nose_y, mouth_y;
  double eye_dx, eye_w, eye_h;
  double nose_w, mouth_w, mouth_h;
};

FaceGeometry geometry_for(int size, uint64_t subject_seed, uint64_t image_seed) {
  std::mt19937_64 rng(subject_seed);
  const double s = size;
  FaceGeometry g;
  g.cx = s * uniform_in(rng, 0.48, 0.52);
  g.face_hw = s * uniform_in(rng, 0.28, 0.36);
  g.chin_y = s * uniform_in(rng, 0.88, 0.93);
  g.eye_y = s * uniform_in(rng, 0.40, 0.48);
  g.brow_y = g.eye_y - s * uniform_in(rng, 0.06, 0.09);
  g.nose_y = g.eye_y + s * uniform_in(rng, 0.14, 0.20);
  g.mouth_y = g.nose_y + s * uniform_in(rng, 0.08, 0.12);
  g.ear_y = g.eye_y + s * 0.02;
  g.eye_dx = s * uniform_in(rng, 0.12, 0.16);
  g.eye_w = s * uniform_in(rng, 0.050, 0.070);
  g.eye_h = s * uniform_in(rng, 0.020, 0.032);
  g.nose_w = s * uniform_in(rng, 0.050, 0.080);
  g.mouth_w = s * uniform_in(rng, 0.10, 0.14);
  g.mouth_h = s * uniform_in(rng, 0.025, 0.045);

  if (image_seed != 0) {
    std::mt19937_64 jitter(image_seed);
    const double j = s * 0.004;
    g.eye_y += uniform_in(jitter, -j, j);
    g.nose_y += uniform_in(jitter, -j, j);
    g.mouth_y += uniform_in(jitter, -j, j);
    g.face_hw += uniform_in(jitter, -j, j);
  }
  return g;
}

struct Appearance {
  double skin_r, skin_g, skin_b;
  double hair_r, hair_g, hair_b;
  double lip_r, lip_g, lip_b;
  double iris;         // iris luminance
  double iris_radius;  // as a fraction of eye height
  double shade;        // vertical shading strength
  double brightness;   // per-image factor
  uint64_t noise_seed;
};

Appearance appearance_for(uint64_t subject_seed, uint64_t image_seed) {
  std::mt19937_64 rng(subject_seed ^ 0xa5a5a5a5a5a5a5a5ULL);
  Appearance a;
  const double tone = uniform_in(rng, 0.35, 0.95);
  a.skin_r = 215.0 * tone + uniform_in(rng, -10, 10);
  a.skin_g = 180.0 * tone + uniform_in(rng, -10, 10);
  a.skin_b = 150.0 * tone + uniform_in(rng, -10, 10);
  const double hair = uniform_in(rng, 0.08, 0.5);
  a.hair_r = 120.0 * hair;
  a.hair_g = 100.0 * hair;
  a.hair_b = 90.0 * hair;
  a.lip_r = a.skin_r * uniform_in(rng, 0.75, 0.95);
  a.lip_g = a.skin_g * uniform_in(rng, 0.45, 0.65);
  a.lip_b = a.skin_b * uniform_in(rng, 0.45, 0.65);
  a.iris = uniform_in(rng, 30, 110);
  a.iris_radius = uniform_in(rng, 0.75, 1.1);
  a.shade = uniform_in(rng, 0.06, 0.18);
  a.brightness = 1.0;
  a.noise_seed = subject_seed ^ 0x5bd1e995;
  if (image_seed != 0) {
    std::mt19937_64 jitter(image_seed ^ 0xc0ffee);
    a.brightness = uniform_in(jitter, 0.96, 1.04);
    a.noise_seed = image_seed;
  }
  return a;
}

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

Landmarks fixture_landmarks(int image_size, uint64_t subject_seed,
                            uint64_t image_seed) {
  const FaceGeometry g = geometry_for(image_size, subject_seed, image_seed);
  Landmarks lm;

  // Jaw contour, left ear over the chin to the right ear.
  for (int i = 0; i <= 16; ++i) {
    const double theta = kPi * (1.0 - i / 16.0);
    lm[i] = {g.cx + g.face_hw * std::cos(theta),
             g.ear_y + (g.chin_y - g.ear_y) * std::sin(theta)};
  }
  // Brows: 5 points each, arched.
  for (int side = 0; side < 2; ++side) {
    const double ex = side == 0 ? g.cx - g.eye_dx : g.cx + g.eye_dx;
    const double span = g.eye_w * 1.5;
    for (int i = 0; i < 5; ++i) {
      const double t = i / 4.0;
      lm[17 + side * 5 + i] = {ex - span + 2 * span * t,
                               g.brow_y - 0.012 * image_size * std::sin(kPi * t)};
    }
  }
  // Nose bridge down the middle, then the base arc.
  const double bridge_top = g.brow_y + 0.02 * image_size;
  const double bridge_bot = g.nose_y - 0.025 * image_size;
  for (int i = 0; i < 4; ++i) {
    const double t = i / 3.0;
    lm[27 + i] = {g.cx, bridge_top + (bridge_bot - bridge_top) * t};
  }
  for (int i = 0; i < 5; ++i) {
    const double t = i / 4.0;
    lm[31 + i] = {g.cx - g.nose_w + 2 * g.nose_w * t,
                  g.nose_y + 0.008 * image_size * std::sin(kPi * t)};
  }
  // Eyes as hexagons: outer corner, two top, inner corner, two bottom.
  for (int side = 0; side < 2; ++side) {
    const double ex = side == 0 ? g.cx - g.eye_dx : g.cx + g.eye_dx;
    const double ey = g.eye_y;
    const double w = g.eye_w, h = g.eye_h;
    const std::array<Vec2, 6> ring = {{
        {ex - w, ey},
        {ex - w / 3, ey - h},
        {ex + w / 3, ey - h},
        {ex + w, ey},
        {ex + w / 3, ey + h},
        {ex - w / 3, ey + h},
    }};
    if (side == 0) {
      for (int i = 0; i < 6; ++i) lm[36 + i] = ring[i];
    } else {
      // Right eye starts at the inner corner per the 68-point convention.
      lm[42] = ring[0];
      lm[43] = ring[1];
      lm[44] = ring[2];
      lm[45] = ring[3];
      lm[46] = ring[4];
      lm[47] = ring[5];
    }
  }
  // Mouth: 12-point outer ring, 8-point inner ring.
  const auto mouth_point = [&](double rx, double ry, double angle, double y_sign) {
    return Vec2{g.cx + rx * std::cos(angle),
                g.mouth_y + y_sign * ry * std::sin(angle)};
  };
  for (int i = 0; i <= 6; ++i) {  // 48..54: left corner, top arc, right corner
    lm[48 + i] = mouth_point(g.mouth_w, g.mouth_h, kPi - kPi * i / 6.0, -1.0);
  }
  for (int i = 1; i <= 5; ++i) {  // 55..59: bottom arc, right to left
    lm[54 + i] = mouth_point(g.mouth_w, g.mouth_h, kPi * i / 6.0, 1.0);
  }
  const double rx2 = g.mouth_w * 0.6, ry2 = g.mouth_h * 0.45;
  for (int i = 0; i <= 4; ++i) {  // 60..64
    lm[60 + i] = mouth_point(rx2, ry2, kPi - kPi * i / 4.0, -1.0);
  }
  for (int i = 1; i <= 3; ++i) {  // 65..67
    lm[64 + i] = mouth_point(rx2, ry2, kPi * i / 4.0, 1.0);
  }

  for (const Vec2& p : lm) {
    if (p.x < 0 || p.x > image_size - 1 || p.y < 0 || p.y > image_size - 1) {
      fail(ErrorKind::Geometry, "fixture_landmarks: point out of bounds");
    }
  }
  return lm;
}

namespace {

void fill_hull(ImageRGB8& img, const std::vector<Vec2>& pts, double r, double g,
               double b) {
  const std::vector<Vec2> hull = convex_hull(pts);
  if (hull.size() < 3) return;
  double min_x = hull[0].x, max_x = hull[0].x, min_y = hull[0].y,
         max_y = hull[0].y;
  for (const Vec2& p : hull) {
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
  for (int y = std::max(0, (int)min_y); y <= std::min(img.height - 1, (int)max_y); ++y) {
    for (int x = std::max(0, (int)min_x); x <= std::min(img.width - 1, (int)max_x); ++x) {
      if (!point_in_convex_polygon({(double)x, (double)y}, hull)) continue;
      img.at(x, y, 0) = quantize_u8(r);
      img.at(x, y, 1) = quantize_u8(g);
      img.at(x, y, 2) = quantize_u8(b);
    }
  }
}

}  // namespace

ImageRGB8 render_fixture_face(const Landmarks& lm, int image_size,
                              uint64_t subject_seed, uint64_t image_seed) {
  const Appearance ap = appearance_for(subject_seed, image_seed);
  const int s = image_size;
  ImageRGB8 img(s, s);

  // Backdrop.
  for (int y = 0; y < s; ++y) {
    for (int x = 0; x < s; ++x) {
      img.at(x, y, 0) = quantize_u8(ap.hair_r);
      img.at(x, y, 1) = quantize_u8(ap.hair_g);
      img.at(x, y, 2) = quantize_u8(ap.hair_b);
    }
  }

  // Head ellipse from the jaw extremes, extended over the forehead.
  const double cx = (lm[0].x + lm[16].x) / 2.0;
  const double rx = (lm[16].x - lm[0].x) / 2.0 + 0.02 * s;
  const double brow_y = lm68::mean_y(lm, lm68::kBrowBegin, lm68::kBrowEnd);
  const double top_y = brow_y - 0.17 * s;
  const double cy = (top_y + lm[8].y) / 2.0;
  const double ry = (lm[8].y - top_y) / 2.0 + 0.01 * s;
  for (int y = 0; y < s; ++y) {
    for (int x = 0; x < s; ++x) {
      const double nx = (x - cx) / rx, ny = (y - cy) / ry;
      if (nx * nx + ny * ny > 1.0) continue;
      const double shade = 1.0 - ap.shade * ny - 0.05 * nx * nx;
      img.at(x, y, 0) = quantize_u8(ap.skin_r * shade);
      img.at(x, y, 1) = quantize_u8(ap.skin_g * shade);
      img.at(x, y, 2) = quantize_u8(ap.skin_b * shade);
    }
  }

  // Brows: bands around the piecewise-linear brow curves.
  for (int side = 0; side < 2; ++side) {
    const int base = 17 + side * 5;
    const double thick = 0.012 * s;
    for (int seg = 0; seg < 4; ++seg) {
      const Vec2 a = lm[base + seg], b = lm[base + seg + 1];
      const int x0 = std::max(0, (int)std::floor(std::min(a.x, b.x)));
      const int x1 = std::min(s - 1, (int)std::ceil(std::max(a.x, b.x)));
      for (int x = x0; x <= x1; ++x) {
        const double t = (b.x == a.x) ? 0.0 : (x - a.x) / (b.x - a.x);
        const double yc = a.y + (b.y - a.y) * std::clamp(t, 0.0, 1.0);
        for (int y = std::max(0, (int)(yc - thick));
             y <= std::min(s - 1, (int)(yc + thick)); ++y) {
          img.at(x, y, 0) = quantize_u8(ap.hair_r * 0.8);
          img.at(x, y, 1) = quantize_u8(ap.hair_g * 0.8);
          img.at(x, y, 2) = quantize_u8(ap.hair_b * 0.8);
        }
      }
    }
  }

  // Nose: darken a strip along the bridge and the base arc.
  for (int i = 27; i <= 34; ++i) {
    const Vec2 a = lm[i], b = lm[std::min(i + 1, 35)];
    const int steps = 8;
    for (int k = 0; k <= steps; ++k) {
      const double t = k / static_cast<double>(steps);
      const int px = (int)std::lround(a.x + (b.x - a.x) * t);
      const int py = (int)std::lround(a.y + (b.y - a.y) * t);
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          const int x = px + dx, y = py + dy;
          if (x < 0 || x >= s || y < 0 || y >= s) continue;
          for (int c = 0; c < 3; ++c) {
            img.at(x, y, c) = quantize_u8(img.at(x, y, c) * 0.88);
          }
        }
      }
    }
  }

  // Eyes: sclera fill, then iris and pupil discs.
  for (int side = 0; side < 2; ++side) {
    const int begin = side == 0 ? lm68::kLeftEyeBegin : lm68::kRightEyeBegin;
    std::vector<Vec2> ring(lm.begin() + begin, lm.begin() + begin + 6);
    fill_hull(img, ring, 235, 232, 228);
    Vec2 center{0, 0};
    double h = 0;
    for (const Vec2& p : ring) center = center + p;
    center = center * (1.0 / 6.0);
    for (const Vec2& p : ring) h = std::max(h, std::abs(p.y - center.y));
    const double radius = h * ap.iris_radius;
    for (int y = (int)(center.y - radius); y <= (int)(center.y + radius) + 1; ++y) {
      for (int x = (int)(center.x - radius); x <= (int)(center.x + radius) + 1; ++x) {
        if (x < 0 || x >= s || y < 0 || y >= s) continue;
        const double d2 = (x - center.x) * (x - center.x) +
                          (y - center.y) * (y - center.y);
        if (d2 > radius * radius) continue;
        const double v = d2 < radius * radius * 0.2 ? ap.iris * 0.4 : ap.iris;
        img.at(x, y, 0) = quantize_u8(v);
        img.at(x, y, 1) = quantize_u8(v * 0.9);
        img.at(x, y, 2) = quantize_u8(v * 0.8);
      }
    }
  }

  // Mouth: lips from the outer ring, darker slit from the inner ring.
  {
    std::vector<Vec2> outer(lm.begin() + lm68::kMouthBegin, lm.begin() + 60);
    fill_hull(img, outer, ap.lip_r, ap.lip_g, ap.lip_b);
    std::vector<Vec2> inner(lm.begin() + 60, lm.begin() + 68);
    fill_hull(img, inner, ap.lip_r * 0.6, ap.lip_g * 0.6, ap.lip_b * 0.6);
  }

  // Per-image brightness and noise.
  uint64_t noise = ap.noise_seed;
  for (size_t i = 0; i < img.data.size(); ++i) {
    noise = splitmix64(noise);
    const double n = static_cast<double>(noise % 5) - 2.0;
    img.data[i] = quantize_u8(img.data[i] * ap.brightness + n);
  }
  return img;
}

std::filesystem::path make_fixture_dataset(const std::filesystem::path& dir,
                                           const FixtureSpec& spec) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "images");
  fs::create_directories(dir / "landmarks");
  if (spec.write_embeddings) fs::create_directories(dir / "embeddings");

  std::vector<FaceRecordRef> records;
  for (int si = 0; si < spec.subjects; ++si) {
    char subject_id[16];
    std::snprintf(subject_id, sizeof subject_id, "s%03d", si);
    const int group = spec.group_count > 0 ? si % spec.group_count : 0;
    const Gender gender = (group % 2 == 0) ? Gender::Male : Gender::Female;
    const std::string ethnicity = "group" + std::string(1, char('a' + group / 2));
    const uint64_t subject_seed = splitmix64(spec.seed ^ (0x1000 + si));

    for (int ii = 0; ii < spec.images_per_subject; ++ii) {
      const uint64_t image_seed =
          ii == 0 ? 0 : splitmix64(subject_seed ^ (0x9000 + ii));
      const std::string image_id =
          std::string(subject_id) + "_i" + std::to_string(ii);
      const Landmarks lm =
          fixture_landmarks(spec.image_size, subject_seed, image_seed);
      const ImageRGB8 img =
          render_fixture_face(lm, spec.image_size, subject_seed, image_seed);

      write_png(dir / "images" / (image_id + ".png"), img);
      write_landmarks(dir / "landmarks" / (image_id + ".txt"), lm);

      FaceRecordRef rec;
      rec.image_id = image_id;
      rec.subject_id = subject_id;
      rec.gender = gender;
      rec.ethnicity = ethnicity;
      rec.image_path = "images/" + image_id + ".png";
      rec.landmarks_path = "landmarks/" + image_id + ".txt";
      if (spec.write_embeddings) {
        std::ofstream emb(dir / "embeddings" / (image_id + ".txt"));
        emb.precision(10);
        // Small per-subject vector with per-image perturbation.
        std::mt19937_64 erng(subject_seed ^ 0xe0e0);
        for (int d = 0; d < 8; ++d) {
          double v = uniform_in(erng, -1.0, 1.0);
          v += 0.01 * static_cast<double>((image_seed >> (8 * (d % 8))) & 0xff) /
               255.0;
          emb << (d ? "," : "") << v;
        }
        emb << "\n";
        rec.embedding_path = "embeddings/" + image_id + ".txt";
      }
      records.push_back(std::move(rec));
    }
  }

  const fs::path manifest_path = dir / "manifest.csv";
  write_manifest(manifest_path, records);
  return manifest_path;
}

}  // namespace srefi
