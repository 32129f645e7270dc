#include "srefi/reshape.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "landmark_groups.hpp"
#include "srefi/error.hpp"

namespace srefi {

namespace {

using namespace lm68;

// Tolerance when deciding whether a ratio is already inside its band, so
// that re-applying the reposition is a no-op.
constexpr double kBandSlack = 1e-9;

double checked_ratio(double numerator, double denominator, const char* what) {
  if (std::abs(denominator) < 1e-9) {
    fail(ErrorKind::Geometry,
         std::string("measure_ratios: zero denominator for ") + what);
  }
  const double r = numerator / denominator;
  if (!std::isfinite(r) || r <= 0.0) {
    fail(ErrorKind::Geometry,
         std::string("measure_ratios: non-positive ratio for ") + what);
  }
  return r;
}

}  // namespace

FaceRatios measure_ratios(const Landmarks& lm) {
  const double chin = lm[kChin].y;
  const double brow = mean_y(lm, kBrowBegin, kBrowEnd);
  const double eye = mean_y(lm, kEyeBegin, kEyeEnd);
  const double nose = lm[kNoseBase].y;
  const double mouth = mean_y(lm, kMouthBegin, kMouthEnd);

  FaceRatios r;
  r.eye_line = checked_ratio(chin - eye, chin - brow, "eye_line");
  r.nose = checked_ratio(chin - nose, chin - eye, "nose");
  r.mouth = checked_ratio(chin - mouth, chin - nose, "mouth");
  return r;
}

RatioBand tukey_hinges(std::vector<double> values) {
  if (values.empty()) {
    fail(ErrorKind::Validation, "tukey_hinges: empty sample");
  }
  std::sort(values.begin(), values.end());
  const size_t n = values.size();
  if (n == 1) return {values[0], values[0]};

  auto median_of = [&](size_t begin, size_t end) {
    const size_t h = end - begin;
    if (h % 2 == 1) return values[begin + h / 2];
    return 0.5 * (values[begin + h / 2 - 1] + values[begin + h / 2]);
  };
  // Exclusive median: for odd n the middle value joins neither half.
  const size_t lower_end = n / 2;
  const size_t upper_begin = (n + 1) / 2;
  return {median_of(0, lower_end), median_of(upper_begin, n)};
}

RatioBands compute_bands(const DatasetManifest& manifest, const GroupKey& group,
                         int min_subjects) {
  std::set<std::string> subjects;
  auto git = manifest.groups.find(group);
  if (git != manifest.groups.end()) {
    subjects.insert(git->second.begin(), git->second.end());
  }

  bool fallback = false;
  if (static_cast<int>(subjects.size()) < min_subjects) {
    fallback = true;
    subjects.clear();
    for (const auto& [g, subs] : manifest.groups) {
      if (g.gender == group.gender) subjects.insert(subs.begin(), subs.end());
    }
    if (static_cast<int>(subjects.size()) < min_subjects) {
      std::ostringstream msg;
      msg << "group " << group.to_string() << " has "
          << (git == manifest.groups.end() ? 0 : git->second.size())
          << " subjects and the gender-wide pool has " << subjects.size()
          << ", need " << min_subjects;
      fail(ErrorKind::Capacity, msg.str());
    }
  }

  std::vector<double> eye_samples, nose_samples, mouth_samples;
  for (const std::string& subject : subjects) {
    for (const std::string& image_id : manifest.images_of_subject.at(subject)) {
      const FaceRecordRef& rec = manifest.record(image_id);
      const Landmarks lm = load_landmarks(rec.landmarks_path, 0, 0);
      const FaceRatios r = measure_ratios(lm);
      eye_samples.push_back(r.eye_line);
      nose_samples.push_back(r.nose);
      mouth_samples.push_back(r.mouth);
    }
  }

  RatioBands bands;
  bands.group = group;
  bands.sample_count = static_cast<int>(eye_samples.size());
  bands.gender_fallback = fallback;
  bands.eye_line = tukey_hinges(std::move(eye_samples));
  bands.nose = tukey_hinges(std::move(nose_samples));
  bands.mouth = tukey_hinges(std::move(mouth_samples));
  return bands;
}

namespace {

// Clamp target for one ratio; 0-delta when already inside the band.
double clamp_ratio(double r, const RatioBand& band) {
  if (r >= band.q1 - kBandSlack && r <= band.q3 + kBandSlack) return r;
  return std::clamp(r, band.q1, band.q3);
}

}  // namespace

RepositionResult reposition_regions(const FaceMesh& mesh,
                                    const Landmarks& base_landmarks,
                                    const RatioBands& bands) {
  const Landmarks& lm = base_landmarks;
  const double chin = lm[kChin].y;
  const double brow = mean_y(lm, kBrowBegin, kBrowEnd);
  const double eye = mean_y(lm, kEyeBegin, kEyeEnd);
  const double nose = lm[kNoseBase].y;
  const double mouth = mean_y(lm, kMouthBegin, kMouthEnd);
  measure_ratios(lm);  // validates denominators

  // Solve feature-line offsets top-down; each ratio depends on the line
  // above it, so later targets are evaluated against the moved lines.
  const double r_eye = (chin - eye) / (chin - brow);
  const double t_eye = clamp_ratio(r_eye, bands.eye_line);
  const double delta_eye = (t_eye == r_eye) ? 0.0
                                            : (chin - t_eye * (chin - brow)) - eye;
  const double eye_moved = eye + delta_eye;
  if (chin - eye_moved <= 0.0) {
    fail(ErrorKind::Geometry, "reposition: eye line pushed past the chin");
  }

  const double r_nose = (chin - nose) / (chin - eye_moved);
  const double t_nose = clamp_ratio(r_nose, bands.nose);
  const double delta_nose =
      (t_nose == r_nose) ? 0.0 : (chin - t_nose * (chin - eye_moved)) - nose;
  const double nose_moved = nose + delta_nose;
  if (chin - nose_moved <= 0.0) {
    fail(ErrorKind::Geometry, "reposition: nose base pushed past the chin");
  }

  const double r_mouth = (chin - mouth) / (chin - nose_moved);
  const double t_mouth = clamp_ratio(r_mouth, bands.mouth);
  const double delta_mouth =
      (t_mouth == r_mouth) ? 0.0 : (chin - t_mouth * (chin - nose_moved)) - mouth;

  auto delta_of = [&](Region r) -> double {
    switch (r) {
      case Region::LeftEye:
      case Region::RightEye:
        return delta_eye;
      case Region::Nose:
        return delta_nose;
      case Region::Mouth:
        return delta_mouth;
      default:
        return 0.0;
    }
  };

  // Per-vertex offset: the average of the deltas of the distinct key regions
  // incident to the vertex. Vertices incident only to cheek/outer triangles
  // stay put, which gives the one-ring linear falloff.
  RepositionResult result;
  result.mesh = mesh;
  std::vector<std::set<Region>> incident_keys(mesh.dual_vertices.size());
  for (size_t i = 0; i < mesh.dual_triangles.size(); ++i) {
    const Region region = mesh.region_labels[i];
    if (region == Region::CheekJaw || region == Region::Outer) continue;
    for (int v : mesh.dual_triangles[i].v) {
      incident_keys[v].insert(region);
    }
  }
  for (size_t v = 0; v < mesh.dual_vertices.size(); ++v) {
    if (incident_keys[v].empty()) continue;
    double acc = 0.0;
    for (Region r : incident_keys[v]) acc += delta_of(r);
    result.mesh.dual_vertices[v].y +=
        acc / static_cast<double>(incident_keys[v].size());
  }

  for (size_t i = 0; i < mesh.dual_triangles.size(); ++i) {
    const Triangle& t = mesh.dual_triangles[i];
    const double before =
        signed_area2(mesh.dual_vertices[t.v[0]], mesh.dual_vertices[t.v[1]],
                     mesh.dual_vertices[t.v[2]]);
    const double after = signed_area2(result.mesh.dual_vertices[t.v[0]],
                                      result.mesh.dual_vertices[t.v[1]],
                                      result.mesh.dual_vertices[t.v[2]]);
    if (after == 0.0 || (before > 0) != (after > 0)) {
      fail(ErrorKind::Geometry,
           "reposition: movement inverts dual triangle " + std::to_string(i));
    }
  }

  result.landmarks = base_landmarks;
  for (int i = kEyeBegin; i < kEyeEnd; ++i) result.landmarks[i].y += delta_eye;
  for (int i = kNoseBegin; i < kNoseEnd; ++i) result.landmarks[i].y += delta_nose;
  for (int i = kMouthBegin; i < kMouthEnd; ++i) {
    result.landmarks[i].y += delta_mouth;
  }
  result.achieved = measure_ratios(result.landmarks);
  return result;
}

void write_bands_csv(const std::filesystem::path& path,
                     const std::vector<RatioBands>& bands) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write: " + path.string());
  out << "group,ratio_name,q1,q3,n\n";
  out.precision(12);
  for (const RatioBands& b : bands) {
    const std::array<std::pair<const char*, const RatioBand*>, 3> rows = {{
        {"eye_line", &b.eye_line}, {"nose", &b.nose}, {"mouth", &b.mouth}}};
    for (const auto& [name, band] : rows) {
      out << b.group.to_string() << "," << name << "," << band->q1 << ","
          << band->q3 << "," << b.sample_count << "\n";
    }
  }
  if (!out) fail(ErrorKind::Io, "write failed: " + path.string());
}

}  // namespace srefi
