#include "srefi/donors.hpp"

#include <algorithm>
#include <cmath>

#include "srefi/error.hpp"

namespace srefi {

GenerationMode parse_mode(const std::string& token) {
  if (token == "expand" || token == "expand_real_id") {
    return GenerationMode::ExpandRealId;
  }
  if (token == "synth" || token == "synth_id") return GenerationMode::SynthId;
  fail(ErrorKind::Config, "unknown mode '" + token + "'");
}

EmbeddingProvider parse_provider(const std::string& token) {
  if (token == "file") return EmbeddingProvider::File;
  if (token == "desk") return EmbeddingProvider::Desk;
  fail(ErrorKind::Config, "unknown embedding provider '" + token + "'");
}

double cosine_similarity(std::span<const double> v1,
                         std::span<const double> v2) {
  if (v1.size() != v2.size()) {
    fail(ErrorKind::Shape, "cosine_similarity: dimension mismatch " +
                               std::to_string(v1.size()) + " vs " +
                               std::to_string(v2.size()));
  }
  double dot = 0.0, n1 = 0.0, n2 = 0.0;
  for (size_t i = 0; i < v1.size(); ++i) {
    dot += v1[i] * v2[i];
    n1 += v1[i] * v1[i];
    n2 += v2[i] * v2[i];
  }
  if (n1 <= 0.0 || n2 <= 0.0) {
    fail(ErrorKind::Numeric, "cosine_similarity: zero-norm vector");
  }
  return dot / (std::sqrt(n1) * std::sqrt(n2));
}

namespace {

constexpr int kDeskSide = 32;

// Exact area average of the source rectangle covered by one target cell.
double area_average(const std::vector<double>& lum, int size, double x0,
                    double x1, double y0, double y1) {
  double acc = 0.0;
  const int ix0 = static_cast<int>(std::floor(x0));
  const int ix1 = static_cast<int>(std::ceil(x1));
  const int iy0 = static_cast<int>(std::floor(y0));
  const int iy1 = static_cast<int>(std::ceil(y1));
  for (int y = iy0; y < iy1; ++y) {
    const double hy = std::min<double>(y + 1, y1) - std::max<double>(y, y0);
    if (hy <= 0) continue;
    for (int x = ix0; x < ix1; ++x) {
      const double wx = std::min<double>(x + 1, x1) - std::max<double>(x, x0);
      if (wx <= 0) continue;
      acc += lum[static_cast<size_t>(y) * size + x] * wx * hy;
    }
  }
  return acc / ((x1 - x0) * (y1 - y0));
}

}  // namespace

std::vector<double> desk_embedding(const ImageRGB8& image) {
  if (image.width != image.height || image.width < 1) {
    fail(ErrorKind::Validation, "desk_embedding: image must be square");
  }
  const int size = image.width;
  std::vector<double> lum(static_cast<size_t>(size) * size);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const double r = image.at(x, y, 0), g = image.at(x, y, 1),
                   b = image.at(x, y, 2);
      lum[static_cast<size_t>(y) * size + x] =
          (0.299 * r + 0.587 * g + 0.114 * b) / 255.0;
    }
  }

  std::vector<double> v(kDeskSide * kDeskSide);
  const double cell = static_cast<double>(size) / kDeskSide;
  for (int ty = 0; ty < kDeskSide; ++ty) {
    for (int tx = 0; tx < kDeskSide; ++tx) {
      v[static_cast<size_t>(ty) * kDeskSide + tx] = area_average(
          lum, size, tx * cell, (tx + 1) * cell, ty * cell, (ty + 1) * cell);
    }
  }

  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= v.size();
  double norm2 = 0.0;
  for (double& x : v) {
    x -= mean;
    norm2 += x * x;
  }
  if (norm2 <= 0.0) {
    fail(ErrorKind::Numeric, "desk_embedding: constant image has zero norm");
  }
  return v;
}

std::map<std::string, std::vector<double>> subject_means(
    const std::map<std::string, std::vector<double>>& per_image,
    const DatasetManifest& manifest) {
  std::map<std::string, std::vector<double>> means;
  for (const auto& [subject, images] : manifest.images_of_subject) {
    std::vector<double> acc;
    size_t count = 0;
    for (const std::string& image_id : images) {  // sorted: fixed order
      auto it = per_image.find(image_id);
      if (it == per_image.end()) continue;
      if (acc.empty()) acc.assign(it->second.size(), 0.0);
      if (acc.size() != it->second.size()) {
        fail(ErrorKind::Shape, "subject_means: inconsistent embedding size for "
                                   "subject " + subject);
      }
      for (size_t i = 0; i < acc.size(); ++i) acc[i] += it->second[i];
      ++count;
    }
    if (count == 0) {
      fail(ErrorKind::MissingData,
           "subject '" + subject + "' has no embedded images");
    }
    for (double& x : acc) x /= static_cast<double>(count);
    means[subject] = std::move(acc);
  }
  return means;
}

EmbeddingIndex build_embedding_index(const DatasetManifest& manifest,
                                     EmbeddingProvider provider,
                                     const ImageLoader& loader) {
  const ImageLoader load =
      loader ? loader
             : ImageLoader([](const FaceRecordRef& ref) {
                 return load_face(ref).image;
               });

  EmbeddingIndex index;
  for (const FaceRecordRef& rec : manifest.records) {
    std::vector<double> v;
    if (provider == EmbeddingProvider::File && !rec.embedding_path.empty()) {
      v = load_embedding_file(rec.embedding_path);
    } else {
      v = desk_embedding(load(rec));
    }
    double norm2 = 0.0;
    for (double x : v) norm2 += x * x;
    if (norm2 <= 0.0) {
      fail(ErrorKind::Numeric,
           "embedding for image '" + rec.image_id + "' has zero norm");
    }
    if (index.dimension == 0) {
      index.dimension = v.size();
    } else if (index.dimension != v.size()) {
      fail(ErrorKind::Shape, "embedding for image '" + rec.image_id +
                                 "' has dimension " + std::to_string(v.size()) +
                                 ", expected " + std::to_string(index.dimension));
    }
    index.per_image[rec.image_id] = std::move(v);
  }
  index.per_subject_mean = subject_means(index.per_image, manifest);
  return index;
}

std::vector<std::string> top_n_proximal(const EmbeddingIndex& index,
                                        const DatasetManifest& manifest,
                                        const std::string& base_subject,
                                        const GroupKey& group, int n) {
  if (n < 1) fail(ErrorKind::Config, "top_n_proximal: n must be positive");
  auto git = manifest.groups.find(group);
  if (git == manifest.groups.end()) {
    fail(ErrorKind::Capacity, "no subjects in group " + group.to_string());
  }
  auto base_it = index.per_subject_mean.find(base_subject);
  if (base_it == index.per_subject_mean.end()) {
    fail(ErrorKind::MissingData, "no mean embedding for subject " + base_subject);
  }

  std::vector<std::pair<double, std::string>> scored;
  for (const std::string& subject : git->second) {
    if (subject == base_subject) continue;
    auto it = index.per_subject_mean.find(subject);
    if (it == index.per_subject_mean.end()) {
      fail(ErrorKind::MissingData, "no mean embedding for subject " + subject);
    }
    scored.emplace_back(cosine_similarity(base_it->second, it->second), subject);
  }
  if (static_cast<int>(scored.size()) < n) {
    fail(ErrorKind::Capacity,
         "group " + group.to_string() + " has only " +
             std::to_string(scored.size()) + " other subjects, need " +
             std::to_string(n));
  }
  std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  std::vector<std::string> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) out.push_back(scored[i].second);
  return out;
}

DonorPool donor_pool_from_subjects(const DatasetManifest& manifest,
                                   const std::string& base_image_id,
                                   const std::vector<std::string>& subjects) {
  DonorPool pool;
  pool.base_image_id = base_image_id;
  pool.mode = GenerationMode::SynthId;
  pool.pool_subject_count = static_cast<int>(subjects.size());
  for (const std::string& subject : subjects) {  // subject rank order
    auto it = manifest.images_of_subject.find(subject);
    if (it == manifest.images_of_subject.end()) {
      fail(ErrorKind::MissingData, "no images for subject " + subject);
    }
    for (const std::string& image_id : it->second) {  // image_id order
      pool.candidate_image_ids.push_back(image_id);
    }
  }
  return pool;
}

DonorPool build_donor_pool(const DatasetManifest& manifest,
                           const EmbeddingIndex& index,
                           const FaceRecordRef& base, GenerationMode mode,
                           int n) {
  if (mode == GenerationMode::ExpandRealId) {
    DonorPool pool;
    pool.base_image_id = base.image_id;
    pool.mode = mode;
    pool.pool_subject_count = 1;
    const auto& images = manifest.images_of_subject.at(base.subject_id);
    for (const std::string& image_id : images) {
      if (image_id != base.image_id) pool.candidate_image_ids.push_back(image_id);
    }
    if (pool.candidate_image_ids.empty()) {
      fail(ErrorKind::InsufficientDonors,
           "subject '" + base.subject_id + "' has no other images to donate");
    }
    return pool;
  }

  const GroupKey group{base.gender, base.ethnicity};
  const std::vector<std::string> subjects =
      top_n_proximal(index, manifest, base.subject_id, group, n);
  return donor_pool_from_subjects(manifest, base.image_id, subjects);
}

}  // namespace srefi
