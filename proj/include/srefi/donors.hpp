#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "srefi/dataset.hpp"

namespace srefi {

enum class GenerationMode { ExpandRealId, SynthId };
enum class EmbeddingProvider { File, Desk };

GenerationMode parse_mode(const std::string& token);
EmbeddingProvider parse_provider(const std::string& token);

// Eq.-style cosine similarity: (v1.v2) / (|v1| |v2|), in [-1, 1].
double cosine_similarity(std::span<const double> v1, std::span<const double> v2);

// Deterministic stand-in for a CNN feature extractor: luminance area-averaged
// to 32x32, scaled to [0,1], then centered by the vector mean.
std::vector<double> desk_embedding(const ImageRGB8& image);

struct EmbeddingIndex {
  size_t dimension = 0;
  std::map<std::string, std::vector<double>> per_image;
  std::map<std::string, std::vector<double>> per_subject_mean;
};

using ImageLoader = std::function<ImageRGB8(const FaceRecordRef&)>;

// Builds per-image embeddings and per-subject means for every record in the
// manifest. With the File provider, records carrying an embedding_path are
// read from file and the rest fall back to desk_embedding; the Desk provider
// computes desk embeddings for everything. `loader` supplies pixels when the
// desk provider needs them (defaults to load_face).
EmbeddingIndex build_embedding_index(const DatasetManifest& manifest,
                                     EmbeddingProvider provider,
                                     const ImageLoader& loader = {});

std::map<std::string, std::vector<double>> subject_means(
    const std::map<std::string, std::vector<double>>& per_image,
    const DatasetManifest& manifest);

// The n subjects in `group` closest to base_subject by cosine similarity of
// subject means, best first; ties broken by ascending subject_id.
std::vector<std::string> top_n_proximal(const EmbeddingIndex& index,
                                        const DatasetManifest& manifest,
                                        const std::string& base_subject,
                                        const GroupKey& group, int n);

struct DonorPool {
  std::string base_image_id;
  GenerationMode mode = GenerationMode::ExpandRealId;
  std::vector<std::string> candidate_image_ids;  // deterministic order
  int pool_subject_count = 0;
};

DonorPool build_donor_pool(const DatasetManifest& manifest,
                           const EmbeddingIndex& index,
                           const FaceRecordRef& base, GenerationMode mode,
                           int n);

// Same as build_donor_pool in synth mode but with a caller-fixed proximal
// subject list (used to keep one donor pool per synthetic identity).
DonorPool donor_pool_from_subjects(const DatasetManifest& manifest,
                                   const std::string& base_image_id,
                                   const std::vector<std::string>& subjects);

}  // namespace srefi
