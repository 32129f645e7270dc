#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "srefi/composite.hpp"
#include "srefi/dataset.hpp"
#include "srefi/donors.hpp"
#include "srefi/mesh.hpp"
#include "srefi/reshape.hpp"

namespace srefi {

struct RunConfig {
  GenerationMode mode = GenerationMode::SynthId;
  int images_per_identity = 1;
  int identity_count = 0;  // synth mode only
  int c_donor = kDefaultDonorBudget;
  int proximal_n = 10;
  int pyramid_levels = kDefaultPyramidLevels;
  uint64_t master_seed = 0;
  EmbeddingProvider embedding_provider = EmbeddingProvider::Desk;
  std::filesystem::path output_dir;

  int min_band_subjects = kDefaultMinBandSubjects;
  bool split_eyes = false;
  // Subjects that cannot be synthesized (single image, degenerate geometry)
  // are skipped with a warning unless this is set.
  bool abort_on_degenerate = false;
  bool dump_stages = false;
  bool export_mesh_svg = false;
  std::optional<std::filesystem::path> export_bands_csv;
  double region_margin_px = 2.0;
};

void validate_config(const RunConfig& config);

struct OutputRecord {
  std::string synthetic_image_id;
  std::string identity_label;  // real subject_id or minted synth label
  std::string base_image_id;
  std::vector<std::string> donor_image_ids;     // the c_donor distinct donors
  std::map<Region, std::string> region_donors;  // key-region provenance
  uint64_t seed_used = 0;
  Gender gender = Gender::Male;
  std::string ethnicity;
};

struct GeneratedImage {
  OutputRecord record;
  ImageRGB8 image;
  Landmarks landmarks;  // after reshaping
};

struct GenerationOutput {
  std::vector<GeneratedImage> images;
  std::vector<std::string> warnings;
  std::vector<RatioBands> bands_used;
};

// Stable per-image seed: a splitmix64 chain over (master, identity, index).
uint64_t derive_seed(uint64_t master_seed, std::string_view identity,
                     uint64_t index);

GenerationOutput run_expand(const DatasetManifest& manifest,
                            const RunConfig& config);
GenerationOutput run_synth(const DatasetManifest& manifest,
                           const RunConfig& config);

// Writes PNGs as <identity_label>/<synthetic_image_id>.png plus landmark
// sidecars, and a manifest CSV loadable by load_manifest (the provenance
// columns ride along as extra columns). Returns the manifest path.
std::filesystem::path write_outputs(const GenerationOutput& output,
                                    const std::filesystem::path& output_dir);

// Full run: generate per config.mode, write outputs (plus any debug
// exports), return the output manifest path.
std::filesystem::path generate(const DatasetManifest& manifest,
                               const RunConfig& config);

// Parses an output manifest's provenance columns back into OutputRecords.
std::vector<OutputRecord> read_output_records(
    const std::filesystem::path& manifest_path);

}  // namespace srefi
