#include "srefi/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "srefi/blend.hpp"
#include "srefi/csv.hpp"
#include "srefi/error.hpp"
#include "srefi/eval.hpp"
#include "srefi/png_io.hpp"

namespace srefi {

namespace {

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed stream index reserved for the per-identity key-donor choice, distinct
// from any image index.
constexpr uint64_t kKeyDonorStream = ~0ULL;

}  // namespace

uint64_t derive_seed(uint64_t master_seed, std::string_view identity,
                     uint64_t index) {
  uint64_t h = splitmix64(master_seed);
  for (char c : identity) {
    h = splitmix64(h ^ static_cast<unsigned char>(c));
  }
  return splitmix64(h ^ index);
}

void validate_config(const RunConfig& config) {
  if (config.images_per_identity < 1) {
    fail(ErrorKind::Config, "images_per_identity must be >= 1");
  }
  if (config.c_donor < kMinDonorBudget || config.c_donor > kMaxDonorBudget) {
    fail(ErrorKind::Config, "c_donor must be in [" +
                                std::to_string(kMinDonorBudget) + ", " +
                                std::to_string(kMaxDonorBudget) + "], got " +
                                std::to_string(config.c_donor));
  }
  if (config.pyramid_levels < 1) {
    fail(ErrorKind::Config, "pyramid_levels must be >= 1");
  }
  if (config.proximal_n < 1) {
    fail(ErrorKind::Config, "proximal_n must be >= 1");
  }
  if (config.mode == GenerationMode::SynthId && config.identity_count < 1) {
    fail(ErrorKind::Config, "identity_count must be >= 1 in synth mode");
  }
  if (config.min_band_subjects < 1) {
    fail(ErrorKind::Config, "min_band_subjects must be >= 1");
  }
  if (config.region_margin_px < 0.0) {
    fail(ErrorKind::Config, "region_margin_px must be >= 0");
  }
}

namespace {

struct FaceCache {
  const DatasetManifest& manifest;
  int divisor;
  MeshConfig mesh_config;
  std::map<std::string, FaceRecord> faces;
  std::map<std::string, FaceMesh> meshes;

  const FaceRecord& face(const std::string& image_id) {
    auto it = faces.find(image_id);
    if (it == faces.end()) {
      it = faces.emplace(image_id, load_face(manifest.record(image_id), divisor))
               .first;
    }
    return it->second;
  }

  const FaceMesh& mesh(const std::string& image_id) {
    auto it = meshes.find(image_id);
    if (it == meshes.end()) {
      const FaceRecord& rec = face(image_id);
      it = meshes
               .emplace(image_id, build_face_mesh(rec.landmarks,
                                                  rec.image.width, mesh_config))
               .first;
    }
    return it->second;
  }
};

struct BandsCache {
  const DatasetManifest& manifest;
  int min_subjects;
  std::map<GroupKey, RatioBands> bands;

  const RatioBands& get(const GroupKey& group) {
    auto it = bands.find(group);
    if (it == bands.end()) {
      it = bands.emplace(group, compute_bands(manifest, group, min_subjects))
               .first;
    }
    return it->second;
  }
};

struct DebugSink {
  bool dump_stages = false;
  bool export_mesh_svg = false;
  std::filesystem::path dir;  // empty disables everything
};

GeneratedImage synthesize_one(
    FaceCache& cache, BandsCache& bands, const RunConfig& config,
    const std::string& base_image_id, const DonorPool& pool, uint64_t seed,
    const std::string& identity_label, const std::string& synthetic_image_id,
    const std::optional<std::map<Region, std::string>>& fixed_region_donors,
    const DebugSink& debug) {
  const FaceRecord& base = cache.face(base_image_id);
  const FaceMesh& mesh = cache.mesh(base_image_id);
  const GroupKey group{base.ref.gender, base.ref.ethnicity};
  const RatioBands& band = bands.get(group);

  RepositionResult reshaped = reposition_regions(mesh, base.landmarks, band);

  CompositeConfig ccfg;
  ccfg.split_eyes = config.split_eyes;
  ccfg.fixed_region_donors = fixed_region_donors;
  const DonorAssignment assignment =
      assign_donors(mesh, pool, config.c_donor, seed, ccfg);

  std::map<std::string, DonorSource> donors;
  for (const std::string& donor_id : assignment.distinct_images) {
    const FaceRecord& rec = cache.face(donor_id);
    DonorSource src;
    src.image = &rec.image;
    src.dual_vertices =
        dual_vertices_for_landmarks(mesh, rec.landmarks, rec.image.width);
    donors.emplace(donor_id, std::move(src));
  }

  const CompositeResult comp = composite_face(
      base, mesh, reshaped.mesh.dual_vertices, assignment, donors);

  // Blend donor patches one by one onto the accumulating face, ordered by
  // the first triangle each donor appears in.
  std::vector<std::string> blend_order;
  {
    std::set<std::string> seen;
    for (const std::string& id : assignment.per_triangle) {
      if (seen.insert(id).second) blend_order.push_back(id);
    }
  }
  const int w = base.image.width, h = base.image.height;
  ImageRGB8 current = base.image;
  for (const std::string& donor_id : blend_order) {
    const MaskU8& donor_mask = comp.masks.at(donor_id);
    MaskU8 keep(w, h, 1);
    ImageRGB8 donor_full = current;
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        if (!donor_mask.at(x, y)) continue;
        keep.at(x, y) = 0;
        for (int c = 0; c < 3; ++c) {
          donor_full.at(x, y, c) = comp.mosaic.at(x, y, c);
        }
      }
    }
    current = blend_patch(current, donor_full, keep, config.pyramid_levels);
  }

  if (!debug.dir.empty() && (debug.dump_stages || debug.export_mesh_svg)) {
    std::filesystem::create_directories(debug.dir);
    if (debug.export_mesh_svg) {
      FaceMesh labeled = reshaped.mesh;
      std::ofstream svg(debug.dir / (synthetic_image_id + ".mesh.svg"));
      svg << mesh_to_svg(labeled);
    }
    if (debug.dump_stages) {
      write_png(debug.dir / (synthetic_image_id + ".mosaic.png"), comp.mosaic);
      // Laplacian levels of the result, normalized per level for display.
      std::array<PyramidStack, 3> laps;
      for (int c = 0; c < 3; ++c) {
        laps[c] = build_laplacian(
            build_gaussian(extract_channel(current, c), config.pyramid_levels));
      }
      for (int level = 0; level < config.pyramid_levels; ++level) {
        std::array<RasterF, 3> view;
        for (int c = 0; c < 3; ++c) {
          view[c] = laps[c].levels[level];
          double lo = view[c].data[0], hi = view[c].data[0];
          for (double v : view[c].data) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
          }
          const double span = hi > lo ? hi - lo : 1.0;
          for (double& v : view[c].data) v = (v - lo) / span * 255.0;
        }
        write_png(debug.dir / (synthetic_image_id + ".lap" +
                               std::to_string(level) + ".png"),
                  merge_channels(view[0], view[1], view[2]));
      }
    }
  }

  GeneratedImage out;
  out.record.synthetic_image_id = synthetic_image_id;
  out.record.identity_label = identity_label;
  out.record.base_image_id = base_image_id;
  out.record.donor_image_ids = assignment.distinct_images;
  out.record.region_donors = assignment.region_donors;
  out.record.seed_used = seed;
  out.record.gender = base.ref.gender;
  out.record.ethnicity = base.ref.ethnicity;
  out.image = std::move(current);
  out.landmarks = reshaped.landmarks;
  return out;
}

bool is_skippable(const Error& e) {
  return e.kind() == ErrorKind::Geometry ||
         e.kind() == ErrorKind::InsufficientDonors;
}

DebugSink debug_sink_for(const RunConfig& config, const std::string& label) {
  DebugSink sink;
  sink.dump_stages = config.dump_stages;
  sink.export_mesh_svg = config.export_mesh_svg;
  if ((sink.dump_stages || sink.export_mesh_svg) && !config.output_dir.empty()) {
    sink.dir = config.output_dir / label;
  }
  return sink;
}

}  // namespace

GenerationOutput run_expand(const DatasetManifest& manifest,
                            const RunConfig& config) {
  validate_config(config);
  FaceCache cache{manifest, 1 << (config.pyramid_levels - 1),
                  MeshConfig{{}, config.region_margin_px}, {}, {}};
  BandsCache bands{manifest, config.min_band_subjects, {}};
  EmbeddingIndex unused_index;  // expand pools never consult embeddings

  GenerationOutput out;
  for (const auto& [subject, images] : manifest.images_of_subject) {
    if (images.size() < 2) {
      if (config.abort_on_degenerate) {
        fail(ErrorKind::Validation,
             "subject '" + subject + "' has a single image");
      }
      out.warnings.push_back("skipping single-image subject '" + subject + "'");
      continue;
    }
    for (int j = 0; j < config.images_per_identity; ++j) {
      const std::string& base_id = images[j % images.size()];
      const uint64_t seed = derive_seed(config.master_seed, subject, j);
      const std::string image_id = subject + "_syn" + std::to_string(j);
      try {
        const DonorPool pool =
            build_donor_pool(manifest, unused_index, manifest.record(base_id),
                             GenerationMode::ExpandRealId, config.proximal_n);
        out.images.push_back(synthesize_one(
            cache, bands, config, base_id, pool, seed, subject, image_id,
            std::nullopt, debug_sink_for(config, subject)));
      } catch (const Error& e) {
        if (config.abort_on_degenerate || !is_skippable(e)) throw;
        out.warnings.push_back("skipping " + image_id + ": " + e.what());
      }
    }
  }
  for (const auto& [group, band] : bands.bands) out.bands_used.push_back(band);
  return out;
}

GenerationOutput run_synth(const DatasetManifest& manifest,
                           const RunConfig& config) {
  validate_config(config);
  FaceCache cache{manifest, 1 << (config.pyramid_levels - 1),
                  MeshConfig{{}, config.region_margin_px}, {}, {}};
  BandsCache bands{manifest, config.min_band_subjects, {}};
  const EmbeddingIndex index =
      build_embedding_index(manifest, config.embedding_provider,
                            [&cache](const FaceRecordRef& ref) {
                              return cache.face(ref.image_id).image;
                            });

  std::vector<GroupKey> group_keys;
  for (const auto& [group, subjects] : manifest.groups) {
    group_keys.push_back(group);
  }
  if (group_keys.empty()) {
    fail(ErrorKind::Validation, "manifest has no demographic groups");
  }

  GenerationOutput out;
  for (int k = 0; k < config.identity_count; ++k) {
    const GroupKey& group = group_keys[k % group_keys.size()];
    const std::vector<std::string>& subjects = manifest.groups.at(group);
    if (static_cast<int>(subjects.size()) <= config.proximal_n) {
      fail(ErrorKind::Capacity,
           "group " + group.to_string() + " has " +
               std::to_string(subjects.size()) + " subjects, need more than " +
               std::to_string(config.proximal_n));
    }

    // Never collide with a real subject id.
    std::string label = "synth_" + std::to_string(k);
    while (manifest.images_of_subject.count(label)) label += "x";

    const std::string& anchor =
        subjects[(k / group_keys.size()) % subjects.size()];
    const std::vector<std::string> proximal =
        top_n_proximal(index, manifest, anchor, group, config.proximal_n);
    const std::set<std::string> proximal_set(proximal.begin(), proximal.end());

    std::vector<std::string> eligible_bases;
    for (const std::string& s : subjects) {
      if (!proximal_set.count(s)) eligible_bases.push_back(s);
    }
    const size_t anchor_pos =
        std::find(eligible_bases.begin(), eligible_bases.end(), anchor) -
        eligible_bases.begin();

    const uint64_t identity_seed =
        derive_seed(config.master_seed, label, kKeyDonorStream);
    DonorPool identity_pool =
        donor_pool_from_subjects(manifest, "", proximal);
    const std::map<Region, std::string> fixed_donors = choose_region_donors(
        identity_pool, config.c_donor, identity_seed, config.split_eyes);

    for (int j = 0; j < config.images_per_identity; ++j) {
      const std::string& base_subject =
          eligible_bases[(anchor_pos + j) % eligible_bases.size()];
      const auto& base_images = manifest.images_of_subject.at(base_subject);
      const std::string& base_id =
          base_images[(j / eligible_bases.size()) % base_images.size()];
      const uint64_t seed = derive_seed(config.master_seed, label, j);
      const std::string image_id = label + "_" + std::to_string(j);

      DonorPool pool = identity_pool;
      pool.base_image_id = base_id;
      try {
        out.images.push_back(synthesize_one(
            cache, bands, config, base_id, pool, seed, label, image_id,
            fixed_donors, debug_sink_for(config, label)));
      } catch (const Error& e) {
        if (config.abort_on_degenerate || !is_skippable(e)) throw;
        out.warnings.push_back("skipping " + image_id + ": " + e.what());
      }
    }
  }
  for (const auto& [group, band] : bands.bands) out.bands_used.push_back(band);
  return out;
}

namespace {

constexpr const char* kOutputHeader =
    "image_id,subject_id,gender,ethnicity,image_path,landmarks_path,"
    "embedding_path,base_image_id,donor_image_ids,seed_used,left_eye_donor,"
    "right_eye_donor,nose_donor,mouth_donor";

std::string join_ids(const std::vector<std::string>& ids) {
  std::string out;
  for (size_t i = 0; i < ids.size(); ++i) {
    if (i) out.push_back(';');
    out += ids[i];
  }
  return out;
}

std::vector<std::string> split_ids(const std::string& joined) {
  std::vector<std::string> ids;
  std::string cur;
  for (char c : joined) {
    if (c == ';') {
      ids.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) ids.push_back(cur);
  return ids;
}

// Writes through a temp-free path with removal of the in-progress file on
// failure, so an aborted run leaves no truncated artifact behind.
template <typename Fn>
void write_with_cleanup(const std::filesystem::path& path, Fn&& writer) {
  try {
    writer(path);
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove(path, ec);
    throw;
  }
}

}  // namespace

std::filesystem::path write_outputs(const GenerationOutput& output,
                                    const std::filesystem::path& output_dir) {
  std::filesystem::create_directories(output_dir);

  std::vector<const GeneratedImage*> ordered;
  ordered.reserve(output.images.size());
  for (const GeneratedImage& gi : output.images) ordered.push_back(&gi);
  std::sort(ordered.begin(), ordered.end(),
            [](const GeneratedImage* a, const GeneratedImage* b) {
              if (a->record.identity_label != b->record.identity_label) {
                return a->record.identity_label < b->record.identity_label;
              }
              return a->record.synthetic_image_id < b->record.synthetic_image_id;
            });

  for (const GeneratedImage* gi : ordered) {
    const std::filesystem::path dir = output_dir / gi->record.identity_label;
    std::filesystem::create_directories(dir);
    write_with_cleanup(dir / (gi->record.synthetic_image_id + ".png"),
                       [&](const std::filesystem::path& p) {
                         write_png(p, gi->image);
                       });
    write_with_cleanup(dir / (gi->record.synthetic_image_id + ".landmarks.txt"),
                       [&](const std::filesystem::path& p) {
                         write_landmarks(p, gi->landmarks);
                       });
  }

  const std::filesystem::path manifest_path = output_dir / "manifest.csv";
  write_with_cleanup(manifest_path, [&](const std::filesystem::path& p) {
    std::ofstream out(p);
    if (!out) fail(ErrorKind::Io, "cannot write: " + p.string());
    out << kOutputHeader << "\n";
    for (const GeneratedImage* gi : ordered) {
      const OutputRecord& r = gi->record;
      const std::string stem = r.identity_label + "/" + r.synthetic_image_id;
      out << join_csv_line(
                 {r.synthetic_image_id, r.identity_label, gender_name(r.gender),
                  r.ethnicity, stem + ".png", stem + ".landmarks.txt", "",
                  r.base_image_id, join_ids(r.donor_image_ids),
                  std::to_string(r.seed_used),
                  r.region_donors.at(Region::LeftEye),
                  r.region_donors.at(Region::RightEye),
                  r.region_donors.at(Region::Nose),
                  r.region_donors.at(Region::Mouth)})
          << "\n";
    }
    if (!out) fail(ErrorKind::Io, "write failed: " + p.string());
  });
  return manifest_path;
}

std::filesystem::path generate(const DatasetManifest& manifest,
                               const RunConfig& config) {
  validate_config(config);
  if (config.output_dir.empty()) {
    fail(ErrorKind::Config, "output directory is required");
  }
  const GenerationOutput output = config.mode == GenerationMode::ExpandRealId
                                      ? run_expand(manifest, config)
                                      : run_synth(manifest, config);
  for (const std::string& warning : output.warnings) {
    std::cerr << "warning: " << warning << "\n";
  }
  const std::filesystem::path manifest_path =
      write_outputs(output, config.output_dir);
  if (config.export_bands_csv) {
    write_bands_csv(*config.export_bands_csv, output.bands_used);
  }
  return manifest_path;
}

std::vector<OutputRecord> read_output_records(
    const std::filesystem::path& manifest_path) {
  const CsvTable table = read_csv(
      manifest_path,
      {"image_id", "subject_id", "gender", "ethnicity", "base_image_id",
       "donor_image_ids", "seed_used", "left_eye_donor", "right_eye_donor",
       "nose_donor", "mouth_donor"});
  std::vector<OutputRecord> records;
  for (const auto& row : table.rows) {
    OutputRecord r;
    r.synthetic_image_id = row[table.column.at("image_id")];
    r.identity_label = row[table.column.at("subject_id")];
    r.gender = parse_gender(row[table.column.at("gender")]);
    r.ethnicity = row[table.column.at("ethnicity")];
    r.base_image_id = row[table.column.at("base_image_id")];
    r.donor_image_ids = split_ids(row[table.column.at("donor_image_ids")]);
    r.seed_used = std::stoull(row[table.column.at("seed_used")]);
    r.region_donors[Region::LeftEye] = row[table.column.at("left_eye_donor")];
    r.region_donors[Region::RightEye] = row[table.column.at("right_eye_donor")];
    r.region_donors[Region::Nose] = row[table.column.at("nose_donor")];
    r.region_donors[Region::Mouth] = row[table.column.at("mouth_donor")];
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace srefi
