#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "srefi/dataset.hpp"
#include "srefi/donors.hpp"

namespace srefi {

struct ScoredPair {
  std::string probe_image_id;
  std::string gallery_image_id;
  bool mated = false;
  double score = 0.0;
};

struct RocPoint {
  double far = 0.0;
  double tar = 0.0;
  double threshold = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;  // threshold descending, FAR/TAR ascending
  double auc = 0.0;
};

// Per-component linear min-max over the batch; constant components map to 0.
std::vector<std::vector<double>> minmax_normalize(
    const std::vector<std::vector<double>>& vectors);

struct EvalItem {
  std::string image_id;
  std::string identity_label;
};

// Full probe x gallery cross product (self-pairs by image_id excluded),
// cosine-scored; mated = equal identity labels.
std::vector<ScoredPair> score_pairs(
    const std::vector<EvalItem>& probe_set,
    const std::vector<EvalItem>& gallery_set,
    const std::map<std::string, std::vector<double>>& embeddings);

// Threshold sweep over the distinct observed scores (accept at score >=
// threshold), with a reject-all anchor point; AUC by trapezoid rule.
RocCurve roc(const std::vector<ScoredPair>& pairs);

enum class Experiment { RealVsReal, SynthVsSynth, ExpandVsExpand, ExpandVsReal };

Experiment parse_experiment(const std::string& name);
const char* experiment_name(Experiment e);

struct ExperimentResult {
  RocCurve curve;
  std::vector<ScoredPair> pairs;
  double mean_mated = 0.0;
  double mean_nonmated = 0.0;
};

// Runs one of the four pairings. The synth manifest is the generator's
// output manifest (identity labels in subject_id); it is required for every
// experiment except real_vs_real.
ExperimentResult run_experiment(Experiment experiment,
                                const DatasetManifest& real_manifest,
                                const DatasetManifest* synth_manifest,
                                EmbeddingProvider provider);

std::string roc_to_csv(const RocCurve& curve);
void write_roc_csv(const std::filesystem::path& path, const RocCurve& curve);
void write_scores_csv(const std::filesystem::path& path,
                      const std::vector<ScoredPair>& pairs);

}  // namespace srefi
