#include "srefi/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "srefi/error.hpp"

namespace srefi {

std::vector<std::vector<double>> minmax_normalize(
    const std::vector<std::vector<double>>& vectors) {
  if (vectors.empty()) {
    fail(ErrorKind::Validation, "minmax_normalize: empty batch");
  }
  const size_t dim = vectors.front().size();
  for (const auto& v : vectors) {
    if (v.size() != dim) {
      fail(ErrorKind::Shape, "minmax_normalize: inconsistent dimensions");
    }
  }
  std::vector<double> lo(dim, std::numeric_limits<double>::infinity());
  std::vector<double> hi(dim, -std::numeric_limits<double>::infinity());
  for (const auto& v : vectors) {
    for (size_t j = 0; j < dim; ++j) {
      lo[j] = std::min(lo[j], v[j]);
      hi[j] = std::max(hi[j], v[j]);
    }
  }
  std::vector<std::vector<double>> out = vectors;
  for (auto& v : out) {
    for (size_t j = 0; j < dim; ++j) {
      const double span = hi[j] - lo[j];
      v[j] = span > 0.0 ? (v[j] - lo[j]) / span : 0.0;
    }
  }
  return out;
}

std::vector<ScoredPair> score_pairs(
    const std::vector<EvalItem>& probe_set,
    const std::vector<EvalItem>& gallery_set,
    const std::map<std::string, std::vector<double>>& embeddings) {
  auto embedding_of = [&](const std::string& image_id) -> const std::vector<double>& {
    auto it = embeddings.find(image_id);
    if (it == embeddings.end()) {
      fail(ErrorKind::Data, "missing embedding for image '" + image_id + "'");
    }
    return it->second;
  };

  std::vector<ScoredPair> pairs;
  pairs.reserve(probe_set.size() * gallery_set.size());
  for (const EvalItem& probe : probe_set) {
    const auto& pv = embedding_of(probe.image_id);
    for (const EvalItem& gallery : gallery_set) {
      if (probe.image_id == gallery.image_id) continue;
      ScoredPair pair;
      pair.probe_image_id = probe.image_id;
      pair.gallery_image_id = gallery.image_id;
      pair.mated = probe.identity_label == gallery.identity_label;
      pair.score = cosine_similarity(pv, embedding_of(gallery.image_id));
      pairs.push_back(std::move(pair));
    }
  }
  return pairs;
}

RocCurve roc(const std::vector<ScoredPair>& pairs) {
  size_t mated_total = 0, nonmated_total = 0;
  for (const ScoredPair& p : pairs) {
    ++(p.mated ? mated_total : nonmated_total);
  }
  if (mated_total == 0 || nonmated_total == 0) {
    fail(ErrorKind::Evaluation,
         "roc: need at least one mated and one nonmated pair (got " +
             std::to_string(mated_total) + " mated, " +
             std::to_string(nonmated_total) + " nonmated)");
  }

  std::vector<double> thresholds;
  thresholds.reserve(pairs.size());
  for (const ScoredPair& p : pairs) thresholds.push_back(p.score);
  std::sort(thresholds.begin(), thresholds.end(), std::greater<>());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                   thresholds.end());

  RocCurve curve;
  curve.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  // Descending sweep; counts are cumulative as the threshold loosens.
  std::vector<ScoredPair> sorted = pairs;
  std::sort(sorted.begin(), sorted.end(),
            [](const ScoredPair& a, const ScoredPair& b) {
              return a.score > b.score;
            });
  size_t idx = 0, mated_acc = 0, nonmated_acc = 0;
  for (double t : thresholds) {
    while (idx < sorted.size() && sorted[idx].score >= t) {
      ++(sorted[idx].mated ? mated_acc : nonmated_acc);
      ++idx;
    }
    curve.points.push_back(
        {static_cast<double>(nonmated_acc) / static_cast<double>(nonmated_total),
         static_cast<double>(mated_acc) / static_cast<double>(mated_total), t});
  }

  double auc = 0.0;
  for (size_t i = 0; i + 1 < curve.points.size(); ++i) {
    const RocPoint& a = curve.points[i];
    const RocPoint& b = curve.points[i + 1];
    auc += (b.far - a.far) * (a.tar + b.tar) * 0.5;
  }
  curve.auc = auc;
  return curve;
}

Experiment parse_experiment(const std::string& name) {
  if (name == "real_vs_real") return Experiment::RealVsReal;
  if (name == "synth_vs_synth") return Experiment::SynthVsSynth;
  if (name == "expand_vs_expand") return Experiment::ExpandVsExpand;
  if (name == "expand_vs_real") return Experiment::ExpandVsReal;
  fail(ErrorKind::Config, "unknown experiment '" + name + "'");
}

const char* experiment_name(Experiment e) {
  switch (e) {
    case Experiment::RealVsReal: return "real_vs_real";
    case Experiment::SynthVsSynth: return "synth_vs_synth";
    case Experiment::ExpandVsExpand: return "expand_vs_expand";
    case Experiment::ExpandVsReal: return "expand_vs_real";
  }
  return "?";
}

namespace {

std::vector<EvalItem> items_of(const DatasetManifest& manifest) {
  std::vector<EvalItem> items;
  items.reserve(manifest.records.size());
  for (const FaceRecordRef& rec : manifest.records) {
    items.push_back({rec.image_id, rec.subject_id});
  }
  return items;
}

}  // namespace

ExperimentResult run_experiment(Experiment experiment,
                                const DatasetManifest& real_manifest,
                                const DatasetManifest* synth_manifest,
                                EmbeddingProvider provider) {
  if (experiment != Experiment::RealVsReal &&
      (synth_manifest == nullptr || synth_manifest->records.empty())) {
    fail(ErrorKind::Validation,
         std::string(experiment_name(experiment)) +
             " requires a non-empty synthetic manifest");
  }
  if (real_manifest.records.empty()) {
    fail(ErrorKind::Validation, "real manifest has no records");
  }

  std::vector<EvalItem> probe, gallery;
  std::vector<const DatasetManifest*> sources;
  switch (experiment) {
    case Experiment::RealVsReal:
      probe = gallery = items_of(real_manifest);
      sources = {&real_manifest};
      break;
    case Experiment::SynthVsSynth:
    case Experiment::ExpandVsExpand:
      probe = gallery = items_of(*synth_manifest);
      sources = {synth_manifest};
      break;
    case Experiment::ExpandVsReal:
      probe = items_of(*synth_manifest);
      gallery = items_of(real_manifest);
      sources = {synth_manifest, &real_manifest};
      break;
  }

  // Embed every image involved, then min-max normalize over the union of
  // probe and gallery before scoring.
  std::vector<std::string> ids;
  std::vector<std::vector<double>> raw;
  for (const DatasetManifest* manifest : sources) {
    const EmbeddingIndex index = build_embedding_index(*manifest, provider);
    for (const auto& [image_id, v] : index.per_image) {
      ids.push_back(image_id);
      raw.push_back(v);
    }
  }
  const std::vector<std::vector<double>> normalized = minmax_normalize(raw);
  std::map<std::string, std::vector<double>> embeddings;
  for (size_t i = 0; i < ids.size(); ++i) {
    embeddings[ids[i]] = normalized[i];
  }

  ExperimentResult result;
  result.pairs = score_pairs(probe, gallery, embeddings);
  result.curve = roc(result.pairs);
  size_t mated = 0, nonmated = 0;
  for (const ScoredPair& p : result.pairs) {
    if (p.mated) {
      result.mean_mated += p.score;
      ++mated;
    } else {
      result.mean_nonmated += p.score;
      ++nonmated;
    }
  }
  if (mated) result.mean_mated /= static_cast<double>(mated);
  if (nonmated) result.mean_nonmated /= static_cast<double>(nonmated);
  return result;
}

std::string roc_to_csv(const RocCurve& curve) {
  std::ostringstream out;
  out << "threshold,far,tar\n";
  out.precision(12);
  for (const RocPoint& p : curve.points) {
    out << p.threshold << "," << p.far << "," << p.tar << "\n";
  }
  out << "# auc=" << curve.auc << "\n";
  return out.str();
}

void write_roc_csv(const std::filesystem::path& path, const RocCurve& curve) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write: " + path.string());
  out << roc_to_csv(curve);
  if (!out) fail(ErrorKind::Io, "write failed: " + path.string());
}

void write_scores_csv(const std::filesystem::path& path,
                      const std::vector<ScoredPair>& pairs) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write: " + path.string());
  out << "probe_image_id,gallery_image_id,label,score\n";
  out.precision(12);
  for (const ScoredPair& p : pairs) {
    out << p.probe_image_id << "," << p.gallery_image_id << ","
        << (p.mated ? "mated" : "nonmated") << "," << p.score << "\n";
  }
  if (!out) fail(ErrorKind::Io, "write failed: " + path.string());
}

}  // namespace srefi
