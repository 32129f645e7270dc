#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <string>

#include "srefi/dataset.hpp"
#include "srefi/error.hpp"
#include "srefi/eval.hpp"
#include "srefi/fixtures.hpp"
#include "srefi/pipeline.hpp"

namespace {

void run_generate(const std::string& manifest_path, const std::string& mode,
                  const std::string& provider, srefi::RunConfig config) {
  config.mode = srefi::parse_mode(mode);
  config.embedding_provider = srefi::parse_provider(provider);
  const srefi::DatasetManifest manifest = srefi::load_manifest(manifest_path);
  const auto out_manifest = srefi::generate(manifest, config);
  std::cout << out_manifest.string() << "\n";
}

void run_eval(const std::string& experiment, const std::string& real_path,
              const std::string& synth_path, const std::string& provider,
              const std::string& out_path, const std::string& scores_path) {
  const srefi::Experiment exp = srefi::parse_experiment(experiment);
  const srefi::DatasetManifest real = srefi::load_manifest(real_path);
  std::optional<srefi::DatasetManifest> synth;
  if (!synth_path.empty()) synth = srefi::load_manifest(synth_path);
  if (exp != srefi::Experiment::RealVsReal && !synth) {
    srefi::fail(srefi::ErrorKind::Config,
                std::string(srefi::experiment_name(exp)) +
                    " requires --synth-manifest");
  }
  const srefi::ExperimentResult result = srefi::run_experiment(
      exp, real, synth ? &*synth : nullptr, srefi::parse_provider(provider));
  srefi::write_roc_csv(out_path, result.curve);
  if (!scores_path.empty()) srefi::write_scores_csv(scores_path, result.pairs);
  std::cout << srefi::experiment_name(exp) << ": " << result.pairs.size()
            << " pairs, auc=" << result.curve.auc
            << ", mean mated=" << result.mean_mated
            << ", mean nonmated=" << result.mean_nonmated << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"srefi: triangulated face synthesis and matching evaluation"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand(
      "generate", "Synthesize face images from a donor-set manifest");
  std::string g_manifest, g_mode = "synth", g_provider = "desk";
  std::string g_bands_csv;
  srefi::RunConfig config;
  gen->add_option("--manifest", g_manifest, "Input manifest CSV")->required();
  gen->add_option("--mode", g_mode, "expand | synth")->required();
  gen->add_option("--images-per-identity", config.images_per_identity,
                  "Images generated per identity");
  gen->add_option("--identity-count", config.identity_count,
                  "Synthetic identities to mint (synth mode)");
  gen->add_option("--c-donor", config.c_donor,
                  "Distinct donor images per face (5-16)");
  gen->add_option("--proximal-n", config.proximal_n,
                  "Proximal subjects per donor pool (synth mode)");
  gen->add_option("--seed", config.master_seed, "Master seed");
  gen->add_option("--embedding-provider", g_provider, "file | desk");
  gen->add_option("--out", config.output_dir, "Output directory")->required();
  gen->add_option("--pyramid-levels", config.pyramid_levels,
                  "Laplacian pyramid levels");
  gen->add_option("--min-band-subjects", config.min_band_subjects,
                  "Smallest group size for per-group ratio bands");
  gen->add_option("--region-margin", config.region_margin_px,
                  "Key-region polygon dilation in pixels");
  gen->add_flag("--split-eyes", config.split_eyes,
                "Give the two eyes independent donors");
  gen->add_flag("--abort-on-degenerate", config.abort_on_degenerate,
                "Fail instead of skipping unusable subjects");
  gen->add_flag("--dump-stages", config.dump_stages,
                "Write the un-blended mosaic and per-level pyramid PNGs");
  gen->add_option("--export-bands", g_bands_csv,
                  "Write the ratio bands used to this CSV");
  gen->add_flag("--export-mesh-svg", config.export_mesh_svg,
                "Write an SVG overlay of each face's dual mesh");
  gen->callback([&] {
    if (!g_bands_csv.empty()) config.export_bands_csv = g_bands_csv;
    run_generate(g_manifest, g_mode, g_provider, config);
  });

  // eval
  auto* ev = app.add_subcommand(
      "eval", "Score image pairs and write ROC data for one experiment");
  std::string e_experiment, e_real, e_synth, e_out, e_scores;
  std::string e_provider = "desk";
  ev->add_option("--experiment", e_experiment,
                 "real_vs_real | synth_vs_synth | expand_vs_expand | "
                 "expand_vs_real")
      ->required();
  ev->add_option("--real-manifest", e_real, "Real dataset manifest")->required();
  ev->add_option("--synth-manifest", e_synth,
                 "Generator output manifest (required except real_vs_real)");
  ev->add_option("--embedding-provider", e_provider, "file | desk");
  ev->add_option("--out", e_out, "ROC CSV path")->required();
  ev->add_option("--dump-scores", e_scores, "Also write per-pair scores CSV");
  ev->callback([&] {
    run_eval(e_experiment, e_real, e_synth, e_provider, e_out, e_scores);
  });

  // fixture
  auto* fx = app.add_subcommand(
      "fixture", "Generate a synthetic demo dataset (images + manifest)");
  std::string f_out;
  srefi::FixtureSpec spec;
  fx->add_option("--out", f_out, "Output directory")->required();
  fx->add_option("--subjects", spec.subjects, "Subject count");
  fx->add_option("--images-per-subject", spec.images_per_subject,
                 "Images per subject");
  fx->add_option("--size", spec.image_size, "Square image side in pixels");
  fx->add_option("--seed", spec.seed, "Fixture seed");
  fx->add_option("--groups", spec.group_count, "Demographic group count");
  fx->add_flag("--embeddings", spec.write_embeddings,
               "Also write embedding sidecar files");
  fx->callback([&] {
    const auto manifest = srefi::make_fixture_dataset(f_out, spec);
    std::cout << manifest.string() << "\n";
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const srefi::Error& e) {
    std::cerr << "error (" << srefi::error_kind_name(e.kind()) << "): "
              << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
