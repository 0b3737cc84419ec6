// faceforge: synthesize cycle-triplet training data, emit manifests and
// evaluate swapped results. See README.md for the command reference.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "faceforge/blending.hpp"
#include "faceforge/config.hpp"
#include "faceforge/crop.hpp"
#include "faceforge/error.hpp"
#include "faceforge/png_io.hpp"
#include "faceforge/reshaping.hpp"
#include "faceforge/runner.hpp"

namespace fs = std::filesystem;
using namespace faceforge;

namespace {

// Flags that override the config file.
struct Overrides {
  std::optional<std::string> config;
  std::optional<std::uint64_t> seed;
  std::optional<int> workers;
  std::optional<int> levels;
  std::optional<double> iqa_threshold;
  std::optional<double> ratio;
  std::optional<double> recon_fraction;
};

RunConfig effective_config(const Overrides& o) {
  RunConfig cfg;
  if (o.config) {
    cfg = load_config(*o.config);
  } else if (const char* env = std::getenv(kConfigEnvVar); env && *env) {
    cfg = load_config(env);
  }
  if (o.seed) cfg.seed = *o.seed;
  if (o.workers) cfg.workers = *o.workers;
  if (o.levels) cfg.synthesis.blend.levels = *o.levels;
  if (o.iqa_threshold) cfg.iqa_threshold = *o.iqa_threshold;
  if (o.ratio) cfg.ratio = *o.ratio;
  if (o.recon_fraction) cfg.recon_fraction = *o.recon_fraction;
  validate(cfg);
  return cfg;
}

void add_config_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "JSON config file (default: $FACEFORGE_CONFIG)");
  cmd->add_option("--seed", o.seed, "generator seed");
  cmd->add_option("--workers", o.workers, "worker threads");
  cmd->add_option("--levels", o.levels, "pyramid levels for blending");
  cmd->add_option("--iqa-threshold", o.iqa_threshold, "drop when the IQA score falls by more than this");
  cmd->add_option("--ratio", o.ratio, "cycle rows per vanilla row");
  cmd->add_option("--recon-frac", o.recon_fraction, "share of vanilla rows used as reconstruction");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"faceforge: cycle-triplet synthesis, manifests and face-swap metrics"};
  app.require_subcommand(1);
  Overrides ov;
  int exit_code = kExitOk;

  // forge
  auto* forge = app.add_subcommand("forge", "synthesize swaps and triplets for every pair in a JSONL list");
  std::string pairs_file, out_dir;
  std::optional<std::string> iqa_scores;
  bool dump_stages = false;
  forge->add_option("pairs", pairs_file, "pair list (JSONL)")->required();
  forge->add_option("--out", out_dir, "output directory")->required();
  forge->add_option("--iqa-scores", iqa_scores, "IQA scores JSONL; enables the IQA gate");
  forge->add_flag("--dump-stages", dump_stages, "also write the coarse blends");
  add_config_flags(forge, ov);
  forge->callback([&] {
    ForgeOptions o{pairs_file, out_dir, effective_config(ov), std::nullopt, dump_stages};
    if (iqa_scores) o.iqa_scores = *iqa_scores;
    const ForgeSummary s = run_forge(o);
    std::cout << s.to_json() << '\n';
    exit_code = s.exit_code;
  });

  // blend
  auto* blend = app.add_subcommand("blend", "multi-band blend a reenacted face into a target");
  std::string target, reenacted, mask, blend_out;
  blend->add_option("--target", target, "target image")->required();
  blend->add_option("--reenacted", reenacted, "reenacted image")->required();
  blend->add_option("--mask", mask, "inner-face mask")->required();
  blend->add_option("--out", blend_out, "output PNG")->required();
  add_config_flags(blend, ov);
  blend->callback([&] {
    const RunConfig cfg = effective_config(ov);
    write_image_png(blend_out, multiband_blend(read_image_png(target), read_image_png(reenacted),
                                               read_mask_png(mask), cfg.synthesis.blend));
  });

  // regionmap
  auto* regionmap = app.add_subcommand("regionmap", "render the four-region map of two face masks");
  std::string m_face, r_face, rm_out;
  regionmap->add_option("--m-face", m_face, "face mask of the coarse blend")->required();
  regionmap->add_option("--r-face", r_face, "face mask of the reenacted image")->required();
  regionmap->add_option("--out", rm_out, "output PNG")->required();
  regionmap->callback([&] {
    const RegionMap map = compute_region_map(read_mask_png(m_face), read_mask_png(r_face));
    write_image_png(rm_out, render_region_map(map));
    const auto n = map.counts();
    std::cout << "{\"gray\":" << n[0] << ",\"yellow\":" << n[1] << ",\"green\":" << n[2] << ",\"blue\":" << n[3]
              << "}\n";
  });

  // reshape
  auto* reshape = app.add_subcommand("reshape", "drop the blend-only bulge and inpaint it");
  std::string blended, rs_m, rs_r, rs_out;
  reshape->add_option("--blended", blended, "coarse blended image")->required();
  reshape->add_option("--m-face", rs_m, "face mask of the coarse blend")->required();
  reshape->add_option("--r-face", rs_r, "face mask of the reenacted image")->required();
  reshape->add_option("--out", rs_out, "output PNG")->required();
  add_config_flags(reshape, ov);
  reshape->callback([&] {
    const RunConfig cfg = effective_config(ov);
    const RegionMap map = compute_region_map(read_mask_png(rs_m), read_mask_png(rs_r));
    const ReshapeResult r = reshape_inpaint(read_image_png(blended), map, cfg.synthesis.inpaint);
    write_image_png(rs_out, r.image);
    std::cout << "{\"filled\":" << r.report.filled_pixels << ",\"iterations\":" << r.report.iterations
              << ",\"residual\":" << r.report.final_residual
              << ",\"converged\":" << (r.report.converged ? "true" : "false") << "}\n";
  });

  // crop
  auto* crop = app.add_subcommand("crop", "cut the lower-face window out of a 112x112 aligned face");
  std::string crop_in, crop_out;
  crop->add_option("input", crop_in, "aligned face PNG")->required();
  crop->add_option("--out", crop_out, "output PNG")->required();
  add_config_flags(crop, ov);
  crop->callback([&] {
    const RunConfig cfg = effective_config(ov);
    write_image_png(crop_out, crop_lower_face(read_image_png(crop_in), cfg.crop));
  });

  // manifest build
  auto* manifest = app.add_subcommand("manifest", "training manifests");
  manifest->require_subcommand(1);
  auto* build = manifest->add_subcommand("build", "mix vanilla samples with cycle triplets");
  std::string vanilla_list, triplets_file, manifest_out;
  build->add_option("--vanilla", vanilla_list, "text file, one vanilla image path per line")->required();
  build->add_option("--triplets", triplets_file, "triplets.jsonl from forge or filter-iqa")->required();
  build->add_option("--out", manifest_out, "manifest JSONL")->required();
  add_config_flags(build, ov);
  build->callback([&] {
    const ManifestSummary s = build_manifest_file(vanilla_list, triplets_file, effective_config(ov), manifest_out);
    for (const auto& w : s.warnings) log_event("warn", "manifest_supply", w);
    std::cout << "{\"vanilla\":" << s.vanilla << ",\"vanilla_recon\":" << s.recon << ",\"vanilla_swap\":" << s.swap
              << ",\"cycle\":" << s.cycle << "}\n";
  });

  // filter-iqa
  auto* filter = app.add_subcommand("filter-iqa", "drop pairs whose synthetic images lose too much quality");
  std::string f_triplets, f_scores, f_out;
  filter->add_option("--triplets", f_triplets, "triplets.jsonl")->required();
  filter->add_option("--scores", f_scores, "IQA scores JSONL {path, score}")->required();
  filter->add_option("--out", f_out, "filtered triplets JSONL")->required();
  add_config_flags(filter, ov);
  filter->callback([&] {
    const RunConfig cfg = effective_config(ov);
    const IqaFilterSummary s = filter_triplets_by_iqa(f_triplets, f_scores, cfg.iqa_threshold, f_out);
    std::cout << "{\"pairs\":" << s.pairs << ",\"kept\":" << s.kept << ",\"dropped\":" << s.dropped_ids.size()
              << ",\"unscored\":" << s.unscored_ids.size() << "}\n";
    for (const auto& id : s.unscored_ids) log_event("warn", "iqa_unscored", id);
  });

  // eval
  auto* eval = app.add_subcommand("eval", "identity, lower-face, pose, expression and FID metrics");
  EvalOptions eo;
  std::optional<std::string> eb, eam, ebm;
  std::string ea;
  eval->add_option("task", eo.task, "id-ret | id-sim | l-ret | l-sim | pose | exp | fid")
      ->required()
      ->check(CLI::IsMember({"id-ret", "id-sim", "l-ret", "l-sim", "pose", "exp", "fid"}));
  eval->add_option("--a", ea, "swapped / query / first feature file (EMB1 or CSV)")->required();
  eval->add_option("--b", eb, "source / gallery / second feature file");
  eval->add_option("--a-meta", eam, "sidecar JSONL for --a (default <a>.jsonl)");
  eval->add_option("--b-meta", ebm, "sidecar JSONL for --b (default <b>.jsonl)");
  eval->callback([&] {
    eo.a = ea;
    if (eb) eo.b = *eb;
    if (eam) eo.a_meta = *eam;
    if (ebm) eo.b_meta = *ebm;
    std::cout << run_eval(eo).to_json() << '\n';
  });

  // loss
  auto* loss = app.add_subcommand("loss", "evaluate cycle-triplet and fixer losses on a fixture directory");
  std::string fixture, weights;
  bool no_reference = false;
  loss->add_option("fixture", fixture, "fixture directory")->required();
  loss->add_option("--weights", weights, "weights JSON")->required();
  loss->add_flag("--no-reference", no_reference, "triplet has no real reference; disables the reference term");
  loss->callback([&] { std::cout << run_loss(fixture, weights, !no_reference).to_json() << '\n'; });

  // validate
  auto* val = app.add_subcommand("validate", "check structural invariants of a data file");
  std::string val_target, val_path;
  val->add_option("target", val_target, "manifest | pairs | embeddings | triplets")
      ->required()
      ->check(CLI::IsMember({"manifest", "pairs", "embeddings", "triplets"}));
  val->add_option("path", val_path, "file to check")->required();
  val->callback([&] {
    ValidateTarget t = ValidateTarget::manifest;
    if (val_target == "pairs") t = ValidateTarget::pairs;
    if (val_target == "embeddings") t = ValidateTarget::embeddings;
    if (val_target == "triplets") t = ValidateTarget::triplets;
    const ValidationReport r = validate_file(t, val_path);
    std::cout << r.to_json() << '\n';
    exit_code = r.clean() ? kExitOk : kExitInputError;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInputError;
  } catch (const Error& e) {
    log_event("error", "input_error", e.what());
    return kExitInputError;
  } catch (const std::exception& e) {
    log_event("error", "failure", e.what());
    return kExitInputError;
  }
  return exit_code;
}
