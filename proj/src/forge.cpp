#include "faceforge/forge.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "faceforge/error.hpp"
#include "faceforge/rng.hpp"

namespace faceforge {

SwapResult synthesize_swap(const Image& target, const Image& reenacted, const Mask& inner_mask,
                           const Mask& m_face, const Mask& r_face, const SynthesisConfig& cfg) {
  SwapResult out;
  out.coarse = multiband_blend(target, reenacted, inner_mask, cfg.blend);
  require_same_dims(target, m_face, "swap target/face mask");
  require_same_dims(target, r_face, "swap target/reenacted face mask");
  out.region_map = compute_region_map(m_face, r_face);
  ReshapeResult reshaped = reshape_inpaint(out.coarse, out.region_map, cfg.inpaint);
  out.swapped = std::move(reshaped.image);
  out.inpaint = std::move(reshaped.report);
  return out;
}

void validate(const PairInputs& pair) {
  if (pair.pair_id.empty()) throw Error(ErrorKind::validation, "pair_id must not be empty");
  const auto& r = pair.rasters;
  require_pipeline_image(r.c_a, "c_a");
  for (const Image* img : {&r.c_b, &r.r_ab, &r.r_ba}) {
    require_pipeline_image(*img, "pair image");
    require_same_dims(r.c_a, *img, "pair images");
  }
  for (const Mask* m : {&r.inner_mask_ab, &r.inner_mask_ba, &r.face_mask_a, &r.face_mask_b,
                        &r.face_mask_rab, &r.face_mask_rba}) {
    require_same_dims(r.c_a, *m, "pair masks");
  }
  if (r.face_mask_mab) require_same_dims(r.c_a, *r.face_mask_mab, "face_mask_mab");
  if (r.face_mask_mba) require_same_dims(r.c_a, *r.face_mask_mba, "face_mask_mba");
}

SyntheticPaths default_synthetic_paths(const std::string& pair_id) {
  return {pair_id + "/c_ab.png", pair_id + "/c_ba.png"};
}

NaiveBuild build_naive_triplets(const PairInputs& pair, const SynthesisConfig& cfg,
                                const SyntheticPaths& out_paths) {
  validate(pair);
  const auto& r = pair.rasters;
  const Mask& m_ab = r.face_mask_mab ? *r.face_mask_mab : r.face_mask_a;
  const Mask& m_ba = r.face_mask_mba ? *r.face_mask_mba : r.face_mask_b;

  NaiveBuild out;
  out.ab = synthesize_swap(r.c_a, r.r_ab, r.inner_mask_ab, m_ab, r.face_mask_rab, cfg);
  out.ba = synthesize_swap(r.c_b, r.r_ba, r.inner_mask_ba, m_ba, r.face_mask_rba, cfg);

  const ImageRef c_a{pair.paths.c_a, false};
  const ImageRef c_b{pair.paths.c_b, false};
  const ImageRef c_ab{out_paths.c_ab, true};
  const ImageRef c_ba{out_paths.c_ba, true};
  out.triplets = {Triplet{pair.pair_id, TripletKind::naive, c_a, c_b, c_ab},
                  Triplet{pair.pair_id, TripletKind::naive, c_b, c_a, c_ba}};
  return out;
}

TripletPair rotate_to_cycle(const TripletPair& triplets) {
  const auto& [first, second] = triplets;
  if (first.pair_id != second.pair_id) {
    throw Error(ErrorKind::pairing, "cannot rotate triplets of different pairs '" + first.pair_id +
                                        "' and '" + second.pair_id + "'");
  }
  if (first.kind != second.kind) {
    throw Error(ErrorKind::pairing, "cannot rotate a naive triplet together with a cycle triplet");
  }
  const TripletKind kind = first.kind == TripletKind::naive ? TripletKind::cycle : TripletKind::naive;
  return {Triplet{first.pair_id, kind, first.reference, second.reference, first.target},
          Triplet{first.pair_id, kind, second.reference, first.reference, second.target}};
}

IqaDecision iqa_gate(std::pair<double, double> real_scores, std::pair<double, double> synth_scores,
                     double threshold) {
  for (double s : {real_scores.first, real_scores.second, synth_scores.first, synth_scores.second}) {
    if (!(s >= 0.0 && s <= 1.0)) {
      throw Error(ErrorKind::validation, "IQA score " + std::to_string(s) + " outside [0,1]");
    }
  }
  if (!std::isfinite(threshold)) throw Error(ErrorKind::validation, "IQA threshold must be finite");
  const double decrease = std::max(real_scores.first - synth_scores.first,
                                   real_scores.second - synth_scores.second);
  return decrease > threshold ? IqaDecision::drop : IqaDecision::keep;
}

ManifestBuild build_manifest(std::span<const std::string> vanilla, std::span<const Triplet> cycles,
                             const ManifestOptions& options) {
  if (vanilla.empty()) throw Error(ErrorKind::validation, "manifest needs at least one vanilla image");
  if (!(options.ratio >= 0.0) || !std::isfinite(options.ratio)) {
    throw Error(ErrorKind::validation, "ratio must be a finite value >= 0");
  }
  if (!(options.recon_fraction >= 0.0 && options.recon_fraction <= 1.0)) {
    throw Error(ErrorKind::validation, "recon_fraction must lie in [0,1]");
  }
  for (const Triplet& t : cycles) {
    if (t.kind != TripletKind::cycle) {
      throw Error(ErrorKind::validation, "manifest cycles must be cycle triplets (pair '" + t.pair_id + "')");
    }
  }

  ManifestBuild out;
  SplitMix64 rng(options.seed);
  const std::size_t n = vanilla.size();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  shuffle(std::span(order), rng);
  const auto recon_count = static_cast<std::size_t>(std::llround(options.recon_fraction * static_cast<double>(n)));
  std::vector<bool> is_recon(n, false);
  for (std::size_t i = 0; i < recon_count; ++i) is_recon[order[i]] = true;

  std::vector<ManifestRow> rows;
  rows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    ManifestRow row;
    row.pair_id = "vanilla:" + std::to_string(i);
    row.target = vanilla[i];
    if (is_recon[i]) {
      row.kind = ManifestKind::vanilla_recon;
      row.source = vanilla[i];
      row.reference = vanilla[i];
    } else {
      row.kind = ManifestKind::vanilla_swap;
      std::size_t j = i;
      if (n > 1) {
        j = static_cast<std::size_t>(rng.below(n - 1));
        if (j >= i) ++j;
      }
      row.source = vanilla[j];
    }
    rows.push_back(std::move(row));
  }

  std::vector<Triplet> pool(cycles.begin(), cycles.end());
  std::sort(pool.begin(), pool.end(), [](const Triplet& a, const Triplet& b) {
    return std::tie(a.pair_id, a.target.path, a.source.path) < std::tie(b.pair_id, b.target.path, b.source.path);
  });
  shuffle(std::span(pool), rng);
  const auto wanted = static_cast<std::size_t>(std::llround(options.ratio * static_cast<double>(n)));
  std::size_t take = wanted;
  if (pool.size() < wanted) {
    out.warnings.push_back("requested " + std::to_string(wanted) + " cycle rows but only " +
                           std::to_string(pool.size()) + " cycle triplets are available; using all");
    take = pool.size();
  }
  for (std::size_t i = 0; i < take; ++i) {
    const Triplet& t = pool[i];
    ManifestRow row;
    row.kind = ManifestKind::cycle;
    row.pair_id = t.pair_id;
    row.target = t.target.path;
    row.source = t.source.path;
    row.reference = t.reference.path;
    row.target_synthetic = t.target.synthetic;
    row.source_synthetic = t.source.synthetic;
    row.reference_synthetic = t.reference.synthetic;
    rows.push_back(std::move(row));
  }

  shuffle(std::span(rows), rng);
  out.rows = std::move(rows);
  return out;
}

std::vector<std::string> routing_violations(const ManifestRow& row) {
  std::vector<std::string> v;
  switch (row.kind) {
    case ManifestKind::vanilla_recon:
      if (!row.reference) {
        v.emplace_back("vanilla_recon row must carry a reference");
      } else if (row.target != row.source || row.target != *row.reference) {
        v.emplace_back("vanilla_recon row must have target = source = reference");
      }
      break;
    case ManifestKind::vanilla_swap:
      if (row.reference) v.emplace_back("vanilla_swap row must not carry a reference");
      break;
    case ManifestKind::cycle:
      if (!row.reference) {
        v.emplace_back("cycle row must carry a reference");
      } else if (row.reference_synthetic) {
        v.emplace_back("cycle reference must be real");
      }
      if (!row.target_synthetic || !row.source_synthetic) {
        v.emplace_back("cycle target and source must be synthetic");
      }
      break;
  }
  return v;
}

std::string_view to_string(TripletKind kind) { return kind == TripletKind::naive ? "naive" : "cycle"; }

std::string_view to_string(ManifestKind kind) {
  switch (kind) {
    case ManifestKind::vanilla_recon: return "vanilla_recon";
    case ManifestKind::vanilla_swap: return "vanilla_swap";
    case ManifestKind::cycle: return "cycle";
  }
  return "unknown";
}

std::optional<ManifestKind> parse_manifest_kind(std::string_view text) {
  if (text == "vanilla_recon") return ManifestKind::vanilla_recon;
  if (text == "vanilla_swap") return ManifestKind::vanilla_swap;
  if (text == "cycle") return ManifestKind::cycle;
  return std::nullopt;
}

}  // namespace faceforge
