#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "faceforge/blending.hpp"
#include "faceforge/image.hpp"
#include "faceforge/reshaping.hpp"

namespace faceforge {

struct SynthesisConfig {
  BlendConfig blend;
  InpaintConfig inpaint;

  bool operator==(const SynthesisConfig&) const = default;
};

struct SwapResult {
  Image coarse;  // multi-band blend before reshaping
  RegionMap region_map;
  Image swapped;  // final synthetic swap
  InpaintReport inpaint;
};

// Blend the reenacted face into the target, then drop-and-inpaint the BLUE
// bulge given by the two face-foreground masks.
SwapResult synthesize_swap(const Image& target, const Image& reenacted, const Mask& inner_mask,
                           const Mask& m_face, const Mask& r_face, const SynthesisConfig& cfg = {});

// File references for one real pair. r_ab carries the identity of b with the
// pose and expression of a.
struct PairPaths {
  std::string c_a, c_b, r_ab, r_ba;
  std::string inner_mask_ab, inner_mask_ba;
  std::string face_mask_a, face_mask_b, face_mask_rab, face_mask_rba;
  // Optional M_f overrides; default to the target's face mask.
  std::optional<std::string> face_mask_mab, face_mask_mba;
};

struct PairRasters {
  Image c_a, c_b, r_ab, r_ba;
  Mask inner_mask_ab, inner_mask_ba;
  Mask face_mask_a, face_mask_b, face_mask_rab, face_mask_rba;
  std::optional<Mask> face_mask_mab, face_mask_mba;
};

struct PairInputs {
  std::string pair_id;
  PairPaths paths;
  PairRasters rasters;
};

void validate(const PairInputs& pair);

struct ImageRef {
  std::string path;
  bool synthetic = false;

  bool operator==(const ImageRef&) const = default;
};

enum class TripletKind { naive, cycle };

struct Triplet {
  std::string pair_id;
  TripletKind kind = TripletKind::naive;
  ImageRef target;
  ImageRef source;
  ImageRef reference;

  bool operator==(const Triplet&) const = default;
};

using TripletPair = std::pair<Triplet, Triplet>;

struct NaiveBuild {
  SwapResult ab;
  SwapResult ba;
  TripletPair triplets;  // ({C_a, C_b, C_ab}, {C_b, C_a, C_ba})
};

// Output paths of the synthetic images, recorded in the triplet references.
struct SyntheticPaths {
  std::string c_ab;
  std::string c_ba;
};

SyntheticPaths default_synthetic_paths(const std::string& pair_id);

NaiveBuild build_naive_triplets(const PairInputs& pair, const SynthesisConfig& cfg,
                                const SyntheticPaths& out_paths);

// ((t1,s1,r1), (t2,s2,r2)) -> ((r1,r2,t1), (r2,r1,t2)); naive <-> cycle.
// Naive input {C_a,C_b,C_ab},{C_b,C_a,C_ba} yields {C_ab,C_ba,C_a},{C_ba,C_ab,C_b}.
// Applying it twice restores the input.
TripletPair rotate_to_cycle(const TripletPair& triplets);

enum class IqaDecision { keep, drop };

// Drop iff the larger of the two per-direction score decreases
// (real - synthetic) exceeds the threshold.
IqaDecision iqa_gate(std::pair<double, double> real_scores, std::pair<double, double> synth_scores,
                     double threshold = 0.4);

enum class ManifestKind { vanilla_recon, vanilla_swap, cycle };

struct ManifestRow {
  ManifestKind kind = ManifestKind::vanilla_swap;
  std::string target;
  std::string source;
  std::optional<std::string> reference;
  std::string pair_id;
  bool target_synthetic = false;
  bool source_synthetic = false;
  bool reference_synthetic = false;

  bool operator==(const ManifestRow&) const = default;
};

struct ManifestOptions {
  double ratio = 0.4;           // cycle rows per vanilla row
  double recon_fraction = 0.3;  // share of vanilla rows emitted as reconstruction
  std::uint64_t seed = 0;
};

struct ManifestBuild {
  std::vector<ManifestRow> rows;
  std::vector<std::string> warnings;
};

// Draw order from one SplitMix64(seed) stream:
//   1. shuffle vanilla indices; the first round(recon_fraction * n) are recon
//   2. for each swap row in vanilla order, draw its source among the others
//   3. shuffle cycle triplets (sorted by pair_id, target) and take the first
//      round(ratio * n)
//   4. shuffle the concatenated rows
ManifestBuild build_manifest(std::span<const std::string> vanilla, std::span<const Triplet> cycles,
                             const ManifestOptions& options);

// Table 2 routing check for a single row; empty when the row is sound.
std::vector<std::string> routing_violations(const ManifestRow& row);

std::string_view to_string(TripletKind kind);
std::string_view to_string(ManifestKind kind);
std::optional<ManifestKind> parse_manifest_kind(std::string_view text);

}  // namespace faceforge
