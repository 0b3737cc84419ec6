#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "faceforge/config.hpp"
#include "faceforge/losses.hpp"

namespace faceforge {

// Process exit codes; stable across releases.
enum ExitCode : int {
  kExitOk = 0,
  kExitInputError = 1,
  kExitPartialFailure = 2,
};

// Line-oriented JSON log record on stderr.
void log_event(std::string_view level, std::string_view event, std::string_view detail = {});

struct ForgeOptions {
  std::filesystem::path pairs_file;
  std::filesystem::path out_dir;
  RunConfig config;
  std::optional<std::filesystem::path> iqa_scores;
  bool dump_stages = false;  // also write the coarse blends m_ab.png / m_ba.png
};

struct ForgeSummary {
  std::size_t pairs = 0;
  std::size_t succeeded = 0;
  std::size_t kept = 0;
  std::size_t dropped = 0;
  std::vector<std::string> dropped_ids;
  std::vector<std::pair<std::string, std::string>> failures;  // pair_id, reason
  std::size_t unconverged_inpaints = 0;
  double wall_seconds = 0.0;
  int exit_code = kExitOk;

  std::string to_json() const;
};

// Writes out/<pair_id>/{c_ab,c_ba,regionmap_ab,regionmap_ba}.png for every
// pair and `triplets.jsonl` (two naive + two cycle rows per kept pair,
// sorted by pair_id). Unreadable pair lists throw; per-pair failures are
// collected and turn the exit code into kExitPartialFailure.
ForgeSummary run_forge(const ForgeOptions& options);

struct IqaFilterSummary {
  std::size_t pairs = 0;
  std::size_t kept = 0;
  std::vector<std::string> dropped_ids;
  std::vector<std::string> unscored_ids;
};

// Keeps every row of pairs whose cycle triplets pass the IQA gate.
IqaFilterSummary filter_triplets_by_iqa(const std::filesystem::path& triplets_file,
                                        const std::filesystem::path& scores_file, double threshold,
                                        const std::filesystem::path& out_file);

struct ManifestSummary {
  std::size_t vanilla = 0;
  std::size_t recon = 0;
  std::size_t swap = 0;
  std::size_t cycle = 0;
  std::vector<std::string> warnings;
};

// Manifest paths are written absolute and normalized.
ManifestSummary build_manifest_file(const std::filesystem::path& vanilla_list,
                                    const std::filesystem::path& triplets_file, const RunConfig& config,
                                    const std::filesystem::path& out_file);

inline constexpr const char* kEvalTasks[] = {"id-ret", "id-sim", "l-ret", "l-sim", "pose", "exp", "fid"};

struct EvalOptions {
  std::string task;
  std::filesystem::path a;  // swapped / queries / first feature set
  std::optional<std::filesystem::path> b;  // source / gallery / second set
  std::optional<std::filesystem::path> a_meta;
  std::optional<std::filesystem::path> b_meta;
};

struct EvalReport {
  std::string task;
  double value = 0.0;
  std::size_t n = 0;
  std::string config_json;  // inputs and options as a JSON object

  std::string to_json() const;
};

EvalReport run_eval(const EvalOptions& options);

struct LossReport {
  CycleTripletLoss cycle;
  FixerLoss fixer;

  std::string to_json() const;
};

// Fixture layout:
//   y.png, ref.png                           prediction and reference
//   feat_y_<k>.emb, feat_ref_<k>.emb         perceptual layers k = 0,1,...
//   id_y.emb, id_ref.emb                     identity embeddings (1 row)
//   fix_src.emb, fix_ref.emb, fix_y.emb      lower-face embeddings (1 row)
// Weights JSON: {"lambda_ct": [l1, l2, l3], "lambda_fix": [l1, l2]}.
LossReport run_loss(const std::filesystem::path& fixture_dir, const std::filesystem::path& weights_file,
                    bool has_reference);

LossWeights load_loss_weights(const std::filesystem::path& path);
FeatureStack load_feature_stack(const std::filesystem::path& dir, const std::string& prefix);

enum class ValidateTarget { manifest, pairs, embeddings, triplets };

struct Finding {
  std::size_t line = 0;  // 0 when not line-addressable
  std::string rule;
  std::string message;
};

struct ValidationReport {
  std::size_t records = 0;
  std::vector<Finding> findings;

  bool clean() const noexcept { return findings.empty(); }
  std::string to_json() const;
};

ValidationReport validate_file(ValidateTarget target, const std::filesystem::path& path);

}  // namespace faceforge
