#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "faceforge/forge.hpp"

namespace faceforge {

// Relative paths resolve against `base`; the result is absolute and
// lexically normalized.
std::filesystem::path resolve_path(const std::filesystem::path& base, const std::string& path);

// Pair list JSONL, one object per line:
//   {"pair_id", "c_a", "c_b", "r_ab", "r_ba", "inner_mask_ab", "inner_mask_ba",
//    "face_mask_a", "face_mask_b", "face_mask_rab", "face_mask_rba",
//    optional "face_mask_mab", "face_mask_mba"}
// Paths are relative to the pairs file; the parsed record holds them resolved.
struct PairRecord {
  std::size_t line = 0;
  std::string pair_id;
  PairPaths paths;
};

// Throws ErrorKind::validation naming the offending line.
std::vector<PairRecord> read_pairs_file(const std::filesystem::path& path);
PairRecord parse_pair_line(const std::string& line, std::size_t line_no, const std::filesystem::path& pairs_file);

// A pair_id doubles as a directory name under the output root.
bool is_safe_pair_id(const std::string& id);

PairInputs load_pair(const PairRecord& record);

// Triplet and manifest rows share one JSONL shape:
//   {"kind", "target", "source", "reference" (string or null), "pair_id",
//    "synthetic": {"target", "source", "reference"}}
std::string triplet_to_jsonl(const Triplet& t);
std::string manifest_row_to_jsonl(const ManifestRow& row);

struct TripletRow {
  std::size_t line = 0;
  Triplet triplet;
};
std::vector<TripletRow> read_triplets_file(const std::filesystem::path& path);

struct ManifestRecord {
  std::size_t line = 0;
  ManifestRow row;
};
// Structural parse only; routing rules are checked by `validate`.
std::vector<ManifestRecord> read_manifest_file(const std::filesystem::path& path);
void write_manifest_file(const std::filesystem::path& path, const std::vector<ManifestRow>& rows);

// IQA scores JSONL {"path", "score"}; keys are resolved absolute paths.
std::map<std::string, double> read_iqa_scores(const std::filesystem::path& path);

// Plain text, one image path per line (blank lines and '#' comments skipped).
std::vector<std::string> read_path_list(const std::filesystem::path& path);

}  // namespace faceforge
