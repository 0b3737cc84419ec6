#include "faceforge/records.hpp"

#include <json.hpp>

#include <fstream>
#include <set>

#include "faceforge/error.hpp"
#include "faceforge/png_io.hpp"

namespace faceforge {
namespace {

using nlohmann::ordered_json;

Error line_error(const std::filesystem::path& file, std::size_t line, const std::string& what) {
  return Error(ErrorKind::validation, file.string() + ":" + std::to_string(line) + ": " + what);
}

ordered_json parse_line(const std::string& line, std::size_t line_no, const std::filesystem::path& file) {
  try {
    ordered_json j = ordered_json::parse(line);
    if (!j.is_object()) throw line_error(file, line_no, "expected a JSON object");
    return j;
  } catch (const nlohmann::json::parse_error&) {
    throw line_error(file, line_no, "not valid JSON");
  }
}

std::string required_string(const ordered_json& j, const char* key, std::size_t line_no,
                            const std::filesystem::path& file) {
  if (!j.contains(key) || !j.at(key).is_string()) {
    throw line_error(file, line_no, std::string("missing string field '") + key + "'");
  }
  return j.at(key).get<std::string>();
}

template <typename F>
void for_each_line(const std::filesystem::path& path, F&& fn) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    fn(line, line_no);
  }
}

ordered_json row_json(std::string_view kind, const std::string& target, const std::string& source,
                      const std::optional<std::string>& reference, const std::string& pair_id, bool ts, bool ss,
                      bool rs) {
  ordered_json j;
  j["kind"] = kind;
  j["target"] = target;
  j["source"] = source;
  j["reference"] = reference ? ordered_json(*reference) : ordered_json(nullptr);
  j["pair_id"] = pair_id;
  j["synthetic"] = {{"target", ts}, {"source", ss}, {"reference", rs}};
  return j;
}

struct RawRow {
  std::string kind, target, source, pair_id;
  std::optional<std::string> reference;
  bool ts = false, ss = false, rs = false;
};

RawRow parse_row(const std::string& line, std::size_t line_no, const std::filesystem::path& file) {
  const ordered_json j = parse_line(line, line_no, file);
  RawRow r;
  r.kind = required_string(j, "kind", line_no, file);
  r.target = required_string(j, "target", line_no, file);
  r.source = required_string(j, "source", line_no, file);
  r.pair_id = required_string(j, "pair_id", line_no, file);
  if (!j.contains("reference")) throw line_error(file, line_no, "missing field 'reference' (use null when absent)");
  if (j.at("reference").is_string()) {
    r.reference = j.at("reference").get<std::string>();
  } else if (!j.at("reference").is_null()) {
    throw line_error(file, line_no, "'reference' must be a string or null");
  }
  if (j.contains("synthetic")) {
    const auto& s = j.at("synthetic");
    if (!s.is_object()) throw line_error(file, line_no, "'synthetic' must be an object");
    auto flag = [&](const char* key) {
      if (!s.contains(key)) return false;
      if (!s.at(key).is_boolean()) throw line_error(file, line_no, std::string("synthetic.") + key + " must be boolean");
      return s.at(key).get<bool>();
    };
    r.ts = flag("target");
    r.ss = flag("source");
    r.rs = flag("reference");
  }
  return r;
}

}  // namespace

std::filesystem::path resolve_path(const std::filesystem::path& base, const std::string& path) {
  std::filesystem::path p(path);
  if (p.is_relative()) p = base / p;
  return std::filesystem::absolute(p).lexically_normal();
}

bool is_safe_pair_id(const std::string& id) {
  if (id.empty() || id == "." || id == ".." || id.size() > 200) return false;
  for (char c : id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' ||
                    c == '_' || c == '.';
    if (!ok) return false;
  }
  return true;
}

PairRecord parse_pair_line(const std::string& line, std::size_t line_no, const std::filesystem::path& file) {
  const auto base = std::filesystem::absolute(file).parent_path();
  const ordered_json j = parse_line(line, line_no, file);
  static const std::set<std::string> known = {
      "pair_id",     "c_a",         "c_b",           "r_ab",          "r_ba",          "inner_mask_ab",
      "inner_mask_ba", "face_mask_a", "face_mask_b", "face_mask_rab", "face_mask_rba", "face_mask_mab",
      "face_mask_mba"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw line_error(file, line_no, "unknown field '" + key + "'");
  }
  PairRecord r;
  r.line = line_no;
  r.pair_id = required_string(j, "pair_id", line_no, file);
  if (!is_safe_pair_id(r.pair_id)) {
    throw line_error(file, line_no, "pair_id '" + r.pair_id + "' must match [A-Za-z0-9._-]+");
  }
  auto path_of = [&](const char* key) { return resolve_path(base, required_string(j, key, line_no, file)).string(); };
  r.paths.c_a = path_of("c_a");
  r.paths.c_b = path_of("c_b");
  r.paths.r_ab = path_of("r_ab");
  r.paths.r_ba = path_of("r_ba");
  r.paths.inner_mask_ab = path_of("inner_mask_ab");
  r.paths.inner_mask_ba = path_of("inner_mask_ba");
  r.paths.face_mask_a = path_of("face_mask_a");
  r.paths.face_mask_b = path_of("face_mask_b");
  r.paths.face_mask_rab = path_of("face_mask_rab");
  r.paths.face_mask_rba = path_of("face_mask_rba");
  if (j.contains("face_mask_mab")) r.paths.face_mask_mab = path_of("face_mask_mab");
  if (j.contains("face_mask_mba")) r.paths.face_mask_mba = path_of("face_mask_mba");
  return r;
}

std::vector<PairRecord> read_pairs_file(const std::filesystem::path& path) {
  std::vector<PairRecord> out;
  std::set<std::string> seen;
  for_each_line(path, [&](const std::string& line, std::size_t line_no) {
    PairRecord r = parse_pair_line(line, line_no, path);
    if (!seen.insert(r.pair_id).second) {
      throw line_error(path, line_no, "duplicate pair_id '" + r.pair_id + "'");
    }
    out.push_back(std::move(r));
  });
  return out;
}

PairInputs load_pair(const PairRecord& record) {
  PairInputs p;
  p.pair_id = record.pair_id;
  p.paths = record.paths;
  auto& r = p.rasters;
  r.c_a = read_image_png(record.paths.c_a);
  r.c_b = read_image_png(record.paths.c_b);
  r.r_ab = read_image_png(record.paths.r_ab);
  r.r_ba = read_image_png(record.paths.r_ba);
  r.inner_mask_ab = read_mask_png(record.paths.inner_mask_ab);
  r.inner_mask_ba = read_mask_png(record.paths.inner_mask_ba);
  r.face_mask_a = read_mask_png(record.paths.face_mask_a);
  r.face_mask_b = read_mask_png(record.paths.face_mask_b);
  r.face_mask_rab = read_mask_png(record.paths.face_mask_rab);
  r.face_mask_rba = read_mask_png(record.paths.face_mask_rba);
  if (record.paths.face_mask_mab) r.face_mask_mab = read_mask_png(*record.paths.face_mask_mab);
  if (record.paths.face_mask_mba) r.face_mask_mba = read_mask_png(*record.paths.face_mask_mba);
  validate(p);
  return p;
}

std::string triplet_to_jsonl(const Triplet& t) {
  return row_json(to_string(t.kind), t.target.path, t.source.path, t.reference.path, t.pair_id, t.target.synthetic,
                  t.source.synthetic, t.reference.synthetic)
      .dump();
}

std::string manifest_row_to_jsonl(const ManifestRow& r) {
  return row_json(to_string(r.kind), r.target, r.source, r.reference, r.pair_id, r.target_synthetic,
                  r.source_synthetic, r.reference_synthetic)
      .dump();
}

std::vector<TripletRow> read_triplets_file(const std::filesystem::path& path) {
  std::vector<TripletRow> out;
  for_each_line(path, [&](const std::string& line, std::size_t line_no) {
    const RawRow r = parse_row(line, line_no, path);
    TripletRow row;
    row.line = line_no;
    if (r.kind == "naive") {
      row.triplet.kind = TripletKind::naive;
    } else if (r.kind == "cycle") {
      row.triplet.kind = TripletKind::cycle;
    } else {
      throw line_error(path, line_no, "unknown triplet kind '" + r.kind + "'");
    }
    if (!r.reference) throw line_error(path, line_no, "triplet rows need a reference");
    row.triplet.pair_id = r.pair_id;
    row.triplet.target = {r.target, r.ts};
    row.triplet.source = {r.source, r.ss};
    row.triplet.reference = {*r.reference, r.rs};
    out.push_back(std::move(row));
  });
  return out;
}

std::vector<ManifestRecord> read_manifest_file(const std::filesystem::path& path) {
  std::vector<ManifestRecord> out;
  for_each_line(path, [&](const std::string& line, std::size_t line_no) {
    const RawRow r = parse_row(line, line_no, path);
    const auto kind = parse_manifest_kind(r.kind);
    if (!kind) throw line_error(path, line_no, "unknown manifest kind '" + r.kind + "'");
    ManifestRecord rec;
    rec.line = line_no;
    rec.row = ManifestRow{*kind, r.target, r.source, r.reference, r.pair_id, r.ts, r.ss, r.rs};
    out.push_back(std::move(rec));
  });
  return out;
}

void write_manifest_file(const std::filesystem::path& path, const std::vector<ManifestRow>& rows) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path.string());
  for (const auto& row : rows) out << manifest_row_to_jsonl(row) << '\n';
}

std::map<std::string, double> read_iqa_scores(const std::filesystem::path& path) {
  const auto base = std::filesystem::absolute(path).parent_path();
  std::map<std::string, double> out;
  for_each_line(path, [&](const std::string& line, std::size_t line_no) {
    const ordered_json j = parse_line(line, line_no, path);
    const std::string p = required_string(j, "path", line_no, path);
    if (!j.contains("score") || !j.at("score").is_number()) throw line_error(path, line_no, "missing numeric 'score'");
    const double score = j.at("score").get<double>();
    if (!(score >= 0.0 && score <= 1.0)) throw line_error(path, line_no, "score outside [0,1]");
    out[resolve_path(base, p).string()] = score;
  });
  return out;
}

std::vector<std::string> read_path_list(const std::filesystem::path& path) {
  std::vector<std::string> out;
  for_each_line(path, [&](const std::string& line, std::size_t) {
    const auto first = line.find_first_not_of(" \t");
    if (line[first] == '#') return;
    const auto last = line.find_last_not_of(" \t");
    out.push_back(line.substr(first, last - first + 1));
  });
  return out;
}

}  // namespace faceforge
