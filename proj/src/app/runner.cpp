#include "faceforge/runner.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <thread>

#include "faceforge/embedding_io.hpp"
#include "faceforge/error.hpp"
#include "faceforge/png_io.hpp"
#include "faceforge/records.hpp"

namespace faceforge {
namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::mutex log_mutex;

struct PairOutcome {
  std::string pair_id;
  bool ok = false;
  std::string error;
  TripletPair naive;
  TripletPair cycle;
  bool dropped = false;
  bool converged = true;
};

double lookup_score(const std::map<std::string, double>& scores, const std::string& path) {
  const auto it = scores.find(path);
  if (it == scores.end()) throw Error(ErrorKind::validation, "no IQA score for " + path);
  return it->second;
}

PairOutcome process_pair(const PairRecord& record, const ForgeOptions& o, const fs::path& out_root,
                         const std::optional<std::map<std::string, double>>& scores) {
  PairOutcome out;
  out.pair_id = record.pair_id;
  try {
    const PairInputs pair = load_pair(record);
    const SyntheticPaths synthetic = default_synthetic_paths(record.pair_id);
    NaiveBuild build = build_naive_triplets(pair, o.config.synthesis, synthetic);

    const fs::path dir = out_root / record.pair_id;
    fs::create_directories(dir);
    write_image_png(out_root / synthetic.c_ab, build.ab.swapped);
    write_image_png(out_root / synthetic.c_ba, build.ba.swapped);
    write_image_png(dir / "regionmap_ab.png", render_region_map(build.ab.region_map));
    write_image_png(dir / "regionmap_ba.png", render_region_map(build.ba.region_map));
    if (o.dump_stages) {
      write_image_png(dir / "m_ab.png", build.ab.coarse);
      write_image_png(dir / "m_ba.png", build.ba.coarse);
    }
    out.converged = build.ab.inpaint.converged && build.ba.inpaint.converged;
    out.naive = build.triplets;
    out.cycle = rotate_to_cycle(build.triplets);

    if (scores) {
      const std::pair real{lookup_score(*scores, record.paths.c_a), lookup_score(*scores, record.paths.c_b)};
      const std::pair synth{lookup_score(*scores, (out_root / synthetic.c_ab).string()),
                            lookup_score(*scores, (out_root / synthetic.c_ba).string())};
      out.dropped = iqa_gate(real, synth, o.config.iqa_threshold) == IqaDecision::drop;
    }
    out.ok = true;
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

std::string join_rows(const TripletPair& p) { return triplet_to_jsonl(p.first) + "\n" + triplet_to_jsonl(p.second) + "\n"; }

EmbeddingMatrix single_row(const fs::path& path) {
  EmbeddingMatrix m = read_emb1(path);
  if (m.rows() != 1) {
    throw Error(ErrorKind::validation, path.string() + ": expected exactly 1 embedding row, got " + std::to_string(m.rows()));
  }
  return m;
}

Embedding first_embedding(const fs::path& path) { return single_row(path).embedding(0); }

void add_finding(ValidationReport& r, std::size_t line, std::string rule, std::string message) {
  r.findings.push_back({line, std::move(rule), std::move(message)});
}

void check_exists(ValidationReport& r, std::size_t line, const fs::path& base, const std::string& path) {
  if (!fs::exists(resolve_path(base, path))) add_finding(r, line, "closure", "missing file " + path);
}

}  // namespace

void log_event(std::string_view level, std::string_view event, std::string_view detail) {
  ordered_json j;
  j["level"] = level;
  j["event"] = event;
  if (!detail.empty()) j["detail"] = detail;
  const std::lock_guard lock(log_mutex);
  std::cerr << j.dump() << '\n';
}

std::string ForgeSummary::to_json() const {
  ordered_json j;
  j["pairs"] = pairs;
  j["succeeded"] = succeeded;
  j["kept"] = kept;
  j["dropped"] = dropped;
  j["dropped_ids"] = dropped_ids;
  ordered_json failed = ordered_json::array();
  for (const auto& [id, reason] : failures) failed.push_back({{"pair_id", id}, {"error", reason}});
  j["failed"] = failed;
  j["unconverged_inpaints"] = unconverged_inpaints;
  j["wall_seconds"] = wall_seconds;
  j["exit_code"] = exit_code;
  return j.dump();
}

ForgeSummary run_forge(const ForgeOptions& o) {
  const auto start = std::chrono::steady_clock::now();
  validate(o.config);
  const std::vector<PairRecord> records = read_pairs_file(o.pairs_file);
  std::optional<std::map<std::string, double>> scores;
  if (o.iqa_scores) scores = read_iqa_scores(*o.iqa_scores);

  fs::create_directories(o.out_dir);
  const fs::path out_root = fs::absolute(o.out_dir).lexically_normal();

  std::vector<PairOutcome> outcomes(records.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < records.size(); i = next++) {
      outcomes[i] = process_pair(records[i], o, out_root, scores);
      if (outcomes[i].ok) {
        log_event("info", "pair_done", records[i].pair_id);
      } else {
        log_event("error", "pair_failed", records[i].pair_id + ": " + outcomes[i].error);
      }
    }
  };
  const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(o.config.workers), records.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  std::sort(outcomes.begin(), outcomes.end(),
            [](const PairOutcome& a, const PairOutcome& b) { return a.pair_id < b.pair_id; });

  ForgeSummary summary;
  summary.pairs = records.size();
  std::string index;
  for (const auto& r : outcomes) {
    if (!r.ok) {
      summary.failures.emplace_back(r.pair_id, r.error);
      continue;
    }
    ++summary.succeeded;
    if (!r.converged) ++summary.unconverged_inpaints;
    if (r.dropped) {
      ++summary.dropped;
      summary.dropped_ids.push_back(r.pair_id);
      continue;
    }
    ++summary.kept;
    index += join_rows(r.naive);
    index += join_rows(r.cycle);
  }
  {
    std::ofstream f(out_root / "triplets.jsonl", std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorKind::io, "cannot write " + (out_root / "triplets.jsonl").string());
    f << index;
  }
  summary.exit_code = summary.failures.empty() ? kExitOk : kExitPartialFailure;
  summary.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return summary;
}

IqaFilterSummary filter_triplets_by_iqa(const fs::path& triplets_file, const fs::path& scores_file, double threshold,
                                        const fs::path& out_file) {
  const auto rows = read_triplets_file(triplets_file);
  const auto scores = read_iqa_scores(scores_file);
  const fs::path in_base = fs::absolute(triplets_file).parent_path().lexically_normal();
  const fs::path out_base = fs::absolute(out_file).parent_path().lexically_normal();

  std::vector<std::string> order;
  std::map<std::string, std::vector<const Triplet*>> by_pair;
  for (const auto& r : rows) {
    auto& bucket = by_pair[r.triplet.pair_id];
    if (bucket.empty()) order.push_back(r.triplet.pair_id);
    bucket.push_back(&r.triplet);
  }

  IqaFilterSummary summary;
  summary.pairs = order.size();
  std::map<std::string, bool> keep;
  for (const auto& id : order) {
    std::vector<const Triplet*> cycles;
    for (const Triplet* t : by_pair[id])
      if (t->kind == TripletKind::cycle) cycles.push_back(t);
    if (cycles.size() != 2) throw Error(ErrorKind::validation, "pair '" + id + "' does not have exactly 2 cycle triplets");
    auto score = [&](const std::string& p) -> std::optional<double> {
      const auto it = scores.find(resolve_path(in_base, p).string());
      if (it == scores.end()) return std::nullopt;
      return it->second;
    };
    // Cycle rows are (C_ab, C_ba, C_a) and (C_ba, C_ab, C_b): the reference
    // is the real image each target was synthesized from.
    const auto r1 = score(cycles[0]->reference.path), r2 = score(cycles[1]->reference.path);
    const auto s1 = score(cycles[0]->target.path), s2 = score(cycles[1]->target.path);
    if (!r1 || !r2 || !s1 || !s2) {
      summary.unscored_ids.push_back(id);
      keep[id] = false;
      continue;
    }
    keep[id] = iqa_gate({*r1, *r2}, {*s1, *s2}, threshold) == IqaDecision::keep;
    if (keep[id]) {
      ++summary.kept;
    } else {
      summary.dropped_ids.push_back(id);
    }
  }

  std::ofstream out(out_file, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot write " + out_file.string());
  const bool rebase = in_base != out_base;
  for (const auto& r : rows) {
    if (!keep[r.triplet.pair_id]) continue;
    Triplet t = r.triplet;
    if (rebase) {
      for (ImageRef* ref : {&t.target, &t.source, &t.reference}) ref->path = resolve_path(in_base, ref->path).string();
    }
    out << triplet_to_jsonl(t) << '\n';
  }
  return summary;
}

ManifestSummary build_manifest_file(const fs::path& vanilla_list, const fs::path& triplets_file,
                                    const RunConfig& config, const fs::path& out_file) {
  validate(config);
  const fs::path list_base = fs::absolute(vanilla_list).parent_path();
  std::vector<std::string> vanilla;
  for (const auto& p : read_path_list(vanilla_list)) vanilla.push_back(resolve_path(list_base, p).string());

  const fs::path trip_base = fs::absolute(triplets_file).parent_path();
  std::vector<Triplet> cycles;
  for (const auto& r : read_triplets_file(triplets_file)) {
    if (r.triplet.kind != TripletKind::cycle) continue;
    Triplet t = r.triplet;
    for (ImageRef* ref : {&t.target, &t.source, &t.reference}) ref->path = resolve_path(trip_base, ref->path).string();
    cycles.push_back(std::move(t));
  }

  const ManifestBuild build =
      build_manifest(vanilla, cycles, ManifestOptions{config.ratio, config.recon_fraction, config.seed});
  write_manifest_file(out_file, build.rows);

  ManifestSummary s;
  s.vanilla = vanilla.size();
  s.warnings = build.warnings;
  for (const auto& row : build.rows) {
    switch (row.kind) {
      case ManifestKind::vanilla_recon: ++s.recon; break;
      case ManifestKind::vanilla_swap: ++s.swap; break;
      case ManifestKind::cycle: ++s.cycle; break;
    }
  }
  return s;
}

std::string EvalReport::to_json() const {
  ordered_json j;
  j["task"] = task;
  j["value"] = value;
  j["n"] = n;
  j["config"] = ordered_json::parse(config_json.empty() ? "{}" : config_json);
  return j.dump();
}

EvalReport run_eval(const EvalOptions& o) {
  const bool known = std::find(std::begin(kEvalTasks), std::end(kEvalTasks), o.task) != std::end(kEvalTasks);
  if (!known) throw Error(ErrorKind::validation, "unknown eval task '" + o.task + "'");

  const EmbeddingTable a = load_embeddings(o.a, o.a_meta);
  std::optional<EmbeddingTable> b;
  if (o.b) b = load_embeddings(*o.b, o.b_meta);

  EvalReport report;
  report.task = o.task;
  ordered_json cfg;
  cfg["a"] = o.a.string();
  cfg["b"] = o.b ? ordered_json(o.b->string()) : ordered_json(nullptr);
  cfg["dim"] = a.matrix.dim();

  auto need_b = [&]() -> const EmbeddingTable& {
    if (!b) throw Error(ErrorKind::validation, "task '" + o.task + "' needs a second input (--b)");
    return *b;
  };

  if (o.task == "id-sim" || o.task == "l-sim") {
    report.value = id_similarity(a.matrix, need_b().matrix);
    report.n = a.matrix.rows();
    cfg["metric"] = "mean cosine similarity";
  } else if (o.task == "id-ret" || o.task == "l-ret") {
    const EmbeddingTable& gallery = b ? *b : a;
    if (a.records.empty() || gallery.records.empty()) {
      throw Error(ErrorKind::validation, "retrieval needs identity labels (EMB1 sidecar or CSV id column)");
    }
    const RetrievalResult r = id_retrieval(a.labeled(), gallery.labeled());
    report.value = r.percentage;
    report.n = r.queries;
    cfg["metric"] = "top-1 cosine retrieval (%)";
    cfg["gallery_size"] = gallery.matrix.rows();
    cfg["self_gallery"] = !b.has_value();
  } else if (o.task == "pose" || o.task == "exp") {
    report.value = vector_l2_error(a.matrix, need_b().matrix);
    report.n = a.matrix.rows();
    cfg["metric"] = "mean L2 distance";
  } else {
    const FidResult r = fid_from_features(a.matrix, need_b().matrix);
    report.value = r.value;
    report.n = a.matrix.rows() + need_b().matrix.rows();
    cfg["metric"] = "frechet distance";
    cfg["undersampled"] = r.undersampled;
    if (r.undersampled) log_event("warn", "fid_undersampled", "sample count <= feature dim; covariance is rank deficient");
  }
  report.config_json = cfg.dump();
  return report;
}

std::string LossReport::to_json() const {
  ordered_json j;
  j["pixel"] = cycle.pixel;
  j["lpips"] = cycle.lpips;
  j["id"] = cycle.id;
  j["ct_total"] = cycle.total;
  j["fix_s"] = fixer.source;
  j["fix_ref"] = fixer.reference;
  j["fix_total"] = fixer.total;
  return j.dump();
}

LossWeights load_loss_weights(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open weights " + path.string());
  ordered_json j;
  try {
    j = ordered_json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::validation, path.string() + ": not valid JSON (byte " + std::to_string(e.byte) + ")");
  }
  LossWeights w;
  try {
    if (j.contains("lambda_ct")) w.lambda_ct = j.at("lambda_ct").get<std::array<double, 3>>();
    if (j.contains("lambda_fix")) w.lambda_fix = j.at("lambda_fix").get<std::array<double, 2>>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorKind::validation, path.string() + ": lambda_ct needs 3 numbers and lambda_fix 2");
  }
  validate(w);
  return w;
}

FeatureStack load_feature_stack(const fs::path& dir, const std::string& prefix) {
  FeatureStack stack;
  for (std::size_t k = 0;; ++k) {
    const fs::path p = dir / (prefix + std::to_string(k) + ".emb");
    if (!fs::exists(p)) break;
    const EmbeddingMatrix m = read_emb1(p);
    stack.push_back(FeatureLayer{{m.rows(), m.dim()}, {m.values().begin(), m.values().end()}});
  }
  if (stack.empty()) throw Error(ErrorKind::validation, "no feature layers " + (dir / (prefix + "0.emb")).string());
  return stack;
}

LossReport run_loss(const fs::path& dir, const fs::path& weights_file, bool has_reference) {
  const LossWeights w = load_loss_weights(weights_file);
  const Image y = read_image_png(dir / "y.png");
  const Image ref = read_image_png(dir / "ref.png");
  LossReport r;
  r.cycle = cycle_triplet_total(y, ref, load_feature_stack(dir, "feat_y_"), load_feature_stack(dir, "feat_ref_"),
                                first_embedding(dir / "id_y.emb"), first_embedding(dir / "id_ref.emb"), w);
  const Embedding fix_y = first_embedding(dir / "fix_y.emb");
  const Embedding fix_src = first_embedding(dir / "fix_src.emb");
  // Without a real reference the reference embedding is optional.
  const Embedding fix_ref =
      has_reference || fs::exists(dir / "fix_ref.emb") ? first_embedding(dir / "fix_ref.emb") : fix_y;
  r.fixer = fixer_total(fix_src, fix_ref, fix_y, w, has_reference);
  return r;
}

std::string ValidationReport::to_json() const {
  ordered_json j;
  j["records"] = records;
  j["clean"] = clean();
  ordered_json list = ordered_json::array();
  for (const auto& f : findings) list.push_back({{"line", f.line}, {"rule", f.rule}, {"message", f.message}});
  j["findings"] = list;
  return j.dump();
}

ValidationReport validate_file(ValidateTarget target, const fs::path& path) {
  ValidationReport report;
  if (!fs::exists(path)) {
    add_finding(report, 0, "closure", "file does not exist: " + path.string());
    return report;
  }
  const fs::path base = fs::absolute(path).parent_path();
  try {
    switch (target) {
      case ValidateTarget::manifest: {
        const auto rows = read_manifest_file(path);
        report.records = rows.size();
        for (const auto& rec : rows) {
          for (auto& v : routing_violations(rec.row)) add_finding(report, rec.line, "routing", std::move(v));
          check_exists(report, rec.line, base, rec.row.target);
          if (rec.row.source != rec.row.target) check_exists(report, rec.line, base, rec.row.source);
          if (rec.row.reference && *rec.row.reference != rec.row.target) {
            check_exists(report, rec.line, base, *rec.row.reference);
          }
        }
        break;
      }
      case ValidateTarget::triplets: {
        const auto rows = read_triplets_file(path);
        report.records = rows.size();
        for (const auto& r : rows) {
          const Triplet& t = r.triplet;
          if (t.kind == TripletKind::naive) {
            if (!t.reference.synthetic) add_finding(report, r.line, "routing", "naive reference must be synthetic");
            if (t.target.synthetic || t.source.synthetic) {
              add_finding(report, r.line, "routing", "naive target and source must be real");
            }
          } else {
            if (t.reference.synthetic) add_finding(report, r.line, "routing", "cycle reference must be real");
            if (!t.target.synthetic || !t.source.synthetic) {
              add_finding(report, r.line, "routing", "cycle target and source must be synthetic");
            }
          }
          for (const ImageRef* ref : {&t.target, &t.source, &t.reference}) check_exists(report, r.line, base, ref->path);
        }
        break;
      }
      case ValidateTarget::pairs: {
        const auto records = read_pairs_file(path);
        report.records = records.size();
        for (const auto& rec : records) {
          std::vector<std::string> files = {rec.paths.c_a,           rec.paths.c_b,         rec.paths.r_ab,
                                            rec.paths.r_ba,          rec.paths.inner_mask_ab, rec.paths.inner_mask_ba,
                                            rec.paths.face_mask_a,   rec.paths.face_mask_b, rec.paths.face_mask_rab,
                                            rec.paths.face_mask_rba};
          if (rec.paths.face_mask_mab) files.push_back(*rec.paths.face_mask_mab);
          if (rec.paths.face_mask_mba) files.push_back(*rec.paths.face_mask_mba);
          std::optional<PngInfo> first;
          for (const auto& f : files) {
            if (!fs::exists(f)) {
              add_finding(report, rec.line, "closure", "missing file " + f);
              continue;
            }
            try {
              const PngInfo info = probe_png(f);
              if (!first) {
                first = info;
                if (info.width < kMinPipelineDim || info.height < kMinPipelineDim) {
                  add_finding(report, rec.line, "geometry", "images must be at least 8x8: " + f);
                }
              } else if (info.width != first->width || info.height != first->height) {
                add_finding(report, rec.line, "geometry", "dimensions differ from c_a: " + f);
              }
            } catch (const Error& e) {
              add_finding(report, rec.line, "schema", e.what());
            }
          }
        }
        break;
      }
      case ValidateTarget::embeddings: {
        const EmbeddingTable t = load_embeddings(path);
        report.records = t.matrix.rows();
        for (std::size_t i = 0; i < t.matrix.rows(); ++i) {
          const auto row = t.matrix.row(i);
          if (std::all_of(row.begin(), row.end(), [](float v) { return v == 0.0f; })) {
            add_finding(report, i + 1, "degenerate", "row " + std::to_string(i) + " is a zero vector");
          }
        }
        break;
      }
    }
  } catch (const Error& e) {
    add_finding(report, 0, "schema", e.what());
  }
  return report;
}

}  // namespace faceforge
