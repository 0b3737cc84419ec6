#include "faceforge/config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "faceforge/error.hpp"

namespace faceforge {
namespace {

using nlohmann::ordered_json;

void reject_unknown(const ordered_json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!keys.count(key)) throw Error(ErrorKind::validation, "unknown config key '" + where + key + "'");
  }
}

template <typename T>
void read_if(const ordered_json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorKind::validation, "config key '" + where + key + "' has the wrong type");
  }
}

const ordered_json& section(const ordered_json& j, const char* key) {
  static const ordered_json empty = ordered_json::object();
  if (!j.contains(key)) return empty;
  if (!j.at(key).is_object()) throw Error(ErrorKind::validation, std::string("config key '") + key + "' must be an object");
  return j.at(key);
}

}  // namespace

void validate(const RunConfig& cfg) {
  validate(cfg.synthesis.blend);
  validate(cfg.synthesis.inpaint);
  validate(cfg.crop);
  if (!std::isfinite(cfg.iqa_threshold)) throw Error(ErrorKind::validation, "iqa_threshold must be finite");
  if (!(cfg.ratio >= 0.0) || !std::isfinite(cfg.ratio)) throw Error(ErrorKind::validation, "ratio must be >= 0");
  if (!(cfg.recon_fraction >= 0.0 && cfg.recon_fraction <= 1.0)) {
    throw Error(ErrorKind::validation, "recon_fraction must lie in [0,1]");
  }
  if (cfg.workers < 1) throw Error(ErrorKind::validation, "workers must be >= 1");
}

std::string serialize_config(const RunConfig& cfg) {
  ordered_json j;
  j["blend"] = {{"levels", cfg.synthesis.blend.levels}, {"erode_radius", cfg.synthesis.blend.mask_erode_radius}};
  j["inpaint"] = {{"max_iterations", cfg.synthesis.inpaint.max_iterations},
                  {"tolerance", cfg.synthesis.inpaint.residual_tolerance}};
  j["iqa_threshold"] = cfg.iqa_threshold;
  j["ratio"] = cfg.ratio;
  j["recon_fraction"] = cfg.recon_fraction;
  j["seed"] = cfg.seed;
  j["workers"] = cfg.workers;
  j["crop"] = {{"aligned_size", cfg.crop.aligned_size}, {"x", cfg.crop.x}, {"y", cfg.crop.y}, {"size", cfg.crop.size}};
  return j.dump(2) + "\n";
}

RunConfig parse_config(std::string_view text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::validation, "config is not valid JSON (byte " + std::to_string(e.byte) + ")");
  }
  if (!j.is_object()) throw Error(ErrorKind::validation, "config must be a JSON object");
  reject_unknown(j, {"blend", "inpaint", "iqa_threshold", "ratio", "recon_fraction", "seed", "workers", "crop"}, "");

  RunConfig cfg;
  const auto& blend = section(j, "blend");
  reject_unknown(blend, {"levels", "erode_radius"}, "blend.");
  read_if(blend, "levels", cfg.synthesis.blend.levels, "blend.");
  read_if(blend, "erode_radius", cfg.synthesis.blend.mask_erode_radius, "blend.");

  const auto& inpaint = section(j, "inpaint");
  reject_unknown(inpaint, {"max_iterations", "tolerance"}, "inpaint.");
  read_if(inpaint, "max_iterations", cfg.synthesis.inpaint.max_iterations, "inpaint.");
  read_if(inpaint, "tolerance", cfg.synthesis.inpaint.residual_tolerance, "inpaint.");

  read_if(j, "iqa_threshold", cfg.iqa_threshold, "");
  read_if(j, "ratio", cfg.ratio, "");
  read_if(j, "recon_fraction", cfg.recon_fraction, "");
  read_if(j, "seed", cfg.seed, "");
  read_if(j, "workers", cfg.workers, "");

  const auto& crop = section(j, "crop");
  reject_unknown(crop, {"aligned_size", "x", "y", "size"}, "crop.");
  read_if(crop, "aligned_size", cfg.crop.aligned_size, "crop.");
  read_if(crop, "x", cfg.crop.x, "crop.");
  read_if(crop, "y", cfg.crop.y, "crop.");
  read_if(crop, "size", cfg.crop.size, "crop.");

  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

void save_config(const std::filesystem::path& path, const RunConfig& cfg) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot write config " + path.string());
  out << serialize_config(cfg);
}

}  // namespace faceforge
