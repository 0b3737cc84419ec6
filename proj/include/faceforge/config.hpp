#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "faceforge/crop.hpp"
#include "faceforge/forge.hpp"

namespace faceforge {

inline constexpr const char* kConfigEnvVar = "FACEFORGE_CONFIG";

// Every tunable of a batch run. Serialized as JSON:
// {
//   "blend":   {"levels": 5, "erode_radius": 2},
//   "inpaint": {"max_iterations": 2000, "tolerance": 1e-4},
//   "iqa_threshold": 0.4, "ratio": 0.4, "recon_fraction": 0.3,
//   "seed": 0, "workers": 1,
//   "crop":    {"aligned_size": 112, "x": 28, "y": 56, "size": 56}
// }
// Missing keys keep their defaults; unknown keys are rejected.
struct RunConfig {
  SynthesisConfig synthesis;
  double iqa_threshold = 0.4;
  double ratio = 0.4;
  double recon_fraction = 0.3;
  std::uint64_t seed = 0;
  int workers = 1;
  CropGeometry crop;

  bool operator==(const RunConfig&) const = default;
};

void validate(const RunConfig& cfg);

std::string serialize_config(const RunConfig& cfg);
RunConfig parse_config(std::string_view text);

RunConfig load_config(const std::filesystem::path& path);
void save_config(const std::filesystem::path& path, const RunConfig& cfg);

}  // namespace faceforge
