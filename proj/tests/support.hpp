#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <optional>
#include <string>
#include <unistd.h>

#include "faceforge/error.hpp"
#include "faceforge/image.hpp"

namespace fftest {

inline faceforge::Image random_image(int w, int h, std::mt19937_64& rng, int channels = 3) {
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  faceforge::Image img(w, h, channels);
  for (float& v : img.data()) v = u(rng);
  return img;
}

inline faceforge::Mask random_mask(int w, int h, std::mt19937_64& rng, double p = 0.5) {
  std::bernoulli_distribution b(p);
  faceforge::Mask m(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) m.set(x, y, b(rng));
  return m;
}

inline double max_abs_diff(const faceforge::Image& a, const faceforge::Image& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, static_cast<double>(std::abs(a.data()[i] - b.data()[i])));
  return m;
}

// Returns the ErrorKind thrown by f, or nullopt if it returned normally.
template <typename F>
std::optional<faceforge::ErrorKind> error_kind(F&& f) {
  try {
    f();
  } catch (const faceforge::Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& tag) {
  static std::atomic<int> counter{0};
  auto dir = std::filesystem::temp_directory_path() /
             ("ff_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::filesystem::path fixture_corpus() { return std::filesystem::path(FF_FIXTURE_DIR) / "corpus"; }

}  // namespace fftest
