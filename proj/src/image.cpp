#include "faceforge/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "faceforge/error.hpp"

namespace faceforge {

Image::Image(int width, int height, int channels, float fill)
    : width_(width), height_(height), channels_(channels) {
  if (width <= 0 || height <= 0 || channels <= 0) {
    throw Error(ErrorKind::geometry, "image dimensions must be positive, got " +
                                         std::to_string(width) + "x" + std::to_string(height) +
                                         "x" + std::to_string(channels));
  }
  data_.assign(static_cast<std::size_t>(width) * height * channels, fill);
}

Mask::Mask(int width, int height, bool fill) : width_(width), height_(height) {
  if (width <= 0 || height <= 0) {
    throw Error(ErrorKind::geometry, "mask dimensions must be positive, got " +
                                         std::to_string(width) + "x" + std::to_string(height));
  }
  bits_.assign(static_cast<std::size_t>(width) * height, fill ? 1 : 0);
}

std::size_t Mask::count() const noexcept {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

Mask Mask::complement() const {
  Mask out = *this;
  for (auto& b : out.bits_) b = b ? 0 : 1;
  return out;
}

Image Mask::to_weights() const {
  Image out(width_, height_, 1);
  auto px = out.data();
  for (std::size_t i = 0; i < bits_.size(); ++i) px[i] = bits_[i] ? 1.0f : 0.0f;
  return out;
}

Image clamp_unit(Image img) {
  for (float& v : img.data()) v = std::clamp(v, 0.0f, 1.0f);
  return img;
}

bool all_finite(const Image& img) {
  return std::all_of(img.data().begin(), img.data().end(), [](float v) { return std::isfinite(v); });
}

namespace {

std::string dims(int w, int h) { return std::to_string(w) + "x" + std::to_string(h); }

}  // namespace

void require_pipeline_image(const Image& img, const char* role) {
  if (img.channels() != 3) {
    throw Error(ErrorKind::geometry, std::string(role) + " must have 3 channels");
  }
  if (img.width() < kMinPipelineDim || img.height() < kMinPipelineDim) {
    throw Error(ErrorKind::geometry, std::string(role) + " is " + dims(img.width(), img.height()) +
                                         ", minimum is 8x8");
  }
  if (!all_finite(img)) {
    throw Error(ErrorKind::validation, std::string(role) + " contains non-finite values");
  }
}

void require_same_dims(const Image& a, const Image& b, const char* what) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw Error(ErrorKind::geometry, std::string(what) + ": " + dims(a.width(), a.height()) +
                                         " vs " + dims(b.width(), b.height()));
  }
}

void require_same_dims(const Image& a, const Mask& m, const char* what) {
  if (a.width() != m.width() || a.height() != m.height()) {
    throw Error(ErrorKind::geometry, std::string(what) + ": " + dims(a.width(), a.height()) +
                                         " vs mask " + dims(m.width(), m.height()));
  }
}

void require_same_dims(const Mask& a, const Mask& b, const char* what) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw Error(ErrorKind::geometry, std::string(what) + ": " + dims(a.width(), a.height()) +
                                         " vs " + dims(b.width(), b.height()));
  }
}

}  // namespace faceforge
