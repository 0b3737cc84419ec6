#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace faceforge {

// Row-major, channel-interleaved float raster. Pipeline images are 3-channel
// with values in [0,1]; pyramid bands reuse the type with signed values and
// mask weights use a single channel.
class Image {
 public:
  Image() = default;
  Image(int width, int height, int channels = 3, float fill = 0.0f);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  float& at(int x, int y, int c = 0) {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }
  float at(int x, int y, int c = 0) const {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }

  std::span<float> data() noexcept { return data_; }
  std::span<const float> data() const noexcept { return data_; }

  bool same_shape(const Image& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_ && channels_ == other.channels_;
  }

  bool operator==(const Image&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 0;
  std::vector<float> data_;
};

// Binary raster; every stored value is exactly 0 or 1.
class Mask {
 public:
  Mask() = default;
  Mask(int width, int height, bool fill = false);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return bits_.size(); }

  bool at(int x, int y) const { return bits_[static_cast<std::size_t>(y) * width_ + x] != 0; }
  void set(int x, int y, bool v) { bits_[static_cast<std::size_t>(y) * width_ + x] = v ? 1 : 0; }

  std::span<const std::uint8_t> bits() const noexcept { return bits_; }

  std::size_t count() const noexcept;
  Mask complement() const;
  Image to_weights() const;  // single-channel 0/1 floats

  bool operator==(const Mask&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bits_;
};

Image clamp_unit(Image img);
bool all_finite(const Image& img);

// Pipeline entry checks: 3 channels, width/height >= 8, finite values.
void require_pipeline_image(const Image& img, const char* role);
void require_same_dims(const Image& a, const Image& b, const char* what);
void require_same_dims(const Image& a, const Mask& m, const char* what);
void require_same_dims(const Mask& a, const Mask& b, const char* what);

inline constexpr int kMinPipelineDim = 8;

}  // namespace faceforge
