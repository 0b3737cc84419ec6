#include "faceforge/png_io.hpp"

#include <png.h>

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "faceforge/error.hpp"

namespace faceforge {
namespace {

struct DecodedPng {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<std::uint8_t> bytes;
};

DecodedPng decode(const std::filesystem::path& path, png_uint_32 format) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw Error(ErrorKind::io, "cannot read PNG " + path.string() + ": " + image.message);
  }
  image.format = format;
  DecodedPng out;
  out.width = static_cast<int>(image.width);
  out.height = static_cast<int>(image.height);
  out.channels = static_cast<int>(PNG_IMAGE_SAMPLE_CHANNELS(format));
  out.bytes.resize(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, out.bytes.data(), 0, nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    throw Error(ErrorKind::io, "cannot decode PNG " + path.string() + ": " + msg);
  }
  return out;
}

void encode(const std::filesystem::path& path, png_uint_32 format, int width, int height,
            const std::vector<std::uint8_t>& bytes) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(width);
  image.height = static_cast<png_uint_32>(height);
  image.format = format;
  if (!png_image_write_to_file(&image, path.c_str(), 0, bytes.data(), 0, nullptr)) {
    throw Error(ErrorKind::io, "cannot write PNG " + path.string() + ": " + image.message);
  }
}

std::uint8_t quantize(float v) {
  const float c = v < 0.0f ? 0.0f : (v > 1.0f ? 1.0f : v);
  return static_cast<std::uint8_t>(std::floor(c * 255.0f + 0.5f));
}

}  // namespace

Image read_image_png(const std::filesystem::path& path) {
  const DecodedPng png = decode(path, PNG_FORMAT_RGB);
  Image img(png.width, png.height, 3);
  auto px = img.data();
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = static_cast<float>(png.bytes[i]) / 255.0f;
  return img;
}

void write_image_png(const std::filesystem::path& path, const Image& img) {
  if (img.channels() != 3) throw Error(ErrorKind::geometry, "PNG writer expects 3-channel images");
  std::vector<std::uint8_t> bytes(img.size());
  auto px = img.data();
  for (std::size_t i = 0; i < px.size(); ++i) bytes[i] = quantize(px[i]);
  encode(path, PNG_FORMAT_RGB, img.width(), img.height(), bytes);
}

Mask read_mask_png(const std::filesystem::path& path) {
  // Decode as RGB so that colored masks are not luminance-weighted to zero.
  const DecodedPng png = decode(path, PNG_FORMAT_RGB);
  Mask mask(png.width, png.height);
  for (int y = 0; y < png.height; ++y) {
    for (int x = 0; x < png.width; ++x) {
      const std::size_t base = (static_cast<std::size_t>(y) * png.width + x) * 3;
      mask.set(x, y, png.bytes[base] || png.bytes[base + 1] || png.bytes[base + 2]);
    }
  }
  return mask;
}

void write_mask_png(const std::filesystem::path& path, const Mask& mask) {
  std::vector<std::uint8_t> bytes(mask.size());
  auto bits = mask.bits();
  for (std::size_t i = 0; i < bits.size(); ++i) bytes[i] = bits[i] ? 255 : 0;
  encode(path, PNG_FORMAT_GRAY, mask.width(), mask.height(), bytes);
}

PngInfo probe_png(const std::filesystem::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str())) {
    throw Error(ErrorKind::io, "cannot read PNG " + path.string() + ": " + image.message);
  }
  PngInfo info{static_cast<int>(image.width), static_cast<int>(image.height)};
  png_image_free(&image);
  return info;
}

}  // namespace faceforge
