#pragma once

#include <filesystem>

#include "faceforge/image.hpp"

namespace faceforge {

// 8-bit PNG boundary. Reads scale by 1/255; writes clamp to [0,1] and
// quantize with round-half-up. Palette, gray, alpha and 16-bit inputs are
// normalized to 8-bit RGB on read.
Image read_image_png(const std::filesystem::path& path);
void write_image_png(const std::filesystem::path& path, const Image& img);

// Masks: any nonzero sample (in any channel) reads as 1. Written as
// single-channel 0/255.
Mask read_mask_png(const std::filesystem::path& path);
void write_mask_png(const std::filesystem::path& path, const Mask& mask);

struct PngInfo {
  int width = 0;
  int height = 0;
};

// Header-only probe.
PngInfo probe_png(const std::filesystem::path& path);

}  // namespace faceforge
