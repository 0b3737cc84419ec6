#pragma once

#include <vector>

#include "faceforge/image.hpp"

namespace faceforge {

enum class PyramidKind { gaussian, laplacian };
enum class ResampleDirection { down, up };

struct Pyramid {
  PyramidKind kind = PyramidKind::gaussian;
  // For laplacian pyramids the last level is the low-pass residual.
  std::vector<Image> levels;
};

// Burt-Adelson 5-tap binomial resampling with reflect-101 borders.
// Down: output dims are ceil(src/2). Up: target dims must satisfy
// ceil(target/2) == src in each axis.
Image resample(const Image& img, ResampleDirection direction, int target_width, int target_height);
Image downsample(const Image& img);
Image upsample(const Image& img, int target_width, int target_height);

// True iff `levels` >= 2 and the coarsest level is at least 4x4.
bool levels_fit(int width, int height, int levels);
int default_levels(int width, int height);

Pyramid build_pyramid(const Image& img, int levels, PyramidKind kind);
Image collapse_pyramid(const Pyramid& pyramid);

}  // namespace faceforge
