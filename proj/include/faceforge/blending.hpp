#pragma once

#include "faceforge/image.hpp"

namespace faceforge {

struct BlendConfig {
  int levels = 5;
  // Pre-erosion of the inner-face mask, in pixels (default tuned for 256^2).
  int mask_erode_radius = 2;

  bool operator==(const BlendConfig&) const = default;
};

void validate(const BlendConfig& cfg);

// Multi-band blend of `reenacted` into `target`: per level,
//   out_k = G(mask)_k * L(reenacted)_k + (1 - G(mask)_k) * L(target)_k
// with a gaussian pyramid of the (eroded) mask, then collapsed and clamped.
Image multiband_blend(const Image& target, const Image& reenacted, const Mask& inner_face_mask,
                      const BlendConfig& cfg = {});

}  // namespace faceforge
