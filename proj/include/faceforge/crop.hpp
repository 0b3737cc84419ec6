#pragma once

#include "faceforge/image.hpp"

namespace faceforge {

// Lower-face window inside an FR-aligned face. Defaults take the middle of
// the lower half of a 112x112 alignment: columns [28,84), rows [56,112).
struct CropGeometry {
  int aligned_size = 112;
  int x = 28;
  int y = 56;
  int size = 56;

  bool operator==(const CropGeometry&) const = default;
};

void validate(const CropGeometry& geometry);

Image crop_lower_face(const Image& aligned, const CropGeometry& geometry = {});

}  // namespace faceforge
