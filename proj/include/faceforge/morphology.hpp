#pragma once

#include "faceforge/image.hpp"

namespace faceforge {

enum class MorphOp { erode, dilate };

// Binary morphology with a disc structuring element {dx^2 + dy^2 <= r^2}.
// Pixels outside the raster count as background for both operations, so an
// all-ones mask loses its outer ring under erosion.
Mask mask_morphology(const Mask& mask, MorphOp op, int radius);

inline Mask erode(const Mask& m, int radius) { return mask_morphology(m, MorphOp::erode, radius); }
inline Mask dilate(const Mask& m, int radius) { return mask_morphology(m, MorphOp::dilate, radius); }

}  // namespace faceforge
