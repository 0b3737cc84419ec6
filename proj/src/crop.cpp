#include "faceforge/crop.hpp"

#include <string>

#include "faceforge/error.hpp"

namespace faceforge {

void validate(const CropGeometry& g) {
  if (g.aligned_size <= 0 || g.size <= 0 || g.x < 0 || g.y < 0 || g.x + g.size > g.aligned_size ||
      g.y + g.size > g.aligned_size) {
    throw Error(ErrorKind::geometry, "crop window [" + std::to_string(g.x) + "," +
                                         std::to_string(g.y) + ")+" + std::to_string(g.size) +
                                         " does not fit inside " + std::to_string(g.aligned_size));
  }
}

Image crop_lower_face(const Image& aligned, const CropGeometry& g) {
  validate(g);
  if (aligned.width() != g.aligned_size || aligned.height() != g.aligned_size) {
    throw Error(ErrorKind::geometry, "lower-face crop expects a " + std::to_string(g.aligned_size) +
                                         "x" + std::to_string(g.aligned_size) +
                                         " aligned face, got " + std::to_string(aligned.width()) +
                                         "x" + std::to_string(aligned.height()));
  }
  Image out(g.size, g.size, aligned.channels());
  for (int r = 0; r < g.size; ++r)
    for (int c = 0; c < g.size; ++c)
      for (int ch = 0; ch < aligned.channels(); ++ch) out.at(c, r, ch) = aligned.at(c + g.x, r + g.y, ch);
  return out;
}

}  // namespace faceforge
