#include "faceforge/blending.hpp"

#include "faceforge/error.hpp"
#include "faceforge/morphology.hpp"
#include "faceforge/pyramid.hpp"

namespace faceforge {

void validate(const BlendConfig& cfg) {
  if (cfg.levels < 2) throw Error(ErrorKind::level_count, "blend levels must be >= 2");
  if (cfg.mask_erode_radius < 0) throw Error(ErrorKind::contract, "erode radius must be >= 0");
}

Image multiband_blend(const Image& target, const Image& reenacted, const Mask& inner_face_mask,
                      const BlendConfig& cfg) {
  validate(cfg);
  require_pipeline_image(target, "target");
  require_pipeline_image(reenacted, "reenacted");
  require_same_dims(target, reenacted, "blend target/reenacted");
  require_same_dims(target, inner_face_mask, "blend target/mask");

  // Erode away from interior edges only; the frame border does not count as background.
  const Mask mask = dilate(inner_face_mask.complement(), cfg.mask_erode_radius).complement();
  const Pyramid weights = build_pyramid(mask.to_weights(), cfg.levels, PyramidKind::gaussian);
  const Pyramid src = build_pyramid(reenacted, cfg.levels, PyramidKind::laplacian);
  Pyramid out = build_pyramid(target, cfg.levels, PyramidKind::laplacian);

  for (std::size_t k = 0; k < out.levels.size(); ++k) {
    Image& level = out.levels[k];
    const Image& s = src.levels[k];
    const Image& m = weights.levels[k];
    for (int y = 0; y < level.height(); ++y) {
      for (int x = 0; x < level.width(); ++x) {
        const float a = m.at(x, y);
        for (int c = 0; c < level.channels(); ++c) {
          level.at(x, y, c) = a * s.at(x, y, c) + (1.0f - a) * level.at(x, y, c);
        }
      }
    }
  }
  return collapse_pyramid(out);
}

}  // namespace faceforge
