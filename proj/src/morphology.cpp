#include "faceforge/morphology.hpp"

#include <utility>
#include <vector>

#include "faceforge/error.hpp"

namespace faceforge {

Mask mask_morphology(const Mask& mask, MorphOp op, int radius) {
  if (radius < 0) throw Error(ErrorKind::contract, "morphology radius must be >= 0");
  if (radius == 0) return mask;

  std::vector<std::pair<int, int>> disc;
  for (int dy = -radius; dy <= radius; ++dy)
    for (int dx = -radius; dx <= radius; ++dx)
      if (dx * dx + dy * dy <= radius * radius) disc.emplace_back(dx, dy);

  const int w = mask.width(), h = mask.height();
  Mask out(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (op == MorphOp::erode) {
        bool keep = true;
        for (auto [dx, dy] : disc) {
          const int sx = x + dx, sy = y + dy;
          if (sx < 0 || sy < 0 || sx >= w || sy >= h || !mask.at(sx, sy)) {
            keep = false;
            break;
          }
        }
        out.set(x, y, keep);
      } else {
        bool hit = false;
        for (auto [dx, dy] : disc) {
          const int sx = x + dx, sy = y + dy;
          if (sx >= 0 && sy >= 0 && sx < w && sy < h && mask.at(sx, sy)) {
            hit = true;
            break;
          }
        }
        out.set(x, y, hit);
      }
    }
  }
  return out;
}

}  // namespace faceforge
