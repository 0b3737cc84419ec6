#include "faceforge/pyramid.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <string>

#include "faceforge/error.hpp"

namespace faceforge {
namespace {

constexpr std::array<float, 5> kBinomial = {1.0f / 16, 4.0f / 16, 6.0f / 16, 4.0f / 16, 1.0f / 16};

// Reflect-101 (edge pixel not repeated), folded for any n >= 1.
int reflect(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * n - 2;
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - i;
}

int half_ceil(int n) { return (n + 1) / 2; }

// Horizontal binomial pass evaluated only at even columns (decimating).
Image filter_rows_decimate(const Image& in) {
  const int w = in.width(), h = in.height(), c = in.channels();
  Image out(half_ceil(w), h, c);
  for (int y = 0; y < h; ++y) {
    for (int ox = 0; ox < out.width(); ++ox) {
      const int x = 2 * ox;
      for (int ch = 0; ch < c; ++ch) {
        float acc = 0.0f;
        for (int k = -2; k <= 2; ++k) acc += kBinomial[k + 2] * in.at(reflect(x + k, w), y, ch);
        out.at(ox, y, ch) = acc;
      }
    }
  }
  return out;
}

Image filter_cols_decimate(const Image& in) {
  const int w = in.width(), h = in.height(), c = in.channels();
  Image out(w, half_ceil(h), c);
  for (int oy = 0; oy < out.height(); ++oy) {
    const int y = 2 * oy;
    for (int x = 0; x < w; ++x) {
      for (int ch = 0; ch < c; ++ch) {
        float acc = 0.0f;
        for (int k = -2; k <= 2; ++k) acc += kBinomial[k + 2] * in.at(x, reflect(y + k, h), ch);
        out.at(x, oy, ch) = acc;
      }
    }
  }
  return out;
}

// Zero-insert along x to width 2w, filter with 2x the kernel, keep
// `target_w` columns. Odd positions of the expanded signal are zero, so only
// the taps landing on even positions contribute.
Image expand_rows(const Image& in, int target_w) {
  const int w = in.width(), h = in.height(), c = in.channels();
  const int wide = 2 * w;
  Image out(target_w, h, c);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < target_w; ++x) {
      for (int ch = 0; ch < c; ++ch) {
        float acc = 0.0f;
        for (int k = -2; k <= 2; ++k) {
          const int src = reflect(x + k, wide);
          if (src % 2 == 0) acc += 2.0f * kBinomial[k + 2] * in.at(src / 2, y, ch);
        }
        out.at(x, y, ch) = acc;
      }
    }
  }
  return out;
}

Image expand_cols(const Image& in, int target_h) {
  const int w = in.width(), h = in.height(), c = in.channels();
  const int tall = 2 * h;
  Image out(w, target_h, c);
  for (int y = 0; y < target_h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int ch = 0; ch < c; ++ch) {
        float acc = 0.0f;
        for (int k = -2; k <= 2; ++k) {
          const int src = reflect(y + k, tall);
          if (src % 2 == 0) acc += 2.0f * kBinomial[k + 2] * in.at(x, src / 2, ch);
        }
        out.at(x, y, ch) = acc;
      }
    }
  }
  return out;
}

std::string dims(int w, int h) { return std::to_string(w) + "x" + std::to_string(h); }

}  // namespace

Image downsample(const Image& img) { return filter_cols_decimate(filter_rows_decimate(img)); }

Image upsample(const Image& img, int target_width, int target_height) {
  if (half_ceil(target_width) != img.width() || half_ceil(target_height) != img.height()) {
    throw Error(ErrorKind::contract, "upsample target " + dims(target_width, target_height) +
                                         " is not double-then-crop of " +
                                         dims(img.width(), img.height()));
  }
  return expand_cols(expand_rows(img, target_width), target_height);
}

Image resample(const Image& img, ResampleDirection direction, int target_width, int target_height) {
  if (direction == ResampleDirection::down) {
    if (target_width != half_ceil(img.width()) || target_height != half_ceil(img.height())) {
      throw Error(ErrorKind::contract, "downsample target " + dims(target_width, target_height) +
                                           " is not half of " + dims(img.width(), img.height()));
    }
    return downsample(img);
  }
  return upsample(img, target_width, target_height);
}

bool levels_fit(int width, int height, int levels) {
  if (levels < 2 || levels > 30) return false;
  int w = width, h = height;
  for (int k = 1; k < levels; ++k) {
    w = half_ceil(w);
    h = half_ceil(h);
  }
  return w >= 4 && h >= 4;
}

int default_levels(int width, int height) {
  const unsigned m = static_cast<unsigned>(std::min(width, height));
  const int floor_log2 = static_cast<int>(std::bit_width(m)) - 1;
  return std::max(2, std::min(5, floor_log2 - 2));
}

Pyramid build_pyramid(const Image& img, int levels, PyramidKind kind) {
  if (!levels_fit(img.width(), img.height(), levels)) {
    throw Error(ErrorKind::level_count, std::to_string(levels) + " levels do not fit a " +
                                            dims(img.width(), img.height()) +
                                            " image (need >= 2 levels, coarsest >= 4x4)");
  }
  std::vector<Image> gauss;
  gauss.reserve(levels);
  gauss.push_back(img);
  for (int k = 1; k < levels; ++k) gauss.push_back(downsample(gauss.back()));

  Pyramid out{kind, {}};
  if (kind == PyramidKind::gaussian) {
    out.levels = std::move(gauss);
    return out;
  }
  out.levels.reserve(levels);
  for (int k = 0; k + 1 < levels; ++k) {
    Image band = gauss[k];
    const Image up = upsample(gauss[k + 1], band.width(), band.height());
    auto b = band.data();
    auto u = up.data();
    for (std::size_t i = 0; i < b.size(); ++i) b[i] -= u[i];
    out.levels.push_back(std::move(band));
  }
  out.levels.push_back(std::move(gauss.back()));
  return out;
}

Image collapse_pyramid(const Pyramid& pyramid) {
  if (pyramid.kind != PyramidKind::laplacian) {
    throw Error(ErrorKind::wrong_kind, "collapse requires a laplacian pyramid");
  }
  if (pyramid.levels.size() < 2) {
    throw Error(ErrorKind::level_count, "pyramid has fewer than 2 levels");
  }
  Image acc = pyramid.levels.back();
  for (auto k = static_cast<std::ptrdiff_t>(pyramid.levels.size()) - 2; k >= 0; --k) {
    const Image& band = pyramid.levels[static_cast<std::size_t>(k)];
    Image up = upsample(acc, band.width(), band.height());
    auto u = up.data();
    auto b = band.data();
    for (std::size_t i = 0; i < u.size(); ++i) u[i] += b[i];
    acc = std::move(up);
  }
  return clamp_unit(std::move(acc));
}

}  // namespace faceforge
