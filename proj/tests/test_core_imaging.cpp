#include <doctest.h>

#include <array>
#include <random>
#include <vector>

#include "faceforge/crop.hpp"
#include "faceforge/morphology.hpp"
#include "faceforge/png_io.hpp"
#include "faceforge/pyramid.hpp"
#include "support.hpp"

using namespace faceforge;
using fftest::error_kind;
using fftest::max_abs_diff;

namespace {

// Dense reference: full 2-D 5x5 outer-product kernel, reflect-101 borders,
// evaluated in double on a plain vector of one channel.
int mirror(int i, int n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * (n - 1) - i;
  }
  return i;
}

constexpr std::array<double, 5> k1 = {1 / 16.0, 4 / 16.0, 6 / 16.0, 4 / 16.0, 1 / 16.0};

std::vector<double> dense_conv(const std::vector<double>& src, int w, int h, double gain) {
  std::vector<double> out(src.size(), 0.0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int j = -2; j <= 2; ++j)
        for (int i = -2; i <= 2; ++i) acc += gain * k1[j + 2] * k1[i + 2] * src[mirror(y + j, h) * w + mirror(x + i, w)];
      out[y * w + x] = acc;
    }
  return out;
}

std::vector<double> channel(const Image& img, int c) {
  std::vector<double> v;
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) v.push_back(img.at(x, y, c));
  return v;
}

std::vector<double> oracle_down(const Image& img, int c) {
  const int w = img.width(), h = img.height();
  const auto f = dense_conv(channel(img, c), w, h, 1.0);
  std::vector<double> out;
  for (int y = 0; y < h; y += 2)
    for (int x = 0; x < w; x += 2) out.push_back(f[y * w + x]);
  return out;
}

std::vector<double> oracle_up(const Image& img, int c, int tw, int th) {
  const int w2 = 2 * img.width(), h2 = 2 * img.height();
  std::vector<double> z(static_cast<std::size_t>(w2) * h2, 0.0);
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) z[(2 * y) * w2 + 2 * x] = img.at(x, y, c);
  const auto f = dense_conv(z, w2, h2, 4.0);
  std::vector<double> out;
  for (int y = 0; y < th; ++y)
    for (int x = 0; x < tw; ++x) out.push_back(f[y * w2 + x]);
  return out;
}

Mask brute_morph(const Mask& m, bool dilate_op, int r) {
  Mask out(m.width(), m.height());
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x) {
      bool v = !dilate_op;
      for (int dy = -r; dy <= r; ++dy)
        for (int dx = -r; dx <= r; ++dx) {
          if (dx * dx + dy * dy > r * r) continue;
          const int sx = x + dx, sy = y + dy;
          const bool in = sx >= 0 && sy >= 0 && sx < m.width() && sy < m.height() && m.at(sx, sy);
          if (dilate_op) v = v || in;
          else v = v && in;
        }
      out.set(x, y, v);
    }
  return out;
}

Image ramp(int w, int h) {
  Image img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int c = 0; c < 3; ++c) img.at(x, y, c) = static_cast<float>(x + y) / static_cast<float>(w + h);
  return img;
}

}  // namespace

TEST_CASE("constant image survives down and up") {
  const Image half(16, 16, 3, 0.5f);
  const Image d = downsample(half);
  CHECK(d.width() == 8);
  for (float v : d.data()) CHECK(v == doctest::Approx(0.5f).epsilon(1e-7));
  const Image quarter(16, 16, 3, 0.25f);
  const Image u = upsample(downsample(quarter), 16, 16);
  CHECK(max_abs_diff(u, quarter) <= 1e-7);
}

TEST_CASE("impulse downsample matches dense convolution oracle") {
  Image img(8, 8, 3, 0.0f);
  for (int c = 0; c < 3; ++c) img.at(0, 0, c) = 1.0f;
  const Image d = resample(img, ResampleDirection::down, 4, 4);
  REQUIRE(d.width() == 4);
  REQUIRE(d.height() == 4);
  for (int c = 0; c < 3; ++c) {
    const auto o = oracle_down(img, c);
    for (int y = 0; y < 4; ++y)
      for (int x = 0; x < 4; ++x) CHECK(d.at(x, y, c) == doctest::Approx(o[y * 4 + x]).epsilon(1e-6));
  }
  // Corner tap under reflect-101: (6/16)^2 at the origin.
  CHECK(d.at(0, 0, 0) == doctest::Approx(36.0 / 256.0));
}

TEST_CASE("resample matches dense oracle on random odd and even sizes") {
  std::mt19937_64 rng(7);
  const std::array<std::array<int, 2>, 4> sizes = {{{8, 8}, {9, 13}, {17, 10}, {5, 5}}};
  for (auto [w, h] : sizes) {
    const Image img = fftest::random_image(w, h, rng);
    const Image d = downsample(img);
    CHECK(d.width() == (w + 1) / 2);
    CHECK(d.height() == (h + 1) / 2);
    for (int c = 0; c < 3; ++c) {
      const auto o = oracle_down(img, c);
      for (int i = 0; i < d.width() * d.height(); ++i)
        CHECK(d.at(i % d.width(), i / d.width(), c) == doctest::Approx(o[i]).epsilon(1e-5));
    }
    const int tw = 2 * w - 1, th = 2 * h;
    const Image u = resample(img, ResampleDirection::up, tw, th);
    for (int c = 0; c < 3; ++c) {
      const auto o = oracle_up(img, c, tw, th);
      for (int i = 0; i < tw * th; ++i) CHECK(u.at(i % tw, i / tw, c) == doctest::Approx(o[i]).epsilon(1e-5));
    }
  }
}

TEST_CASE("resample rejects targets off the half/double rule") {
  const Image img(16, 16);
  CHECK(error_kind([&] { resample(img, ResampleDirection::down, 7, 8); }) == ErrorKind::contract);
  CHECK(error_kind([&] { resample(img, ResampleDirection::up, 30, 33); }) == ErrorKind::contract);
  CHECK(error_kind([&] { upsample(img, 34, 32); }) == ErrorKind::contract);
}

TEST_CASE("laplacian pyramid of a constant has empty bands") {
  const Image img(64, 64, 3, 0.5f);
  const Pyramid p = build_pyramid(img, 4, PyramidKind::laplacian);
  REQUIRE(p.levels.size() == 4);
  for (int k = 0; k < 3; ++k)
    for (float v : p.levels[k].data()) CHECK(std::abs(v) <= 1e-6);
  for (float v : p.levels[3].data()) CHECK(v == doctest::Approx(0.5f).epsilon(1e-6));
}

TEST_CASE("pyramid level dimensions halve with ceiling") {
  std::mt19937_64 rng(11);
  const Pyramid p = build_pyramid(fftest::random_image(64, 64, rng), 4, PyramidKind::gaussian);
  const std::array<int, 4> expect = {64, 32, 16, 8};
  for (int k = 0; k < 4; ++k) {
    CHECK(p.levels[k].width() == expect[k]);
    CHECK(p.levels[k].height() == expect[k]);
  }
  const Pyramid odd = build_pyramid(fftest::random_image(37, 45, rng), 4, PyramidKind::laplacian);
  int w = 37, h = 45;
  for (const Image& lvl : odd.levels) {
    CHECK(lvl.width() == w);
    CHECK(lvl.height() == h);
    w = (w + 1) / 2;
    h = (h + 1) / 2;
  }
}

TEST_CASE("pyramid levels equal a composition of resample calls") {
  std::mt19937_64 rng(12);
  const Image img = fftest::random_image(64, 64, rng);
  const Pyramid g = build_pyramid(img, 4, PyramidKind::gaussian);
  const Pyramid l = build_pyramid(img, 4, PyramidKind::laplacian);
  std::vector<Image> ref{img};
  for (int k = 1; k < 4; ++k) {
    const Image& prev = ref.back();
    ref.push_back(resample(prev, ResampleDirection::down, (prev.width() + 1) / 2, (prev.height() + 1) / 2));
  }
  for (int k = 0; k < 4; ++k) CHECK(g.levels[k] == ref[k]);
  for (int k = 0; k < 3; ++k) {
    const Image up = resample(ref[k + 1], ResampleDirection::up, ref[k].width(), ref[k].height());
    for (std::size_t i = 0; i < up.size(); ++i) CHECK(l.levels[k].data()[i] == ref[k].data()[i] - up.data()[i]);
  }
  CHECK(l.levels[3] == ref[3]);
}

TEST_CASE("collapse inverts build") {
  std::mt19937_64 rng(13);
  for (auto [w, h, levels] : std::vector<std::array<int, 3>>{{64, 64, 4}, {64, 64, 5}, {33, 47, 3}, {8, 8, 2}}) {
    const Image x = fftest::random_image(w, h, rng);
    CHECK(max_abs_diff(collapse_pyramid(build_pyramid(x, levels, PyramidKind::laplacian)), x) <= 1e-5);
  }
  const Image r = ramp(32, 24);
  CHECK(max_abs_diff(collapse_pyramid(build_pyramid(r, 2, PyramidKind::laplacian)), r) <= 1e-5);
}

TEST_CASE("collapse of zero bands returns the residual") {
  Pyramid p{PyramidKind::laplacian, {Image(32, 32, 3, 0.0f), Image(16, 16, 3, 0.0f), Image(8, 8, 3, 1.0f)}};
  const Image out = collapse_pyramid(p);
  for (float v : out.data()) CHECK(v == doctest::Approx(1.0f).epsilon(1e-6));
}

TEST_CASE("collapse clamps to the unit range") {
  Pyramid p{PyramidKind::laplacian, {Image(16, 16, 3, 0.8f), Image(8, 8, 3, 0.9f)}};
  const Image out = collapse_pyramid(p);
  for (float v : out.data()) CHECK(v == 1.0f);
}

TEST_CASE("pyramid errors") {
  const Image img(32, 32);
  CHECK(error_kind([&] { build_pyramid(img, 1, PyramidKind::gaussian); }) == ErrorKind::level_count);
  CHECK(error_kind([&] { build_pyramid(img, 5, PyramidKind::laplacian); }) == ErrorKind::level_count);
  CHECK_FALSE(error_kind([&] { build_pyramid(img, 4, PyramidKind::laplacian); }));
  const Pyramid g = build_pyramid(img, 3, PyramidKind::gaussian);
  CHECK(error_kind([&] { collapse_pyramid(g); }) == ErrorKind::wrong_kind);
}

TEST_CASE("default level count") {
  CHECK(default_levels(256, 256) == 5);
  CHECK(default_levels(64, 64) == 4);
  CHECK(default_levels(112, 64) == 4);
  CHECK(default_levels(16, 16) == 2);
  CHECK(default_levels(8, 8) == 2);
  CHECK(levels_fit(256, 256, default_levels(256, 256)));
  CHECK(levels_fit(64, 64, default_levels(64, 64)));
}

TEST_CASE("lower-face crop geometry") {
  Image aligned(112, 112, 3, 0.0f);
  aligned.at(28, 56, 0) = 1.0f;
  aligned.at(83, 111, 1) = 1.0f;
  const Image crop = crop_lower_face(aligned);
  REQUIRE(crop.width() == 56);
  REQUIRE(crop.height() == 56);
  CHECK(crop.at(0, 0, 0) == 1.0f);
  CHECK(crop.at(55, 55, 1) == 1.0f);

  const Image uniform(112, 112, 3, 0.3f);
  const Image uniform_crop = crop_lower_face(uniform);
  for (float v : uniform_crop.data()) CHECK(v == 0.3f);

  std::mt19937_64 rng(3);
  const Image x = fftest::random_image(112, 112, rng);
  const Image c = crop_lower_face(x);
  bool exact = true;
  for (int i = 0; i < 56; ++i)
    for (int j = 0; j < 56; ++j)
      for (int ch = 0; ch < 3; ++ch) exact = exact && c.at(j, i, ch) == x.at(j + 28, i + 56, ch);
  CHECK(exact);

  CHECK(error_kind([&] { crop_lower_face(Image(100, 112)); }) == ErrorKind::geometry);
  CHECK(error_kind([&] { validate(CropGeometry{112, 60, 60, 56}); }) == ErrorKind::geometry);
}

TEST_CASE("morphology examples") {
  std::mt19937_64 rng(5);
  const Mask m = fftest::random_mask(20, 15, rng);
  CHECK(erode(m, 0) == m);
  CHECK(dilate(m, 0) == m);

  const Mask full(10, 10, true);
  const Mask e = erode(full, 1);
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 10; ++x) CHECK(e.at(x, y) == (x > 0 && y > 0 && x < 9 && y < 9));

  Mask dot(9, 9);
  dot.set(4, 4, true);
  const Mask d = dilate(dot, 1);
  CHECK(d.count() == 5);
  CHECK(d.at(4, 3));
  CHECK(d.at(3, 4));
  CHECK(d.at(5, 4));
  CHECK(d.at(4, 5));
  CHECK_FALSE(d.at(3, 3));

  CHECK(error_kind([&] { erode(m, -1); }) == ErrorKind::contract);
}

TEST_CASE("morphology matches brute-force min/max oracle") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 40; ++trial) {
    const Mask m = fftest::random_mask(12 + trial % 5, 10 + trial % 3, rng, 0.3 + 0.01 * trial);
    for (int r = 0; r <= 3; ++r) {
      CHECK(erode(m, r) == brute_morph(m, false, r));
      CHECK(dilate(m, r) == brute_morph(m, true, r));
    }
  }
}

TEST_CASE("morphology duality away from the raster border") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const Mask m = fftest::random_mask(16, 16, rng);
    for (int r = 1; r <= 2; ++r) {
      const Mask lhs = dilate(m, r);
      const Mask rhs = erode(m.complement(), r).complement();
      for (int y = r; y < 16 - r; ++y)
        for (int x = r; x < 16 - r; ++x) CHECK(lhs.at(x, y) == rhs.at(x, y));
    }
  }
}

TEST_CASE("raster construction and pipeline checks") {
  CHECK(error_kind([] { Image(0, 5); }) == ErrorKind::geometry);
  CHECK(error_kind([] { Mask(4, -1); }) == ErrorKind::geometry);
  CHECK(error_kind([] { require_pipeline_image(Image(4, 4), "x"); }) == ErrorKind::geometry);
  CHECK(error_kind([] { require_pipeline_image(Image(8, 8, 1), "x"); }) == ErrorKind::geometry);
  Image nan(8, 8);
  nan.at(1, 1, 1) = std::nanf("");
  CHECK(error_kind([&] { require_pipeline_image(nan, "x"); }) == ErrorKind::validation);
  CHECK_FALSE(error_kind([] { require_pipeline_image(Image(8, 8), "x"); }));
  CHECK(error_kind([] { require_same_dims(Image(8, 8), Mask(8, 9), "x"); }) == ErrorKind::geometry);
}

TEST_CASE("PNG round trip quantizes with round-half-up") {
  const auto dir = fftest::scratch_dir("png");
  Image img(8, 8, 3, 0.0f);
  img.at(0, 0, 0) = 0.5f;          // 127.5 -> 128
  img.at(1, 0, 0) = 127.4f / 255;  // -> 127
  img.at(2, 0, 0) = 1.0f;
  img.at(3, 0, 0) = 7.0f / 255;
  write_image_png(dir / "x.png", img);
  const Image back = read_image_png(dir / "x.png");
  CHECK(back.at(0, 0, 0) == 128.0f / 255);
  CHECK(back.at(1, 0, 0) == 127.0f / 255);
  CHECK(back.at(2, 0, 0) == 1.0f);
  CHECK(back.at(3, 0, 0) == 7.0f / 255);
  CHECK(probe_png(dir / "x.png").width == 8);

  Mask m(8, 8);
  m.set(2, 3, true);
  write_mask_png(dir / "m.png", m);
  CHECK(read_mask_png(dir / "m.png") == m);
  // Any nonzero value, in any channel, is foreground.
  Image faint(8, 8, 3, 0.0f);
  faint.at(5, 5, 2) = 1.0f / 255;
  write_image_png(dir / "faint.png", faint);
  const Mask fm = read_mask_png(dir / "faint.png");
  CHECK(fm.count() == 1);
  CHECK(fm.at(5, 5));
  CHECK(error_kind([&] { read_image_png(dir / "missing.png"); }) == ErrorKind::io);
  std::filesystem::remove_all(dir);
}
