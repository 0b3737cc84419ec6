#include <doctest.h>

#include <array>
#include <random>
#include <vector>

#include "faceforge/reshaping.hpp"
#include "support.hpp"

using namespace faceforge;
using fftest::error_kind;

namespace {

Region brute_label(bool mf, bool rf) {
  if (mf && rf) return Region::yellow;
  if (!mf && !rf) return Region::gray;
  if (!mf && rf) return Region::green;
  return Region::blue;
}

RegionMap blue_where(const Mask& m) {
  RegionMap map(m.width(), m.height(), Region::gray);
  for (int y = 0; y < m.height(); ++y)
    for (int x = 0; x < m.width(); ++x)
      if (m.at(x, y)) map.set(x, y, Region::blue);
  return map;
}

Mask disc(int w, int h, double cx, double cy, double r) {
  Mask m(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) m.set(x, y, (x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r);
  return m;
}

// Dense Laplace solve on the BLUE pixels by Gaussian elimination with
// partial pivoting, one channel at a time.
std::vector<double> dense_fill(const Image& img, const Mask& blue, int c) {
  const int w = img.width(), h = img.height();
  std::vector<int> idx(static_cast<std::size_t>(w) * h, -1);
  int n = 0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (blue.at(x, y)) idx[y * w + x] = n++;
  std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const int i = idx[y * w + x];
      if (i < 0) continue;
      const int nb[4][2] = {{x - 1, y}, {x + 1, y}, {x, y - 1}, {x, y + 1}};
      for (auto& p : nb) {
        if (p[0] < 0 || p[1] < 0 || p[0] >= w || p[1] >= h) continue;
        a[i][i] += 1.0;
        const int j = idx[p[1] * w + p[0]];
        if (j >= 0) a[i][j] -= 1.0;
        else a[i][n] += img.at(p[0], p[1], c);
      }
    }
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    std::swap(a[col], a[piv]);
    for (int r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0.0) continue;
      const double f = a[r][col] / a[col][col];
      for (int k = col; k <= n; ++k) a[r][k] -= f * a[col][k];
    }
  }
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = a[i][n] / a[i][i];
  return out;
}

// 4-connected BLUE components with their Dirichlet value range per channel.
struct Component {
  std::vector<int> pixels;
  std::array<float, 3> lo{2, 2, 2}, hi{-1, -1, -1};
};

std::vector<Component> components(const Image& img, const RegionMap& map) {
  const int w = map.width(), h = map.height();
  std::vector<int> seen(static_cast<std::size_t>(w) * h, 0);
  std::vector<Component> out;
  for (int s = 0; s < w * h; ++s) {
    if (seen[s] || map.at(s % w, s / w) != Region::blue) continue;
    Component comp;
    std::vector<int> stack{s};
    seen[s] = 1;
    while (!stack.empty()) {
      const int p = stack.back();
      stack.pop_back();
      comp.pixels.push_back(p);
      const int x = p % w, y = p / w;
      const int nb[4][2] = {{x - 1, y}, {x + 1, y}, {x, y - 1}, {x, y + 1}};
      for (auto& q : nb) {
        if (q[0] < 0 || q[1] < 0 || q[0] >= w || q[1] >= h) continue;
        const int qi = q[1] * w + q[0];
        if (map.at(q[0], q[1]) == Region::blue) {
          if (!seen[qi]) {
            seen[qi] = 1;
            stack.push_back(qi);
          }
        } else {
          for (int c = 0; c < 3; ++c) {
            comp.lo[c] = std::min(comp.lo[c], img.at(q[0], q[1], c));
            comp.hi[c] = std::max(comp.hi[c], img.at(q[0], q[1], c));
          }
        }
      }
    }
    out.push_back(comp);
  }
  return out;
}

}  // namespace

TEST_CASE("region map examples") {
  std::mt19937_64 rng(31);
  const Mask face = fftest::random_mask(32, 24, rng);
  const auto same = compute_region_map(face, face).counts();
  CHECK(same[static_cast<int>(Region::blue)] == 0);
  CHECK(same[static_cast<int>(Region::green)] == 0);
  CHECK(same[static_cast<int>(Region::yellow)] == face.count());
  CHECK(same[static_cast<int>(Region::gray)] == 32 * 24 - face.count());

  const auto all_blue = compute_region_map(Mask(16, 16, true), Mask(16, 16, false)).counts();
  CHECK(all_blue[static_cast<int>(Region::blue)] == 256);

  CHECK(error_kind([] { compute_region_map(Mask(8, 8), Mask(8, 9)); }) == ErrorKind::geometry);
}

TEST_CASE("region map equals per-pixel set evaluation") {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 100; ++trial) {
    const Mask mf = fftest::random_mask(64, 64, rng, 0.2 + 0.006 * trial);
    const Mask rf = fftest::random_mask(64, 64, rng, 0.8 - 0.006 * trial);
    const RegionMap map = compute_region_map(mf, rf);
    bool exact = true;
    for (int y = 0; y < 64; ++y)
      for (int x = 0; x < 64; ++x) exact = exact && map.at(x, y) == brute_label(mf.at(x, y), rf.at(x, y));
    CHECK(exact);
    const auto n = map.counts();
    CHECK(n[0] + n[1] + n[2] + n[3] == 4096);
  }
}

TEST_CASE("region map rendering uses the four-colour palette") {
  RegionMap map(8, 8, Region::gray);
  map.set(1, 0, Region::yellow);
  map.set(2, 0, Region::green);
  map.set(3, 0, Region::blue);
  const Image img = render_region_map(map);
  auto px = [&](int x) { return std::array<float, 3>{img.at(x, 0, 0), img.at(x, 0, 1), img.at(x, 0, 2)}; };
  CHECK(px(0) == std::array<float, 3>{128.0f / 255, 128.0f / 255, 128.0f / 255});
  CHECK(px(1) == std::array<float, 3>{1, 1, 0});
  CHECK(px(2) == std::array<float, 3>{0, 1, 0});
  CHECK(px(3) == std::array<float, 3>{0, 0, 1});
}

TEST_CASE("empty BLUE region leaves the image untouched") {
  std::mt19937_64 rng(33);
  const Image img = fftest::random_image(24, 24, rng);
  const ReshapeResult r = reshape_inpaint(img, RegionMap(24, 24, Region::yellow));
  CHECK(r.image == img);
  CHECK(r.report.filled_pixels == 0);
  CHECK(r.report.converged);
}

TEST_CASE("constant image fills to the constant") {
  std::mt19937_64 rng(34);
  const Image img(32, 32, 3, 0.37f);
  for (int trial = 0; trial < 5; ++trial) {
    Mask blue = fftest::random_mask(32, 32, rng, 0.3);
    const ReshapeResult r = reshape_inpaint(img, blue_where(blue));
    CHECK(fftest::max_abs_diff(r.image, img) <= 1e-6);
  }
}

TEST_CASE("one-pixel strip matches the dense solve") {
  Image img(24, 16);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 24; ++x)
      for (int c = 0; c < 3; ++c) img.at(x, y, c) = x < 10 ? 0.2f + 0.1f * c : 0.8f - 0.2f * c;
  Mask strip(24, 16);
  for (int y = 0; y < 16; ++y) strip.set(10, y, true);
  const ReshapeResult r = reshape_inpaint(img, blue_where(strip));
  CHECK(r.report.converged);
  for (int c = 0; c < 3; ++c) {
    const auto oracle = dense_fill(img, strip, c);
    const float a = img.at(9, 0, c), b = img.at(11, 0, c);
    for (int y = 0; y < 16; ++y) {
      const float v = r.image.at(10, y, c);
      CHECK(v >= std::min(a, b) - 1e-6f);
      CHECK(v <= std::max(a, b) + 1e-6f);
      CHECK(std::abs(v - oracle[y]) <= 1e-3);
    }
  }
}

TEST_CASE("diffusion matches the dense solve on random blobs") {
  std::mt19937_64 rng(35);
  for (int trial = 0; trial < 6; ++trial) {
    const Image img = fftest::random_image(20, 18, rng);
    Mask blob = disc(20, 18, 4 + trial * 2, 9, 3 + trial % 3);
    const ReshapeResult r = reshape_inpaint(img, blue_where(blob), {20000, 1e-9});
    CHECK(r.report.converged);
    for (int c = 0; c < 3; ++c) {
      const auto oracle = dense_fill(img, blob, c);
      int i = 0;
      for (int y = 0; y < 18; ++y)
        for (int x = 0; x < 20; ++x)
          if (blob.at(x, y)) CHECK(std::abs(r.image.at(x, y, c) - oracle[i++]) <= 1e-5);
    }
  }
}

TEST_CASE("non-evolution, maximum principle and monotone residual") {
  std::mt19937_64 rng(36);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const Image img = fftest::random_image(48, 40, rng);
    const Mask mf = disc(48, 40, 20 + 8 * u(rng), 20, 10 + 6 * u(rng));
    const Mask rf = disc(48, 40, 22 + 6 * u(rng), 21, 8 + 5 * u(rng));
    const RegionMap map = compute_region_map(mf, rf);
    const ReshapeResult r = reshape_inpaint(img, map);
    bool kept = true;
    for (int y = 0; y < 40; ++y)
      for (int x = 0; x < 48; ++x)
        if (map.at(x, y) != Region::blue)
          for (int c = 0; c < 3; ++c) kept = kept && r.image.at(x, y, c) == img.at(x, y, c);
    CHECK(kept);
    for (const Component& comp : components(img, map))
      for (int p : comp.pixels)
        for (int c = 0; c < 3; ++c) {
          CHECK(r.image.at(p % 48, p / 48, c) >= comp.lo[c] - 1e-6f);
          CHECK(r.image.at(p % 48, p / 48, c) <= comp.hi[c] + 1e-6f);
        }
    CHECK(r.report.final_residual <= 1e-4);
    const auto& hist = r.report.residual_history;
    for (std::size_t i = 1; i < hist.size(); ++i) CHECK(hist[i] <= hist[i - 1]);
  }
}

TEST_CASE("iteration cap reports non-convergence") {
  std::mt19937_64 rng(37);
  const Image img = fftest::random_image(64, 64, rng);
  const ReshapeResult r = reshape_inpaint(img, blue_where(disc(64, 64, 32, 32, 20)), {3, 1e-12});
  CHECK_FALSE(r.report.converged);
  CHECK(r.report.iterations == 3);
  CHECK(r.report.residual_history.size() == 3);
}

TEST_CASE("reshape errors") {
  const Image img(16, 16, 3, 0.5f);
  CHECK(error_kind([&] { reshape_inpaint(img, RegionMap(16, 16, Region::blue)); }) == ErrorKind::unfillable);
  CHECK(error_kind([&] { reshape_inpaint(img, RegionMap(16, 15)); }) == ErrorKind::geometry);
  CHECK(error_kind([&] { reshape_inpaint(img, RegionMap(16, 16), {0, 1e-4}); }) == ErrorKind::contract);
  CHECK(error_kind([&] { reshape_inpaint(img, RegionMap(16, 16), {10, 0.0}); }) == ErrorKind::contract);
}
