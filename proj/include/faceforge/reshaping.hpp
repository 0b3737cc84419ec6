#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "faceforge/image.hpp"

namespace faceforge {

// Four-way partition of two face-foreground masks. M = face of the coarse
// blend, R = face of the reenacted image, g = complement.
enum class Region : std::uint8_t {
  gray = 0,    // M_g ∩ R_g, shared background
  yellow = 1,  // M_f ∩ R_f, shared face
  green = 2,   // M_g ∩ R_f, reenacted-only bulge (kept)
  blue = 3,    // M_f ∩ R_g, blend-only bulge (dropped and inpainted)
};

class RegionMap {
 public:
  RegionMap() = default;
  RegionMap(int width, int height, Region fill = Region::gray);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  Region at(int x, int y) const { return labels_[static_cast<std::size_t>(y) * width_ + x]; }
  void set(int x, int y, Region r) { labels_[static_cast<std::size_t>(y) * width_ + x] = r; }
  std::span<const Region> labels() const noexcept { return labels_; }

  // Indexed by the Region value.
  std::array<std::size_t, 4> counts() const;

  bool operator==(const RegionMap&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<Region> labels_;
};

RegionMap compute_region_map(const Mask& m_face, const Mask& r_face);

// Color-coded rendering: gray (128,128,128), yellow (255,255,0),
// green (0,255,0), blue (0,0,255).
Image render_region_map(const RegionMap& map);

struct InpaintConfig {
  int max_iterations = 2000;
  double residual_tolerance = 1e-4;

  bool operator==(const InpaintConfig&) const = default;
};

void validate(const InpaintConfig& cfg);

struct InpaintReport {
  std::size_t filled_pixels = 0;
  int iterations = 0;
  double final_residual = 0.0;
  bool converged = true;
  // Max residual after each red-black sweep.
  std::vector<double> residual_history;
};

struct ReshapeResult {
  Image image;
  InpaintReport report;
};

// Drops the BLUE region of `blended` and refills it by Laplace diffusion
// (red-black Gauss-Seidel, 4-neighbour stencil) with Dirichlet values from
// adjacent non-BLUE pixels. All non-BLUE pixels are copied bit-exactly.
// Throws ErrorKind::unfillable when a BLUE component has no non-BLUE
// neighbour to draw boundary values from.
ReshapeResult reshape_inpaint(const Image& blended, const RegionMap& region_map,
                              const InpaintConfig& cfg = {});

}  // namespace faceforge
