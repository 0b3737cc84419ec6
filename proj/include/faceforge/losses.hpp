#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "faceforge/image.hpp"
#include "faceforge/metrics.hpp"

namespace faceforge {

// Cycle-triplet weights (pixel, perceptual, identity) and Fixer weights
// (source term, reference term). Defaults are the FaceShifter-baseline values.
struct LossWeights {
  std::array<double, 3> lambda_ct{1.0, 5.0, 10.0};
  std::array<double, 2> lambda_fix{1.0, 2.0};

  bool operator==(const LossWeights&) const = default;
};

void validate(const LossWeights& w);

// One layer of perceptual features; `shape` is arbitrary but must match
// between compared stacks.
struct FeatureLayer {
  std::vector<std::size_t> shape;
  std::vector<float> values;
};
using FeatureStack = std::vector<FeatureLayer>;

// Mean absolute difference over every pixel and channel.
double pixel_loss(const Image& y, const Image& reference);

// Sum over layers of the per-layer mean absolute difference (unit weights).
double perceptual_loss(const FeatureStack& fy, const FeatureStack& fr);

// 1 - cos(e_y, e_ref), in [0,2].
double identity_loss(const Embedding& e_y, const Embedding& e_ref);

struct CycleTripletLoss {
  double pixel = 0.0;
  double lpips = 0.0;
  double id = 0.0;
  double total = 0.0;
};

CycleTripletLoss cycle_triplet_total(const Image& y, const Image& reference, const FeatureStack& fy,
                                     const FeatureStack& fr, const Embedding& e_y, const Embedding& e_ref,
                                     const LossWeights& w);

struct FixerLoss {
  double source = 0.0;     // 1 - cos(e_src, e_y)
  double reference = 0.0;  // 1 - cos(e_ref, e_y); 0 without a real reference
  double total = 0.0;
};

// The reference term is only evaluated when the triplet has a real
// reference; otherwise e_ref is never read.
FixerLoss fixer_total(const Embedding& e_src, const Embedding& e_ref, const Embedding& e_y, const LossWeights& w,
                      bool has_reference);

}  // namespace faceforge
