#include "faceforge/losses.hpp"

#include <cmath>
#include <string>

#include "faceforge/error.hpp"

namespace faceforge {

void validate(const LossWeights& w) {
  for (double l : w.lambda_ct)
    if (!(l >= 0.0) || !std::isfinite(l)) throw Error(ErrorKind::validation, "loss weights must be finite and >= 0");
  for (double l : w.lambda_fix)
    if (!(l >= 0.0) || !std::isfinite(l)) throw Error(ErrorKind::validation, "loss weights must be finite and >= 0");
}

double pixel_loss(const Image& y, const Image& reference) {
  if (!y.same_shape(reference)) throw Error(ErrorKind::validation, "pixel loss operands differ in shape");
  if (y.empty()) throw Error(ErrorKind::validation, "pixel loss of empty images");
  auto a = y.data();
  auto b = reference.data();
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(static_cast<double>(a[i]) - b[i]);
  return sum / static_cast<double>(a.size());
}

double perceptual_loss(const FeatureStack& fy, const FeatureStack& fr) {
  if (fy.size() != fr.size()) {
    throw Error(ErrorKind::validation, "feature stacks have " + std::to_string(fy.size()) + " vs " +
                                           std::to_string(fr.size()) + " layers");
  }
  double total = 0.0;
  for (std::size_t k = 0; k < fy.size(); ++k) {
    const auto& a = fy[k];
    const auto& b = fr[k];
    if (a.shape != b.shape || a.values.size() != b.values.size()) {
      throw Error(ErrorKind::validation, "feature layer " + std::to_string(k) + " shapes differ");
    }
    if (a.values.empty()) throw Error(ErrorKind::validation, "feature layer " + std::to_string(k) + " is empty");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) sum += std::abs(static_cast<double>(a.values[i]) - b.values[i]);
    total += sum / static_cast<double>(a.values.size());
  }
  return total;
}

double identity_loss(const Embedding& e_y, const Embedding& e_ref) { return 1.0 - cosine_similarity(e_y, e_ref); }

CycleTripletLoss cycle_triplet_total(const Image& y, const Image& reference, const FeatureStack& fy,
                                     const FeatureStack& fr, const Embedding& e_y, const Embedding& e_ref,
                                     const LossWeights& w) {
  validate(w);
  CycleTripletLoss out;
  out.pixel = pixel_loss(y, reference);
  out.lpips = perceptual_loss(fy, fr);
  out.id = identity_loss(e_y, e_ref);
  out.total = w.lambda_ct[0] * out.pixel + w.lambda_ct[1] * out.lpips + w.lambda_ct[2] * out.id;
  return out;
}

FixerLoss fixer_total(const Embedding& e_src, const Embedding& e_ref, const Embedding& e_y, const LossWeights& w,
                      bool has_reference) {
  validate(w);
  FixerLoss out;
  out.source = identity_loss(e_src, e_y);
  if (has_reference) out.reference = identity_loss(e_ref, e_y);
  out.total = w.lambda_fix[0] * out.source;
  if (has_reference) out.total += w.lambda_fix[1] * out.reference;
  return out;
}

}  // namespace faceforge
