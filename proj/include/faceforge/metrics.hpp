#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace faceforge {

// Fixed-dimension feature vector from an external network (identity,
// lower-face, pose or expression features).
struct Embedding {
  std::vector<float> values;
  bool normalized = false;

  std::size_t dim() const noexcept { return values.size(); }
  bool operator==(const Embedding&) const = default;
};

// Throws on non-finite values, or when `normalized` is set but |v| != 1.
void validate(const Embedding& e);

// Dense row-major count x dim matrix of float features.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  EmbeddingMatrix(std::size_t rows, std::size_t dim);
  EmbeddingMatrix(std::size_t rows, std::size_t dim, std::vector<float> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t dim() const noexcept { return dim_; }
  std::span<const float> row(std::size_t i) const { return {values_.data() + i * dim_, dim_}; }
  std::span<float> row(std::size_t i) { return {values_.data() + i * dim_, dim_}; }
  std::span<const float> values() const noexcept { return values_; }

  Embedding embedding(std::size_t i) const;
  void push_back(std::span<const float> row);

  bool operator==(const EmbeddingMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t dim_ = 0;
  std::vector<float> values_;
};

// Identity-labelled embeddings; used for both retrieval queries and galleries.
struct LabeledEmbeddings {
  std::vector<std::string> ids;
  EmbeddingMatrix embeddings;
};
using Gallery = LabeledEmbeddings;

double cosine_similarity(std::span<const float> a, std::span<const float> b);
inline double cosine_similarity(const Embedding& a, const Embedding& b) {
  return cosine_similarity(a.values, b.values);
}

// Mean cosine over aligned pairs. Fed lower-face-crop embeddings it is the
// lower-face similarity metric.
double id_similarity(std::span<const Embedding> swapped, std::span<const Embedding> source);
double id_similarity(const EmbeddingMatrix& swapped, const EmbeddingMatrix& source);

struct RetrievalResult {
  double percentage = 0.0;
  std::size_t hits = 0;
  std::size_t queries = 0;
  std::vector<std::size_t> nearest;  // gallery index per query
};

// Top-1 retrieval by cosine; ties break toward the lowest gallery index.
RetrievalResult id_retrieval(const LabeledEmbeddings& queries, const Gallery& gallery);

double vector_l2_error(std::span<const Embedding> a, std::span<const Embedding> b);
double vector_l2_error(const EmbeddingMatrix& a, const EmbeddingMatrix& b);

struct FidResult {
  double value = 0.0;
  // n <= d for either set: covariance is rank deficient.
  bool undersampled = false;
};

// Frechet distance between Gaussian fits (unbiased covariance) of two
// feature sets. tr((Sa Sb)^1/2) is evaluated through the symmetric
// Sa^1/2 Sb Sa^1/2; eigenvalues below -1e-6 raise ErrorKind::numerical,
// smaller negatives clamp to 0.
FidResult fid_from_features(const EmbeddingMatrix& set_a, const EmbeddingMatrix& set_b);

// v_full = [v_id; v_fix], no renormalization.
Embedding fuse_identity(const Embedding& v_id, const Embedding& v_fix);

inline constexpr std::size_t kFixerEmbeddingDim = 256;

}  // namespace faceforge
