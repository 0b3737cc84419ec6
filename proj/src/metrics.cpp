#include "faceforge/metrics.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "faceforge/error.hpp"

namespace faceforge {

void validate(const Embedding& e) {
  double sq = 0.0;
  for (float v : e.values) {
    if (!std::isfinite(v)) throw Error(ErrorKind::validation, "embedding contains non-finite values");
    sq += static_cast<double>(v) * v;
  }
  if (e.normalized && std::abs(std::sqrt(sq) - 1.0) > 1e-5) {
    throw Error(ErrorKind::validation, "embedding flagged normalized has norm " + std::to_string(std::sqrt(sq)));
  }
}

EmbeddingMatrix::EmbeddingMatrix(std::size_t rows, std::size_t dim)
    : rows_(rows), dim_(dim), values_(rows * dim, 0.0f) {}

EmbeddingMatrix::EmbeddingMatrix(std::size_t rows, std::size_t dim, std::vector<float> values)
    : rows_(rows), dim_(dim), values_(std::move(values)) {
  if (values_.size() != rows * dim) {
    throw Error(ErrorKind::validation, "embedding matrix holds " + std::to_string(values_.size()) +
                                           " values, expected " + std::to_string(rows * dim));
  }
}

Embedding EmbeddingMatrix::embedding(std::size_t i) const {
  auto r = row(i);
  return Embedding{{r.begin(), r.end()}, false};
}

void EmbeddingMatrix::push_back(std::span<const float> r) {
  if (rows_ == 0 && values_.empty()) dim_ = r.size();
  if (r.size() != dim_) {
    throw Error(ErrorKind::validation, "row of dim " + std::to_string(r.size()) + " pushed into dim " +
                                           std::to_string(dim_) + " matrix");
  }
  values_.insert(values_.end(), r.begin(), r.end());
  ++rows_;
}

namespace {

void require_dims(std::size_t a, std::size_t b) {
  if (a != b) {
    throw Error(ErrorKind::validation, "embedding dims differ: " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

void require_aligned(std::size_t a, std::size_t b) {
  if (a == 0 || b == 0) throw Error(ErrorKind::validation, "embedding lists must not be empty");
  if (a != b) {
    throw Error(ErrorKind::validation, "embedding lists differ in length: " + std::to_string(a) + " vs " +
                                           std::to_string(b));
  }
}

double l2(std::span<const float> a, std::span<const float> b) {
  require_dims(a.size(), b.size());
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - b[i];
    sq += d * d;
  }
  return std::sqrt(sq);
}

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

RowMatrix normalized_rows(const EmbeddingMatrix& m, const char* role) {
  RowMatrix out(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.dim()));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto r = m.row(i);
    double sq = 0.0;
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (!std::isfinite(r[k])) {
        throw Error(ErrorKind::validation, std::string(role) + " row " + std::to_string(i) + " is not finite");
      }
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = r[k];
      sq += static_cast<double>(r[k]) * r[k];
    }
    if (sq == 0.0) {
      throw Error(ErrorKind::degenerate, std::string(role) + " row " + std::to_string(i) + " has zero norm");
    }
    out.row(static_cast<Eigen::Index>(i)) /= std::sqrt(sq);
  }
  return out;
}

Eigen::MatrixXd to_eigen(const EmbeddingMatrix& m) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.dim()));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto r = m.row(i);
    for (std::size_t k = 0; k < r.size(); ++k) {
      if (!std::isfinite(r[k])) {
        throw Error(ErrorKind::validation, "feature row " + std::to_string(i) + " is not finite");
      }
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = r[k];
    }
  }
  return out;
}

// Symmetric square root of a PSD matrix; tiny negative eigenvalues clamp.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  if (eig.info() != Eigen::Success) throw Error(ErrorKind::numerical, "eigendecomposition failed");
  const Eigen::VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace

double cosine_similarity(std::span<const float> a, std::span<const float> b) {
  require_dims(a.size(), b.size());
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * b[i];
    na += static_cast<double>(a[i]) * a[i];
    nb += static_cast<double>(b[i]) * b[i];
  }
  if (na == 0.0 || nb == 0.0) throw Error(ErrorKind::degenerate, "cosine similarity of a zero-norm embedding");
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

double id_similarity(std::span<const Embedding> swapped, std::span<const Embedding> source) {
  require_aligned(swapped.size(), source.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < swapped.size(); ++i) sum += cosine_similarity(swapped[i], source[i]);
  return sum / static_cast<double>(swapped.size());
}

double id_similarity(const EmbeddingMatrix& swapped, const EmbeddingMatrix& source) {
  require_aligned(swapped.rows(), source.rows());
  require_dims(swapped.dim(), source.dim());
  double sum = 0.0;
  for (std::size_t i = 0; i < swapped.rows(); ++i) sum += cosine_similarity(swapped.row(i), source.row(i));
  return sum / static_cast<double>(swapped.rows());
}

RetrievalResult id_retrieval(const LabeledEmbeddings& queries, const Gallery& gallery) {
  if (gallery.embeddings.rows() == 0) throw Error(ErrorKind::validation, "gallery is empty");
  if (queries.embeddings.rows() == 0) throw Error(ErrorKind::validation, "no retrieval queries");
  require_dims(queries.embeddings.dim(), gallery.embeddings.dim());
  if (queries.ids.size() != queries.embeddings.rows() || gallery.ids.size() != gallery.embeddings.rows()) {
    throw Error(ErrorKind::validation, "identity labels do not match embedding rows");
  }

  const RowMatrix q = normalized_rows(queries.embeddings, "query");
  const RowMatrix g = normalized_rows(gallery.embeddings, "gallery");

  RetrievalResult out;
  out.queries = queries.embeddings.rows();
  out.nearest.resize(out.queries);
  constexpr Eigen::Index kBlock = 512;
  for (Eigen::Index start = 0; start < q.rows(); start += kBlock) {
    const Eigen::Index count = std::min(kBlock, q.rows() - start);
    const Eigen::MatrixXd scores = q.middleRows(start, count) * g.transpose();
    for (Eigen::Index i = 0; i < count; ++i) {
      Eigen::Index best = 0;
      for (Eigen::Index j = 1; j < scores.cols(); ++j)
        if (scores(i, j) > scores(i, best)) best = j;
      const auto qi = static_cast<std::size_t>(start + i);
      out.nearest[qi] = static_cast<std::size_t>(best);
      if (gallery.ids[static_cast<std::size_t>(best)] == queries.ids[qi]) ++out.hits;
    }
  }
  out.percentage = 100.0 * static_cast<double>(out.hits) / static_cast<double>(out.queries);
  return out;
}

double vector_l2_error(std::span<const Embedding> a, std::span<const Embedding> b) {
  require_aligned(a.size(), b.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += l2(a[i].values, b[i].values);
  return sum / static_cast<double>(a.size());
}

double vector_l2_error(const EmbeddingMatrix& a, const EmbeddingMatrix& b) {
  require_aligned(a.rows(), b.rows());
  require_dims(a.dim(), b.dim());
  double sum = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) sum += l2(a.row(i), b.row(i));
  return sum / static_cast<double>(a.rows());
}

FidResult fid_from_features(const EmbeddingMatrix& set_a, const EmbeddingMatrix& set_b) {
  require_dims(set_a.dim(), set_b.dim());
  if (set_a.rows() < 2 || set_b.rows() < 2) {
    throw Error(ErrorKind::validation, "FID needs at least 2 samples per set");
  }
  if (set_a.dim() == 0) throw Error(ErrorKind::validation, "FID features have dimension 0");

  const Eigen::MatrixXd a = to_eigen(set_a);
  const Eigen::MatrixXd b = to_eigen(set_b);
  const Eigen::RowVectorXd mu_a = a.colwise().mean();
  const Eigen::RowVectorXd mu_b = b.colwise().mean();
  const Eigen::MatrixXd ca = a.rowwise() - mu_a;
  const Eigen::MatrixXd cb = b.rowwise() - mu_b;
  const Eigen::MatrixXd sigma_a = (ca.transpose() * ca) / static_cast<double>(a.rows() - 1);
  const Eigen::MatrixXd sigma_b = (cb.transpose() * cb) / static_cast<double>(b.rows() - 1);

  const Eigen::MatrixXd root_a = psd_sqrt(sigma_a);
  Eigen::MatrixXd middle = root_a * sigma_b * root_a;
  middle = 0.5 * (middle + middle.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(middle, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw Error(ErrorKind::numerical, "eigendecomposition failed");

  double trace_sqrt = 0.0;
  for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
    const double lambda = eig.eigenvalues()(i);
    if (lambda < -1e-6) {
      throw Error(ErrorKind::numerical, "covariance product has eigenvalue " + std::to_string(lambda));
    }
    trace_sqrt += std::sqrt(std::max(lambda, 0.0));
  }

  FidResult out;
  out.value = std::max(0.0, (mu_a - mu_b).squaredNorm() + sigma_a.trace() + sigma_b.trace() - 2.0 * trace_sqrt);
  out.undersampled = set_a.rows() <= set_a.dim() || set_b.rows() <= set_b.dim();
  return out;
}

Embedding fuse_identity(const Embedding& v_id, const Embedding& v_fix) {
  validate(Embedding{v_id.values, false});
  validate(Embedding{v_fix.values, false});
  Embedding out;
  out.values.reserve(v_id.dim() + v_fix.dim());
  out.values.insert(out.values.end(), v_id.values.begin(), v_id.values.end());
  out.values.insert(out.values.end(), v_fix.values.begin(), v_fix.values.end());
  return out;
}

}  // namespace faceforge
