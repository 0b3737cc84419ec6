#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "faceforge/metrics.hpp"

namespace faceforge {

// EMB1 layout (little-endian):
//   [0,4)   magic "EMB1"
//   [4,8)   u32 dim
//   [8,12)  u32 count
//   [12,..) count * dim f32, row-major
inline constexpr std::size_t kEmb1HeaderBytes = 12;

struct EmbeddingRecord {
  std::string id;
  std::string path;
};

struct EmbeddingTable {
  EmbeddingMatrix matrix;
  // One entry per row when a sidecar (or CSV) supplied them, else empty.
  std::vector<EmbeddingRecord> records;

  LabeledEmbeddings labeled() const;
};

// Schema failures throw ErrorKind::validation with a message that names the
// byte offset of the offending field.
EmbeddingMatrix read_emb1(const std::filesystem::path& path);
void write_emb1(const std::filesystem::path& path, const EmbeddingMatrix& matrix);

// Sidecar JSONL: one {"index": i, "id": ..., "path": ...} per row, every
// index in [0, count) exactly once.
std::vector<EmbeddingRecord> read_sidecar(const std::filesystem::path& path, std::size_t rows);
void write_sidecar(const std::filesystem::path& path, const std::vector<EmbeddingRecord>& records);

// CSV interop: header `id,path,v0,...,v{d-1}`.
EmbeddingTable read_embedding_csv(const std::filesystem::path& path);
void write_embedding_csv(const std::filesystem::path& path, const EmbeddingTable& table);

// Dispatches on the magic bytes. For EMB1 the sidecar defaults to
// `<path>.jsonl` and is loaded when present (or required when given).
EmbeddingTable load_embeddings(const std::filesystem::path& path,
                               const std::optional<std::filesystem::path>& sidecar = std::nullopt);

}  // namespace faceforge
