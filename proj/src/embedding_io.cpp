#include "faceforge/embedding_io.hpp"

#include <json.hpp>

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "faceforge/error.hpp"

namespace faceforge {
namespace {

std::vector<std::uint8_t> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t load_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}

void store_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

Error schema_error(const std::filesystem::path& path, std::size_t offset, const std::string& what) {
  return Error(ErrorKind::validation, path.string() + ": byte offset " + std::to_string(offset) + ": " + what);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

LabeledEmbeddings EmbeddingTable::labeled() const {
  LabeledEmbeddings out;
  out.embeddings = matrix;
  out.ids.reserve(records.size());
  for (const auto& r : records) out.ids.push_back(r.id);
  return out;
}

EmbeddingMatrix read_emb1(const std::filesystem::path& path) {
  const auto bytes = slurp(path);
  if (bytes.size() < kEmb1HeaderBytes) {
    throw schema_error(path, bytes.size(), "truncated header (need 12 bytes)");
  }
  if (std::memcmp(bytes.data(), "EMB1", 4) != 0) throw schema_error(path, 0, "bad magic, expected 'EMB1'");
  const std::uint32_t dim = load_u32(bytes.data() + 4);
  const std::uint32_t count = load_u32(bytes.data() + 8);
  const std::uint64_t payload = static_cast<std::uint64_t>(dim) * count * 4;
  if (bytes.size() - kEmb1HeaderBytes != payload) {
    throw schema_error(path, std::min<std::uint64_t>(bytes.size(), kEmb1HeaderBytes + payload),
                       "payload is " + std::to_string(bytes.size() - kEmb1HeaderBytes) + " bytes, header (dim " +
                           std::to_string(dim) + ", count " + std::to_string(count) + ") implies " +
                           std::to_string(payload));
  }
  std::vector<float> values(static_cast<std::size_t>(dim) * count);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::size_t offset = kEmb1HeaderBytes + 4 * i;
    const float v = std::bit_cast<float>(load_u32(bytes.data() + offset));
    if (!std::isfinite(v)) throw schema_error(path, offset, "non-finite value");
    values[i] = v;
  }
  return EmbeddingMatrix(count, dim, std::move(values));
}

void write_emb1(const std::filesystem::path& path, const EmbeddingMatrix& matrix) {
  std::string out = "EMB1";
  store_u32(out, static_cast<std::uint32_t>(matrix.dim()));
  store_u32(out, static_cast<std::uint32_t>(matrix.rows()));
  out.reserve(out.size() + matrix.values().size() * 4);
  for (float v : matrix.values()) store_u32(out, std::bit_cast<std::uint32_t>(v));
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorKind::io, "cannot write " + path.string());
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
}

std::vector<EmbeddingRecord> read_sidecar(const std::filesystem::path& path, std::size_t rows) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open sidecar " + path.string());
  std::vector<EmbeddingRecord> out(rows);
  std::vector<bool> seen(rows, false);
  std::string line;
  std::size_t offset = 0;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t line_offset = offset;
    offset += line.size() + 1;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw schema_error(path, line_offset + (e.byte > 0 ? e.byte - 1 : 0),
                         "line " + std::to_string(line_no) + " is not JSON");
    }
    if (!j.is_object() || !j.contains("index") || !j["index"].is_number_unsigned() || !j.contains("id") ||
        !j["id"].is_string()) {
      throw schema_error(path, line_offset, "line " + std::to_string(line_no) + " needs unsigned 'index' and string 'id'");
    }
    const auto index = j["index"].get<std::size_t>();
    if (index >= rows) {
      throw schema_error(path, line_offset, "index " + std::to_string(index) + " out of range for " +
                                                std::to_string(rows) + " rows");
    }
    if (seen[index]) throw schema_error(path, line_offset, "duplicate index " + std::to_string(index));
    seen[index] = true;
    out[index].id = j["id"].get<std::string>();
    if (j.contains("path") && j["path"].is_string()) out[index].path = j["path"].get<std::string>();
  }
  for (std::size_t i = 0; i < rows; ++i) {
    if (!seen[i]) throw schema_error(path, offset, "missing record for row " + std::to_string(i));
  }
  return out;
}

void write_sidecar(const std::filesystem::path& path, const std::vector<EmbeddingRecord>& records) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw Error(ErrorKind::io, "cannot write " + path.string());
  for (std::size_t i = 0; i < records.size(); ++i) {
    nlohmann::ordered_json j;
    j["index"] = i;
    j["id"] = records[i].id;
    j["path"] = records[i].path;
    f << j.dump() << '\n';
  }
}

EmbeddingTable read_embedding_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw schema_error(path, 0, "empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv_line(line);
  if (header.size() < 3 || header[0] != "id" || header[1] != "path") {
    throw schema_error(path, 0, "CSV header must be id,path,v0..v{d-1}");
  }
  const std::size_t dim = header.size() - 2;
  for (std::size_t k = 0; k < dim; ++k) {
    if (header[k + 2] != "v" + std::to_string(k)) {
      throw schema_error(path, 0, "CSV header column " + std::to_string(k + 2) + " must be v" + std::to_string(k));
    }
  }
  std::size_t offset = line.size() + 1;
  EmbeddingTable table;
  std::vector<float> values;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    const std::size_t line_offset = offset;
    offset += line.size() + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != dim + 2) {
      throw schema_error(path, line_offset, "expected " + std::to_string(dim + 2) + " fields, got " +
                                                std::to_string(fields.size()));
    }
    table.records.push_back({fields[0], fields[1]});
    std::size_t field_offset = line_offset + fields[0].size() + fields[1].size() + 2;
    for (std::size_t k = 0; k < dim; ++k) {
      const std::string& text = fields[k + 2];
      char* end = nullptr;
      const float v = std::strtof(text.c_str(), &end);
      if (text.empty() || end != text.c_str() + text.size() || !std::isfinite(v)) {
        throw schema_error(path, field_offset, "field '" + text + "' is not a finite number");
      }
      values.push_back(v);
      field_offset += text.size() + 1;
    }
    ++rows;
  }
  table.matrix = EmbeddingMatrix(rows, dim, std::move(values));
  return table;
}

void write_embedding_csv(const std::filesystem::path& path, const EmbeddingTable& table) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw Error(ErrorKind::io, "cannot write " + path.string());
  f << "id,path";
  for (std::size_t k = 0; k < table.matrix.dim(); ++k) f << ",v" << k;
  f << '\n';
  f.precision(9);
  for (std::size_t i = 0; i < table.matrix.rows(); ++i) {
    const auto& rec = i < table.records.size() ? table.records[i] : EmbeddingRecord{};
    f << rec.id << ',' << rec.path;
    for (float v : table.matrix.row(i)) f << ',' << v;
    f << '\n';
  }
}

EmbeddingTable load_embeddings(const std::filesystem::path& path,
                               const std::optional<std::filesystem::path>& sidecar) {
  char magic[4] = {};
  {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::io, "cannot open " + path.string());
    in.read(magic, 4);
  }
  if (std::memcmp(magic, "EMB1", 4) != 0) {
    if (std::memcmp(magic, "id,p", 4) == 0) return read_embedding_csv(path);
    throw schema_error(path, 0, "neither EMB1 magic nor CSV header");
  }
  EmbeddingTable table;
  table.matrix = read_emb1(path);
  std::filesystem::path meta = sidecar ? *sidecar : std::filesystem::path(path.string() + ".jsonl");
  if (sidecar || std::filesystem::exists(meta)) table.records = read_sidecar(meta, table.matrix.rows());
  return table;
}

}  // namespace faceforge
