#include "pathllm/embedding.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "pathllm/io_util.hpp"

namespace pathllm {

void export_embeddings(const EmbeddingTable& table, const std::string& path) {
  std::string out;
  for (std::size_t v = 0; v < table.vectors.size(); ++v) {
    const std::vector<float>& row = table.vectors[v];
    if (row.size() != table.dim) {
      throw std::runtime_error("embedding row " + std::to_string(v) +
                               " has wrong dimension");
    }
    out += std::to_string(v);
    out += '\t';
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      if (!std::isfinite(row[i])) {
        throw std::runtime_error("non-finite embedding entry at node " +
                                 std::to_string(v));
      }
      out += format_f32(row[i]);
    }
    out += '\n';
  }
  write_text_file(path, out);
}

EmbeddingTable import_embeddings(const std::string& path) {
  EmbeddingTable table;
  table.provenance = EmbeddingProvenance::External;
  std::string blob = read_text_file(path);
  std::size_t start = 0;
  std::size_t row_no = 0;
  while (start < blob.size()) {
    std::size_t nl = blob.find('\n', start);
    if (nl == std::string::npos) nl = blob.size();
    std::string line = blob.substr(start, nl - start);
    start = nl + 1;
    if (line.empty()) continue;
    std::vector<std::string> cols = split_tabs(line);
    if (cols.size() != 2) {
      throw std::runtime_error("embeddings: expected 2 columns at row " +
                               std::to_string(row_no));
    }
    std::size_t id = std::stoul(cols[0]);
    if (id != table.vectors.size()) {
      throw std::runtime_error("embeddings: node ids must be dense, got " +
                               cols[0]);
    }
    std::vector<float> row;
    const std::string& csv = cols[1];
    std::size_t p = 0;
    while (p <= csv.size()) {
      std::size_t comma = csv.find(',', p);
      if (comma == std::string::npos) comma = csv.size();
      std::string field = csv.substr(p, comma - p);
      if (field.empty()) {
        throw std::runtime_error("embeddings: empty field at node " +
                                 cols[0]);
      }
      float f = std::strtof(field.c_str(), nullptr);
      if (!std::isfinite(f)) {
        throw std::runtime_error("embeddings: non-finite entry at node " +
                                 cols[0]);
      }
      row.push_back(f);
      if (comma == csv.size()) break;
      p = comma + 1;
    }
    if (table.vectors.empty()) {
      table.dim = row.size();
    } else if (row.size() != table.dim) {
      throw std::runtime_error("embeddings: dimension mismatch at node " +
                               cols[0]);
    }
    table.vectors.push_back(std::move(row));
    ++row_no;
  }
  return table;
}

void export_embeddings_bin(const EmbeddingTable& table,
                           const std::string& path) {
  std::string out = "PEMB";
  auto put_u32 = [&out](std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 24) & 0xff));
  };
  put_u32(static_cast<std::uint32_t>(table.vectors.size()));
  put_u32(static_cast<std::uint32_t>(table.dim));
  for (const std::vector<float>& row : table.vectors) {
    if (row.size() != table.dim) {
      throw std::runtime_error("embedding row has wrong dimension");
    }
    for (float f : row) {
      std::uint32_t bits;
      std::memcpy(&bits, &f, 4);
      put_u32(bits);
    }
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write " + path);
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw std::runtime_error("write failed: " + path);
}

EmbeddingTable import_embeddings_bin(const std::string& path) {
  std::string blob = read_text_file(path);
  if (blob.size() < 12 || blob.compare(0, 4, "PEMB") != 0) {
    throw std::runtime_error("bad embeddings magic");
  }
  std::size_t pos = 4;
  auto get_u32 = [&blob, &pos]() {
    if (pos + 4 > blob.size()) {
      throw std::runtime_error("truncated embeddings file");
    }
    std::uint32_t v =
        static_cast<std::uint8_t>(blob[pos]) |
        (static_cast<std::uint32_t>(static_cast<std::uint8_t>(blob[pos + 1]))
         << 8) |
        (static_cast<std::uint32_t>(static_cast<std::uint8_t>(blob[pos + 2]))
         << 16) |
        (static_cast<std::uint32_t>(static_cast<std::uint8_t>(blob[pos + 3]))
         << 24);
    pos += 4;
    return v;
  };
  EmbeddingTable table;
  table.provenance = EmbeddingProvenance::External;
  std::uint32_t n = get_u32();
  table.dim = get_u32();
  table.vectors.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    std::vector<float> row(table.dim);
    for (std::size_t j = 0; j < table.dim; ++j) {
      std::uint32_t bits = get_u32();
      float f;
      std::memcpy(&f, &bits, 4);
      if (!std::isfinite(f)) {
        throw std::runtime_error("embeddings: non-finite entry at node " +
                                 std::to_string(i));
      }
      row[j] = f;
    }
    table.vectors.push_back(std::move(row));
  }
  if (pos != blob.size()) throw std::runtime_error("trailing embedding bytes");
  return table;
}

double cosine_similarity(const std::vector<float>& x,
                         const std::vector<float>& y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("cosine: dimension mismatch");
  }
  double dot = 0, nx = 0, ny = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    dot += static_cast<double>(x[i]) * static_cast<double>(y[i]);
    nx += static_cast<double>(x[i]) * static_cast<double>(x[i]);
    ny += static_cast<double>(y[i]) * static_cast<double>(y[i]);
  }
  if (nx == 0.0 || ny == 0.0) return 0.0;
  // Factored as (dot/nx) * sqrt(nx/ny) so identical or exactly negated
  // inputs give exactly +-1: both ratios are then exact in IEEE arithmetic.
  double psi = (dot / nx) * std::sqrt(nx / ny);
  if (psi > 1.0) psi = 1.0;
  if (psi < -1.0) psi = -1.0;
  return psi;
}

}  // namespace pathllm
