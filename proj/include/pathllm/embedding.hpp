#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pathllm/graph.hpp"

namespace pathllm {

enum class EmbeddingProvenance { ToyModel, External };

struct EmbeddingTable {
  std::size_t dim = 0;
  std::vector<std::vector<float>> vectors;  // indexed by dense node id
  EmbeddingProvenance provenance = EmbeddingProvenance::ToyModel;
};

// embeddings.tsv: <node_id>\t<f1>,<f2>,...,<fd>, rows ordered by node id.
// Floats render in shortest round-trip form, so export/import is lossless.
void export_embeddings(const EmbeddingTable& table, const std::string& path);
EmbeddingTable import_embeddings(const std::string& path);

// embeddings.bin: "PEMB" + n, d as little-endian u32 + n*d little-endian
// 32-bit floats ordered by node id.
void export_embeddings_bin(const EmbeddingTable& table,
                           const std::string& path);
EmbeddingTable import_embeddings_bin(const std::string& path);

// x.y / (|x||y|) with 64-bit accumulation, clamped to [-1, 1]; either
// vector all-zero gives 0. Identical or exactly negated inputs give
// exactly +-1.
double cosine_similarity(const std::vector<float>& x,
                         const std::vector<float>& y);

}  // namespace pathllm
