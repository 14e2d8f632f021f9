#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pathllm/embedding.hpp"
#include "pathllm/graph.hpp"

namespace pathllm {

struct WeightedEdge {
  NodeId src = 0;  // src < dst
  NodeId dst = 0;
  double f_star = 0.0;  // edge importance in (0, 1]
  double w_star = 0.0;  // -ln(f_star)
};

// Similarity-reweighted view of a graph: a subset of the base edges, each
// carrying an importance f* > 0 and the weight w* = -ln f*, so minimizing
// summed weights is maximizing the importance product.
struct WeightedQueryGraph {
  std::size_t node_count = 0;
  std::vector<WeightedEdge> edges;  // canonical order (src, dst)
  std::vector<std::vector<std::pair<NodeId, double>>> adjacency;

  const WeightedEdge* find_edge(NodeId a, NodeId b) const;
};

WeightedQueryGraph make_query_graph(std::size_t node_count,
                                    std::vector<WeightedEdge> edges);

// Per base edge (i,j): psi = cosine(xi_i, xi_j), importance max(psi, 0);
// edges with non-positive psi are dropped, the rest get w* = -ln f*.
WeightedQueryGraph build_query_graph(const TextAttributedGraph& g,
                                     const EmbeddingTable& table);

// Every base edge with w* = 1 (importance e^-1, keeping w* = -ln f*).
WeightedQueryGraph uniform_query_graph(const TextAttributedGraph& g);

// weighted_edges.tsv: <src>\t<dst>\t<f_star>\t<w_star>
void write_weighted_edges(const WeightedQueryGraph& wg,
                          const std::string& path);
WeightedQueryGraph read_weighted_edges(const std::string& path,
                                       std::size_t node_count);

}  // namespace pathllm
