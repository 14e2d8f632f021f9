#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pathllm {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = static_cast<NodeId>(-1);

enum class GraphKind { Homogeneous, Heterogeneous };

struct NodeRecord {
  NodeId id = 0;
  std::string orig_id;   // identifier from the source file, kept for output
  std::string node_type;
  std::string raw_text;
};

struct EdgeRecord {
  NodeId src = 0;
  NodeId dst = 0;
  std::string edge_text;
};

/// In-memory text-attributed graph. Node ids are dense 0..n-1, the adjacency
/// is an undirected view with sorted neighbor lists, no self-loops, no
/// duplicate edges. Immutable after load; safe for concurrent reads.
struct TextAttributedGraph {
  GraphKind kind = GraphKind::Homogeneous;
  std::vector<NodeRecord> nodes;
  std::vector<EdgeRecord> edges;  // canonical src < dst, sorted
  std::vector<std::vector<NodeId>> adjacency;

  // Loader diagnostics.
  std::size_t dropped_self_loops = 0;
  std::size_t dropped_duplicate_edges = 0;

  std::size_t node_count() const { return nodes.size(); }
  std::size_t edge_count() const { return edges.size(); }

  const std::vector<NodeId>& neighbors(NodeId v) const { return adjacency[v]; }

  // Dense id for an original id, or kNoNode.
  NodeId find_orig(const std::string& orig_id) const;

  // Record for the unordered pair {a, b}, or nullptr when not adjacent.
  const EdgeRecord* find_edge(NodeId a, NodeId b) const;
};

// Build a validated graph from edge endpoint pairs given as dense ids.
// Drops self-loops, collapses duplicates, sorts adjacency.
TextAttributedGraph make_graph(GraphKind kind, std::vector<NodeRecord> nodes,
                               std::vector<EdgeRecord> raw_edges);

// nodes.tsv: <orig_id>\t<node_type>\t<raw_text>   (text tab-escaped)
// edges.tsv: <src_orig_id>\t<dst_orig_id>\t<edge_text>   (edge_text optional)
// Throws std::runtime_error with the offending line number on malformed
// input, duplicate node ids or dangling edge endpoints.
TextAttributedGraph load_graph(const std::string& nodes_path,
                               const std::string& edges_path, GraphKind kind);

// Inverse of load_graph; load(save(g)) reproduces g exactly.
void save_graph(const TextAttributedGraph& g, const std::string& nodes_path,
                const std::string& edges_path);

// labels.tsv: <orig_id>\t<label_string>. Returned as (dense id, label).
std::vector<std::pair<NodeId, std::string>> load_labels(
    const std::string& labels_path, const TextAttributedGraph& g);

// Exact unweighted hop distances from `source`; -1 marks unreachable nodes.
std::vector<std::int32_t> bfs_distances(const TextAttributedGraph& g,
                                        NodeId source);

}  // namespace pathllm
