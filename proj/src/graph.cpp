#include "pathllm/graph.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "pathllm/io_util.hpp"

namespace pathllm {

NodeId TextAttributedGraph::find_orig(const std::string& orig_id) const {
  for (const NodeRecord& n : nodes) {
    if (n.orig_id == orig_id) return n.id;
  }
  return kNoNode;
}

const EdgeRecord* TextAttributedGraph::find_edge(NodeId a, NodeId b) const {
  if (a > b) std::swap(a, b);
  auto it = std::lower_bound(
      edges.begin(), edges.end(), std::make_pair(a, b),
      [](const EdgeRecord& e, const std::pair<NodeId, NodeId>& key) {
        return e.src != key.first ? e.src < key.first : e.dst < key.second;
      });
  if (it == edges.end() || it->src != a || it->dst != b) return nullptr;
  return &*it;
}

TextAttributedGraph make_graph(GraphKind kind, std::vector<NodeRecord> nodes,
                               std::vector<EdgeRecord> raw_edges) {
  TextAttributedGraph g;
  g.kind = kind;
  g.nodes = std::move(nodes);
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    g.nodes[i].id = static_cast<NodeId>(i);
  }

  struct PairHash {
    std::size_t operator()(const std::pair<NodeId, NodeId>& p) const {
      return std::hash<std::uint64_t>()(
          (static_cast<std::uint64_t>(p.first) << 32) | p.second);
    }
  };
  std::unordered_set<std::pair<NodeId, NodeId>, PairHash> seen;
  for (EdgeRecord& e : raw_edges) {
    if (e.src >= g.nodes.size() || e.dst >= g.nodes.size()) {
      throw std::runtime_error("edge endpoint out of range");
    }
    if (e.src == e.dst) {
      ++g.dropped_self_loops;
      continue;
    }
    if (e.src > e.dst) std::swap(e.src, e.dst);
    if (!seen.insert({e.src, e.dst}).second) {
      ++g.dropped_duplicate_edges;
      continue;
    }
    g.edges.push_back(std::move(e));
  }
  std::sort(g.edges.begin(), g.edges.end(),
            [](const EdgeRecord& a, const EdgeRecord& b) {
              return a.src != b.src ? a.src < b.src : a.dst < b.dst;
            });

  g.adjacency.assign(g.nodes.size(), {});
  for (const EdgeRecord& e : g.edges) {
    g.adjacency[e.src].push_back(e.dst);
    g.adjacency[e.dst].push_back(e.src);
  }
  for (auto& nbrs : g.adjacency) std::sort(nbrs.begin(), nbrs.end());
  return g;
}

namespace {

std::vector<std::string> read_lines(const std::string& path) {
  std::string blob = read_text_file(path);
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= blob.size()) {
    std::size_t nl = blob.find('\n', start);
    if (nl == std::string::npos) {
      if (start < blob.size()) lines.push_back(blob.substr(start));
      break;
    }
    std::string line = blob.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    start = nl + 1;
  }
  return lines;
}

[[noreturn]] void fail_at(const std::string& path, std::size_t line_no,
                          const std::string& what) {
  std::ostringstream msg;
  msg << path << ": " << what << ", line " << line_no;
  throw std::runtime_error(msg.str());
}

}  // namespace

TextAttributedGraph load_graph(const std::string& nodes_path,
                               const std::string& edges_path, GraphKind kind) {
  std::vector<NodeRecord> nodes;
  std::unordered_map<std::string, NodeId> by_orig;

  std::vector<std::string> node_lines = read_lines(nodes_path);
  for (std::size_t i = 0; i < node_lines.size(); ++i) {
    if (node_lines[i].empty()) continue;
    std::vector<std::string> cols = split_tabs(node_lines[i]);
    if (cols.size() != 3) fail_at(nodes_path, i + 1, "expected 3 columns");
    NodeRecord rec;
    rec.orig_id = unescape_tsv(cols[0]);
    rec.node_type = unescape_tsv(cols[1]);
    rec.raw_text = unescape_tsv(cols[2]);
    if (rec.orig_id.empty()) fail_at(nodes_path, i + 1, "empty node id");
    auto [it, inserted] =
        by_orig.emplace(rec.orig_id, static_cast<NodeId>(nodes.size()));
    if (!inserted) fail_at(nodes_path, i + 1, "duplicate node id");
    nodes.push_back(std::move(rec));
  }

  std::vector<EdgeRecord> raw_edges;
  std::vector<std::string> edge_lines = read_lines(edges_path);
  for (std::size_t i = 0; i < edge_lines.size(); ++i) {
    if (edge_lines[i].empty()) continue;
    std::vector<std::string> cols = split_tabs(edge_lines[i]);
    if (cols.size() != 2 && cols.size() != 3) {
      fail_at(edges_path, i + 1, "expected 2 or 3 columns");
    }
    auto src_it = by_orig.find(unescape_tsv(cols[0]));
    if (src_it == by_orig.end()) {
      fail_at(edges_path, i + 1, "dangling endpoint");
    }
    auto dst_it = by_orig.find(unescape_tsv(cols[1]));
    if (dst_it == by_orig.end()) {
      fail_at(edges_path, i + 1, "dangling endpoint");
    }
    EdgeRecord e;
    e.src = src_it->second;
    e.dst = dst_it->second;
    if (cols.size() == 3) e.edge_text = unescape_tsv(cols[2]);
    raw_edges.push_back(std::move(e));
  }

  return make_graph(kind, std::move(nodes), std::move(raw_edges));
}

void save_graph(const TextAttributedGraph& g, const std::string& nodes_path,
                const std::string& edges_path) {
  std::string nodes_out;
  for (const NodeRecord& n : g.nodes) {
    nodes_out += escape_tsv(n.orig_id);
    nodes_out += '\t';
    nodes_out += escape_tsv(n.node_type);
    nodes_out += '\t';
    nodes_out += escape_tsv(n.raw_text);
    nodes_out += '\n';
  }
  write_text_file(nodes_path, nodes_out);

  std::string edges_out;
  for (const EdgeRecord& e : g.edges) {
    edges_out += escape_tsv(g.nodes[e.src].orig_id);
    edges_out += '\t';
    edges_out += escape_tsv(g.nodes[e.dst].orig_id);
    edges_out += '\t';
    edges_out += escape_tsv(e.edge_text);
    edges_out += '\n';
  }
  write_text_file(edges_path, edges_out);
}

std::vector<std::pair<NodeId, std::string>> load_labels(
    const std::string& labels_path, const TextAttributedGraph& g) {
  std::unordered_map<std::string, NodeId> by_orig;
  for (const NodeRecord& n : g.nodes) by_orig.emplace(n.orig_id, n.id);

  std::vector<std::pair<NodeId, std::string>> labels;
  std::vector<std::string> lines = read_lines(labels_path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    std::vector<std::string> cols = split_tabs(lines[i]);
    if (cols.size() != 2) fail_at(labels_path, i + 1, "expected 2 columns");
    auto it = by_orig.find(unescape_tsv(cols[0]));
    if (it == by_orig.end()) fail_at(labels_path, i + 1, "unknown node id");
    labels.emplace_back(it->second, unescape_tsv(cols[1]));
  }
  return labels;
}

std::vector<std::int32_t> bfs_distances(const TextAttributedGraph& g,
                                        NodeId source) {
  std::vector<std::int32_t> dist(g.node_count(), -1);
  dist[source] = 0;
  std::deque<NodeId> queue{source};
  while (!queue.empty()) {
    NodeId v = queue.front();
    queue.pop_front();
    for (NodeId u : g.adjacency[v]) {
      if (dist[u] < 0) {
        dist[u] = dist[v] + 1;
        queue.push_back(u);
      }
    }
  }
  return dist;
}

}  // namespace pathllm
