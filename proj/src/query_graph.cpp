#include "pathllm/query_graph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pathllm/io_util.hpp"

namespace pathllm {

const WeightedEdge* WeightedQueryGraph::find_edge(NodeId a, NodeId b) const {
  if (a > b) std::swap(a, b);
  auto it = std::lower_bound(
      edges.begin(), edges.end(), std::make_pair(a, b),
      [](const WeightedEdge& e, const std::pair<NodeId, NodeId>& key) {
        return e.src != key.first ? e.src < key.first : e.dst < key.second;
      });
  if (it == edges.end() || it->src != a || it->dst != b) return nullptr;
  return &*it;
}

WeightedQueryGraph make_query_graph(std::size_t node_count,
                                    std::vector<WeightedEdge> edges) {
  WeightedQueryGraph wg;
  wg.node_count = node_count;
  for (WeightedEdge& e : edges) {
    if (e.src >= node_count || e.dst >= node_count || e.src == e.dst) {
      throw std::invalid_argument("weighted edge endpoints invalid");
    }
    if (e.src > e.dst) std::swap(e.src, e.dst);
  }
  std::sort(edges.begin(), edges.end(),
            [](const WeightedEdge& a, const WeightedEdge& b) {
              return a.src != b.src ? a.src < b.src : a.dst < b.dst;
            });
  wg.edges = std::move(edges);
  wg.adjacency.assign(node_count, {});
  for (const WeightedEdge& e : wg.edges) {
    wg.adjacency[e.src].emplace_back(e.dst, e.w_star);
    wg.adjacency[e.dst].emplace_back(e.src, e.w_star);
  }
  for (auto& nbrs : wg.adjacency) {
    std::sort(nbrs.begin(), nbrs.end());
  }
  return wg;
}

WeightedQueryGraph build_query_graph(const TextAttributedGraph& g,
                                     const EmbeddingTable& table) {
  if (table.vectors.size() < g.node_count()) {
    std::string missing;
    for (std::size_t v = table.vectors.size(); v < g.node_count(); ++v) {
      if (!missing.empty()) missing += ", ";
      missing += std::to_string(v);
    }
    throw std::invalid_argument("missing embeddings for nodes: " + missing);
  }
  std::vector<WeightedEdge> edges;
  for (const EdgeRecord& e : g.edges) {
    double psi = cosine_similarity(table.vectors[e.src], table.vectors[e.dst]);
    if (psi <= 0.0) continue;
    WeightedEdge we;
    we.src = e.src;
    we.dst = e.dst;
    we.f_star = psi;
    we.w_star = -std::log(psi);
    edges.push_back(we);
  }
  return make_query_graph(g.node_count(), std::move(edges));
}

WeightedQueryGraph uniform_query_graph(const TextAttributedGraph& g) {
  std::vector<WeightedEdge> edges;
  const double f = std::exp(-1.0);
  for (const EdgeRecord& e : g.edges) {
    WeightedEdge we;
    we.src = e.src;
    we.dst = e.dst;
    we.f_star = f;
    we.w_star = 1.0;
    edges.push_back(we);
  }
  return make_query_graph(g.node_count(), std::move(edges));
}

void write_weighted_edges(const WeightedQueryGraph& wg,
                          const std::string& path) {
  std::string out;
  for (const WeightedEdge& e : wg.edges) {
    out += std::to_string(e.src);
    out += '\t';
    out += std::to_string(e.dst);
    out += '\t';
    out += format_double(e.f_star);
    out += '\t';
    out += format_double(e.w_star);
    out += '\n';
  }
  write_text_file(path, out);
}

WeightedQueryGraph read_weighted_edges(const std::string& path,
                                       std::size_t node_count) {
  std::vector<WeightedEdge> edges;
  std::string blob = read_text_file(path);
  std::size_t start = 0;
  while (start < blob.size()) {
    std::size_t nl = blob.find('\n', start);
    if (nl == std::string::npos) nl = blob.size();
    std::string line = blob.substr(start, nl - start);
    start = nl + 1;
    if (line.empty()) continue;
    std::vector<std::string> cols = split_tabs(line);
    if (cols.size() != 4) {
      throw std::runtime_error("weighted edges: expected 4 columns");
    }
    WeightedEdge e;
    e.src = static_cast<NodeId>(std::stoul(cols[0]));
    e.dst = static_cast<NodeId>(std::stoul(cols[1]));
    e.f_star = std::stod(cols[2]);
    e.w_star = std::stod(cols[3]);
    edges.push_back(e);
  }
  return make_query_graph(node_count, std::move(edges));
}

}  // namespace pathllm
